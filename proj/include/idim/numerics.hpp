#pragma once

#include <vector>

#include "idim/types.hpp"

namespace idim {

/// Subtracts the column means. Output column means are zero to ~1e-10.
SampleMatrix center(const SampleMatrix& data);

/// PCA of a centered cloud via SVD of the data matrix (eigenvalues are
/// squared singular values over n-1). Eigenvalues below 1e-12 * lambda_max
/// are clamped to zero. Throws DegenerateInput for n < 2.
Spectrum pca_spectrum(const SampleMatrix& centered);

/// Largest k with eigenvalue ratio lambda_1 / lambda_k < conditional_number.
/// k = 1 always qualifies. Throws DomainError unless conditional_number > 1.
int select_major_components(const Spectrum& spectrum, double conditional_number);

/// Rescales each of the k leading projection columns to unit sample standard
/// deviation, using sqrt(eigenvalue) as the column std. Columns whose std is
/// <= 1e-12 times the largest std raise DegenerateVariance.
SampleMatrix whiten_columns(const SampleMatrix& projections, const Eigen::VectorXd& eigenvalues, int k);

/// Normalizes every row to unit Euclidean norm. Rows with norm < 1e-30 raise
/// ZeroVector.
SampleMatrix project_to_sphere(const SampleMatrix& data);

/// Principal branch of the Lambert W function for x >= 0: returns w >= 0
/// with w * exp(w) = x. Halley iteration from ln(1+x), tolerance 1e-14.
double lambert_w0(double x);

/// Applies plane rotations to consecutive column pairs (0,1), (1,2), ...,
/// (D-2, D-1) in order; angles in radians, one per pair. The composition is
/// orthogonal, so row norms are preserved.
SampleMatrix givens_rotate_consecutive(const SampleMatrix& data, const std::vector<double>& angles);

}  // namespace idim
