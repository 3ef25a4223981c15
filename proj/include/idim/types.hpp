#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace idim {

/// Point cloud: one row per sample, one column per feature.
using SampleMatrix = Eigen::MatrixXd;

/// Throws Error(DegenerateInput) unless the matrix is non-empty and all
/// values are finite.
void validate_samples(const SampleMatrix& data);

/// Point cloud plus an integer class id per row. Class ids must cover
/// [0, num_classes) with at least one sample each.
struct LabeledDataset {
  SampleMatrix data;
  std::vector<int> labels;

  Eigen::Index size() const { return data.rows(); }
  int num_classes() const;

  /// Row indices of class c, in original row order.
  std::vector<Eigen::Index> class_indices(int c) const;

  /// Per-class sample counts, indexed by class id.
  std::vector<std::int64_t> class_counts() const;

  /// Throws on label/data length mismatch, negative labels, or empty classes.
  void validate() const;
};

/// PCA decomposition of a centered cloud. `components` columns form an
/// orthonormal basis; `projections` are the samples in that basis;
/// eigenvalues are the variances of the projection columns, non-increasing.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd components;   // D x r
  Eigen::MatrixXd projections;  // n x r
};

}  // namespace idim
