#include "idim/numerics.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "idim/error.hpp"

namespace idim {

SampleMatrix center(const SampleMatrix& data) {
  validate_samples(data);
  return data.rowwise() - data.colwise().mean();
}

Spectrum pca_spectrum(const SampleMatrix& centered) {
  validate_samples(centered);
  const Eigen::Index n = centered.rows();
  if (n < 2) {
    throw Error(ErrorKind::DegenerateInput, "PCA needs at least 2 samples, got " + std::to_string(n));
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& singular = svd.singularValues();

  Spectrum spectrum;
  spectrum.eigenvalues = singular.array().square() / static_cast<double>(n - 1);
  // Clamp round-off eigenvalues so downstream ratios see exact zeros.
  const double floor = 1e-12 * (spectrum.eigenvalues.size() > 0 ? spectrum.eigenvalues(0) : 0.0);
  for (Eigen::Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
    if (spectrum.eigenvalues(i) < floor) spectrum.eigenvalues(i) = 0.0;
  }
  spectrum.components = svd.matrixV();
  spectrum.projections = centered * svd.matrixV();
  return spectrum;
}

int select_major_components(const Spectrum& spectrum, double conditional_number) {
  if (!(conditional_number > 1.0)) {
    throw Error(ErrorKind::DomainError, "conditional number must exceed 1");
  }
  const Eigen::VectorXd& ev = spectrum.eigenvalues;
  if (ev.size() == 0) return 1;
  const double lambda_max = ev(0);
  if (lambda_max <= 0.0) return 1;
  int k = 1;
  for (Eigen::Index i = 1; i < ev.size(); ++i) {
    if (ev(i) > 0.0 && lambda_max / ev(i) < conditional_number) {
      k = static_cast<int>(i) + 1;
    } else {
      break;  // ratios are non-decreasing for sorted eigenvalues
    }
  }
  return k;
}

SampleMatrix whiten_columns(const SampleMatrix& projections, const Eigen::VectorXd& eigenvalues, int k) {
  if (k < 1 || k > projections.cols() || k > eigenvalues.size()) {
    throw Error(ErrorKind::ShapeMismatch, "whitening requested " + std::to_string(k) + " columns of " +
                                              std::to_string(projections.cols()));
  }
  Eigen::VectorXd stds(k);
  double max_std = 0.0;
  for (int j = 0; j < k; ++j) {
    stds(j) = std::sqrt(std::max(eigenvalues(j), 0.0));
    max_std = std::max(max_std, stds(j));
  }
  const double eps_var = 1e-12 * max_std;
  SampleMatrix out(projections.rows(), k);
  for (int j = 0; j < k; ++j) {
    if (stds(j) <= eps_var) {
      throw Error(ErrorKind::DegenerateVariance,
                  "column " + std::to_string(j) + " has numerically zero variance");
    }
    out.col(j) = projections.col(j) / stds(j);
  }
  return out;
}

SampleMatrix project_to_sphere(const SampleMatrix& data) {
  SampleMatrix out(data.rows(), data.cols());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double norm = data.row(i).norm();
    if (norm < 1e-30) {
      throw Error(ErrorKind::ZeroVector, "row " + std::to_string(i) + " has zero norm");
    }
    out.row(i) = data.row(i) / norm;
  }
  return out;
}

double lambert_w0(double x) {
  if (x < 0.0) {
    throw Error(ErrorKind::DomainError, "lambert_w0 requires x >= 0, got " + std::to_string(x));
  }
  if (x == 0.0) return 0.0;

  // Halley iteration on f(w) = w e^w - x. The ln(1+x) start overshoots at
  // most mildly and stays in the basin for the whole non-negative axis;
  // clamp so e^w cannot overflow for extreme arguments.
  double w = std::log1p(x);
  if (w > 700.0) w = 700.0;
  for (int iter = 0; iter < 100; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(w))) break;
  }
  return w;
}

SampleMatrix givens_rotate_consecutive(const SampleMatrix& data, const std::vector<double>& angles) {
  const Eigen::Index dim = data.cols();
  if (static_cast<Eigen::Index>(angles.size()) != dim - 1) {
    throw Error(ErrorKind::ShapeMismatch, "expected " + std::to_string(dim - 1) + " angles, got " +
                                              std::to_string(angles.size()));
  }
  SampleMatrix out = data;
  for (Eigen::Index j = 0; j + 1 < dim; ++j) {
    const double c = std::cos(angles[static_cast<std::size_t>(j)]);
    const double s = std::sin(angles[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const double a = out(i, j);
      const double b = out(i, j + 1);
      out(i, j) = a * c - b * s;
      out(i, j + 1) = a * s + b * c;
    }
  }
  return out;
}

}  // namespace idim
