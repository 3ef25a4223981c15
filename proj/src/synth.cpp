#include "idim/synth.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "idim/error.hpp"
#include "idim/numerics.hpp"
#include "idim/rng.hpp"

namespace idim::synth {

namespace {

// Derived-stream tags, so each randomized stage gets an independent
// deterministic sequence from the spec seed.
constexpr std::uint64_t kStreamCovariance = 1;
constexpr std::uint64_t kStreamRotation = 2;

}  // namespace

std::string covariance_label(const CovarianceKind& kind) {
  char buf[64];
  if (std::holds_alternative<Identity>(kind)) return "identity";
  if (const auto* s = std::get_if<Spherical>(&kind)) {
    std::snprintf(buf, sizeof(buf), "spherical(%g)", s->sigma);
    return buf;
  }
  if (const auto* d = std::get_if<DiagonalFixedTrace>(&kind)) {
    std::snprintf(buf, sizeof(buf), "diagonal_fixed_trace(%g)", d->total_var);
    return buf;
  }
  const auto& f = std::get<FullFixedDet>(kind);
  std::snprintf(buf, sizeof(buf), "full_fixed_det(%g)", f.gen_var);
  return buf;
}

void GaussianSpec::validate() const {
  if (intrinsic_d < 1) throw Error(ErrorKind::DomainError, "intrinsic dimension must be at least 1");
  if (extrinsic_D < intrinsic_d) {
    throw Error(ErrorKind::DomainError, "extrinsic dimension must be at least the intrinsic dimension");
  }
  if (n < 1) throw Error(ErrorKind::DomainError, "sample count must be positive");
  if (const auto* s = std::get_if<Spherical>(&covariance); s && !(s->sigma > 0.0)) {
    throw Error(ErrorKind::DomainError, "spherical variance must be positive");
  }
  if (const auto* d = std::get_if<DiagonalFixedTrace>(&covariance); d && !(d->total_var > 0.0)) {
    throw Error(ErrorKind::DomainError, "total variation must be positive");
  }
  if (const auto* f = std::get_if<FullFixedDet>(&covariance); f && !(f->gen_var > 0.0)) {
    throw Error(ErrorKind::DomainError, "generalized variance must be positive");
  }
}

void NoiseSpec::validate() const {
  if (sigma < 0.0) throw Error(ErrorKind::DomainError, "noise sigma must be non-negative");
  if (!(clip_lo < clip_hi)) throw Error(ErrorKind::DomainError, "clip_lo must be below clip_hi");
}

Eigen::MatrixXd make_covariance(const CovarianceKind& kind, int d, std::uint64_t seed) {
  if (d < 1) throw Error(ErrorKind::DomainError, "dimension must be positive");

  if (std::holds_alternative<Identity>(kind)) {
    return Eigen::MatrixXd::Identity(d, d);
  }
  if (const auto* s = std::get_if<Spherical>(&kind)) {
    if (!(s->sigma > 0.0)) throw Error(ErrorKind::DomainError, "spherical variance must be positive");
    return s->sigma * Eigen::MatrixXd::Identity(d, d);
  }
  if (const auto* diag = std::get_if<DiagonalFixedTrace>(&kind)) {
    if (!(diag->total_var > 0.0)) throw Error(ErrorKind::DomainError, "total variation must be positive");
    Rng rng(derive_seed(seed, kStreamCovariance));
    Eigen::VectorXd entries(d);
    double trace = 0.0;
    for (int i = 0; i < d; ++i) {
      entries(i) = rng.uniform(0.5, 1.5);  // bounded spread keeps the matrix well conditioned
      trace += entries(i);
    }
    entries *= diag->total_var / trace;
    return entries.asDiagonal();
  }

  const auto& full = std::get<FullFixedDet>(kind);
  if (!(full.gen_var > 0.0)) throw Error(ErrorKind::DomainError, "generalized variance must be positive");
  Rng rng(derive_seed(seed, kStreamCovariance));
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
  }
  Eigen::MatrixXd cov = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(d, d);
  const double det = cov.determinant();
  cov *= std::pow(full.gen_var / det, 1.0 / static_cast<double>(d));
  return cov;
}

SampleMatrix sample_gaussian(const GaussianSpec& spec) {
  spec.validate();
  const int d = spec.intrinsic_d;
  const Eigen::MatrixXd cov = make_covariance(spec.covariance, d, spec.seed);
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::DomainError, "covariance is not positive definite");
  }
  const Eigen::MatrixXd chol = llt.matrixL();

  Rng rng(spec.seed);
  SampleMatrix data = SampleMatrix::Zero(spec.n, spec.extrinsic_D);
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    for (int j = 0; j < d; ++j) z(j) = rng.normal();
    data.row(i).head(d) = (chol * z).transpose();
  }

  if (spec.rotate) {
    data = embed_and_rotate(data, derive_seed(spec.seed, kStreamRotation));
  }
  return data;
}

SampleMatrix embed_and_rotate(const SampleMatrix& data, std::uint64_t seed) {
  validate_samples(data);
  Rng rng(seed);
  std::vector<double> angles(static_cast<std::size_t>(data.cols() - 1));
  for (double& angle : angles) angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return givens_rotate_consecutive(data, angles);
}

SampleMatrix add_noise(const SampleMatrix& data, const NoiseSpec& spec) {
  validate_samples(data);
  spec.validate();
  Rng rng(spec.seed);
  SampleMatrix out(data.rows(), data.cols());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      const double noisy = spec.sigma > 0.0 ? data(i, j) + spec.sigma * rng.normal() : data(i, j);
      out(i, j) = std::clamp(noisy, spec.clip_lo, spec.clip_hi);
    }
  }
  return out;
}

std::vector<std::int64_t> longtail_counts(const LongTailSpec& spec) {
  if (spec.num_classes < 2) throw Error(ErrorKind::DomainError, "need at least 2 classes");
  if (spec.n_max < 1) throw Error(ErrorKind::DomainError, "head count must be positive");
  if (!(spec.rho >= 1.0)) throw Error(ErrorKind::DomainError, "imbalance ratio must be at least 1");

  std::vector<std::int64_t> counts(static_cast<std::size_t>(spec.num_classes));
  const double denominator = static_cast<double>(spec.num_classes - 1);
  for (int c = 0; c < spec.num_classes; ++c) {
    const double exact = static_cast<double>(spec.n_max) * std::pow(spec.rho, -static_cast<double>(c) / denominator);
    counts[static_cast<std::size_t>(c)] = static_cast<std::int64_t>(std::floor(exact));
  }
  counts[0] = spec.n_max;
  if (counts.back() < 1) {
    throw Error(ErrorKind::DomainError, "tail class count rounds to zero (n_max/rho < 1)");
  }
  return counts;
}

LabeledDataset subsample_longtail(const LabeledDataset& dataset, const std::vector<std::int64_t>& counts,
                                  std::uint64_t seed) {
  dataset.validate();
  const int num_classes = dataset.num_classes();
  if (static_cast<int>(counts.size()) != num_classes) {
    throw Error(ErrorKind::ShapeMismatch, "count vector does not match class count");
  }

  Rng rng(seed);
  std::vector<Eigen::Index> selected;
  for (int c = 0; c < num_classes; ++c) {
    auto rows = dataset.class_indices(c);
    const auto want = counts[static_cast<std::size_t>(c)];
    if (want > static_cast<std::int64_t>(rows.size())) {
      throw Error(ErrorKind::InsufficientSamples,
                  "class " + std::to_string(c) + " has " + std::to_string(rows.size()) +
                      " samples, requested " + std::to_string(want));
    }
    // Partial Fisher-Yates: the first `want` slots become the sample.
    for (std::int64_t i = 0; i < want; ++i) {
      const auto j = static_cast<std::size_t>(i) +
                     static_cast<std::size_t>(rng.below(rows.size() - static_cast<std::size_t>(i)));
      std::swap(rows[static_cast<std::size_t>(i)], rows[j]);
    }
    rows.resize(static_cast<std::size_t>(want));
    std::sort(rows.begin(), rows.end());
    selected.insert(selected.end(), rows.begin(), rows.end());
  }

  LabeledDataset out;
  out.data.resize(static_cast<Eigen::Index>(selected.size()), dataset.data.cols());
  out.labels.resize(selected.size());
  for (std::size_t i = 0; i < selected.size(); ++i) {
    out.data.row(static_cast<Eigen::Index>(i)) = dataset.data.row(selected[i]);
    out.labels[i] = dataset.labels[static_cast<std::size_t>(selected[i])];
  }
  return out;
}

}  // namespace idim::synth
