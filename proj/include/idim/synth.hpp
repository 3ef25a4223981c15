#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "idim/types.hpp"

namespace idim::synth {

struct Identity {};
struct Spherical {
  double sigma = 1.0;  // diagonal variance
};
struct DiagonalFixedTrace {
  double total_var = 1.0;
};
struct FullFixedDet {
  double gen_var = 1.0;
};

/// Covariance family for the Gaussian generator. Diagonal entries are drawn
/// uniform in [0.5, 1.5) before trace rescaling; full matrices are
/// A A^T + 0.1 I (A standard normal) rescaled to the requested determinant.
using CovarianceKind = std::variant<Identity, Spherical, DiagonalFixedTrace, FullFixedDet>;

std::string covariance_label(const CovarianceKind& kind);

struct GaussianSpec {
  int intrinsic_d = 1;
  int extrinsic_D = 1;
  Eigen::Index n = 1;
  CovarianceKind covariance = Identity{};
  bool rotate = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct NoiseSpec {
  double sigma = 0.0;
  double clip_lo = 0.0;
  double clip_hi = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LongTailSpec {
  int num_classes = 2;
  std::int64_t n_max = 1;
  double rho = 1.0;  // imbalance ratio, head count over tail count
  std::uint64_t seed = 0;
};

/// d x d covariance matrix for a kind. Deterministic per seed.
Eigen::MatrixXd make_covariance(const CovarianceKind& kind, int d, std::uint64_t seed);

/// n x D Gaussian cloud: the first intrinsic_d coordinates follow the
/// covariance kind, the remaining D - d coordinates are exactly zero, and
/// an optional seeded rotation mixes them (seed derived from spec.seed).
SampleMatrix sample_gaussian(const GaussianSpec& spec);

/// Seeded consecutive-pair rotation of the columns; leaves no constant
/// column behind for non-degenerate input.
SampleMatrix embed_and_rotate(const SampleMatrix& data, std::uint64_t seed);

/// Elementwise clip(data + N(0, sigma^2), lo, hi).
SampleMatrix add_noise(const SampleMatrix& data, const NoiseSpec& spec);

/// Exponential long-tail profile: N_c = floor(n_max * rho^(-c / (|C|-1))).
/// Throws DomainError if the tail class would round to zero.
std::vector<std::int64_t> longtail_counts(const LongTailSpec& spec);

/// Seeded per-class subsampling without replacement to the given counts.
LabeledDataset subsample_longtail(const LabeledDataset& dataset, const std::vector<std::int64_t>& counts,
                                  std::uint64_t seed);

}  // namespace idim::synth
