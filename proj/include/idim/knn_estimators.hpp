#pragma once

#include <string>

#include "idim/fishers.hpp"
#include "idim/types.hpp"

namespace idim {

enum class TleAggregation { Harmonic, Arithmetic };

struct KnnConfig {
  int k = 20;
  bool apply_correction = true;   // MLE only
  double tle_epsilon = 1e-4;      // TLE small-measurement guard, relative to r
  TleAggregation tle_aggregation = TleAggregation::Harmonic;

  void validate() const;
  std::string tag(const std::string& name) const;
};

/// Exact k-nearest-neighbor Euclidean distances, one ascending row per
/// point, self excluded. Brute force over all pairs. Throws TooFewSamples
/// when n <= k.
Eigen::MatrixXd knn_distances(const SampleMatrix& data, int k);

/// Levina-Bickel maximum-likelihood ID estimate over k-NN distance ratios.
/// With apply_correction the global value is the reciprocal of the mean of
/// the per-point inverse estimates; otherwise the mean of per-point
/// estimates. Points with any zero neighbor distance are excluded and
/// counted in IdEstimate::excluded_count.
IdEstimate estimate_mle(const SampleMatrix& data, const KnnConfig& cfg = {});

/// Tight-locality ID estimate. Per point, augments the k-NN distances with
/// pairwise measurements derived from every neighbor pair (see module docs
/// in the implementation for the pinned formulas) and applies the
/// log-ratio maximum-likelihood estimate to all of them; points aggregate
/// by the harmonic mean by default.
IdEstimate estimate_tle(const SampleMatrix& data, const KnnConfig& cfg = {});

}  // namespace idim
