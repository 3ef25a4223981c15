#pragma once

#include <string>
#include <vector>

#include "idim/types.hpp"

namespace idim {

struct FisherSConfig {
  double conditional_number = 10.0;
  std::vector<double> alpha_grid = default_alpha_grid();
  double selection_factor = 0.9;
  int min_samples = 10;
  bool dedupe = false;

  /// 0.60, 0.62, ..., 0.98 (20 points).
  static std::vector<double> default_alpha_grid();

  /// Throws DomainError on any invariant violation (grid in (0,1) strictly
  /// increasing, conditional_number > 1, selection_factor in (0,1]).
  void validate() const;

  std::string tag() const;
};

/// One separability-curve entry. Invalid entries (p_bar == 0, or Eq. 3
/// producing a non-finite or non-positive dimension) keep their p_bar but
/// carry valid = false.
struct SeparabilityEntry {
  double alpha = 0.0;
  double p_bar = 0.0;
  double n_alpha = 0.0;
  bool valid = false;
};

using SeparabilityCurve = std::vector<SeparabilityEntry>;

/// Result of one estimator run. FisherS fills the separability curve and
/// retained_k; the kNN estimators (see knn_estimators.hpp) fill per_point
/// diagnostics instead.
struct IdEstimate {
  double value = 0.0;
  double alpha_star = 0.0;    // NaN when not applicable
  SeparabilityCurve curve;
  int retained_k = 0;
  bool degenerate = false;
  Eigen::Index sample_count = 0;
  Eigen::Index duplicate_count = 0;  // duplicate input rows observed
  Eigen::Index excluded_count = 0;   // points dropped by kNN estimators
  std::vector<double> per_point;     // kNN per-point estimates
  std::string estimator;
};

struct PreprocessResult {
  SampleMatrix cloud;  // unit-sphere rows, retained_k columns
  int retained_k = 0;
  Eigen::Index duplicate_count = 0;
};

/// Full FisherS preprocessing: center -> PCA projection -> component
/// selection -> whitening -> unit-sphere projection.
PreprocessResult preprocess(const SampleMatrix& data, const FisherSConfig& cfg);

/// Mean empirical inseparability at threshold alpha over a unit-sphere
/// cloud: the fraction of ordered pairs (y, x), x != y, with <y, x> > alpha.
double mean_inseparability(const SampleMatrix& cloud, double alpha);

/// Ordered-pair inseparability counts for every alpha of a sorted grid in
/// one pass over the pair inner products.
std::vector<std::uint64_t> inseparability_counts(const SampleMatrix& cloud, const std::vector<double>& alphas);

/// Inseparability probability of the uniform equidistribution on the unit
/// sphere in n dimensions: (1 / (alpha sqrt(2 pi n))) (1 - alpha^2)^((n-1)/2).
double p_alpha_theoretical(double n, double alpha);

/// Inverts p_alpha_theoretical in n via the Lambert W function. Throws
/// InvalidInseparability for p_bar <= 0.
double n_alpha_from_p(double p_bar, double alpha);

/// Picks the valid entry whose alpha is closest to
/// selection_factor * max(valid alphas); ties go to the smaller alpha.
double select_alpha(const SeparabilityCurve& curve, double selection_factor);

/// End-to-end FisherS intrinsic-dimension estimate. A single retained
/// component short-circuits to value 1.0 with degenerate = true.
IdEstimate estimate_fishers(const SampleMatrix& data, const FisherSConfig& cfg = {});

}  // namespace idim
