#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "idim/fishers.hpp"
#include "idim/knn_estimators.hpp"
#include "idim/types.hpp"

namespace idim {

enum class EstimatorKind { FisherS, Mle, Tle };

const char* to_string(EstimatorKind kind) noexcept;
EstimatorKind estimator_kind_from_string(const std::string& name);

/// Which estimator classwise_id runs per class, plus its configuration.
struct EstimatorSelector {
  EstimatorKind kind = EstimatorKind::FisherS;
  FisherSConfig fishers;
  KnnConfig knn;

  /// Mean-imputes classes whose estimation fails instead of erroring.
  bool fallback_to_mean = false;

  std::string tag() const;
  IdEstimate run(const SampleMatrix& data) const;
};

/// Per-class intrinsic dimensions, raw and normalized to sum 1.
struct ClassIdProfile {
  std::vector<double> raw;
  std::vector<double> normalized;
  std::vector<std::int64_t> counts;
  std::vector<bool> degenerate;  // estimator degenerate flag or imputed value
  std::string estimator_tag;

  std::size_t num_classes() const { return raw.size(); }

  /// Recomputes `normalized` from `raw`. Throws DomainError when the raw
  /// values do not admit normalization (non-positive sum).
  void normalize();

  void validate() const;
};

enum class MitigationKind { Sampling, LossWeights, LdamMargins, DroMargins, LogitDeltas };

const char* to_string(MitigationKind kind) noexcept;
MitigationKind mitigation_kind_from_string(const std::string& name);

/// One derived per-class artifact with the scalar parameters that produced
/// it. `provenance` records the profile's estimator tag; `timestamp` is left
/// empty by default so identical inputs serialize identically.
struct MitigationReport {
  MitigationKind kind = MitigationKind::Sampling;
  std::vector<double> values;
  std::vector<std::pair<std::string, double>> params;
  std::string provenance;
  std::string timestamp;
};

/// Runs the selected estimator on each class of the dataset and normalizes
/// the raw IDs. Classes smaller than the estimator's minimum raise
/// ClassTooSmall unless the selector enables mean-imputation fallback.
ClassIdProfile classwise_id(const LabeledDataset& dataset, const EstimatorSelector& selector);

/// Baseline instance-balanced class probabilities N_c / sum(N).
std::vector<double> instance_balanced_probs(const std::vector<std::int64_t>& counts);

struct SamplingProbs {
  std::vector<double> class_probs;       // p_c
  std::vector<double> per_sample_probs;  // p_x = p_c / N_c for class-c samples
};

/// ID-based two-stage sampling: class drawn with probability d_hat_c, then
/// uniform within the class.
SamplingProbs id_sampling_probs(const ClassIdProfile& profile);

/// Linear schedule between two class-probability vectors at epoch t of T.
std::vector<double> progressive_blend(const std::vector<double>& p_a, const std::vector<double>& p_b,
                                      double t, double total_epochs);

/// Loss weights d_hat_c * |C| (mean 1 across classes).
std::vector<double> loss_weights(const ClassIdProfile& profile);

/// Additive logit margins 0.5 * d_hat_c / max(d_hat).
std::vector<double> ldam_margins(const ClassIdProfile& profile);

/// Cardinality baseline the ID margins replace: scale_c / N_c^(1/4),
/// provided for comparison studies.
std::vector<double> ldam_baseline_margins(const std::vector<std::int64_t>& counts, double scale_c);

struct DroMargins {
  std::vector<double> margins;       // d_hat_c * scale
  std::vector<double> epsilon_init;  // d_hat verbatim, for the learnable variant
};

/// Feature-space margins d_hat_c * scale_c. Throws DomainError on
/// non-positive scale.
DroMargins dro_margins(const ClassIdProfile& profile, double scale_c);

/// Post-hoc logit adjustment deltas proportional to 1 / d_hat_c.
std::vector<double> logit_adjust_deltas(const ClassIdProfile& profile);

enum class ProfileTransform { Reversed, Shuffled };

/// Failure-case transforms: `Reversed` re-assigns the raw IDs in reverse
/// rank order (largest ID to the class that had the smallest); `Shuffled`
/// permutes them with a seeded permutation. Normalization is re-applied.
ClassIdProfile transform_profile(const ClassIdProfile& profile, ProfileTransform mode, std::uint64_t seed = 0);

/// Shuffle body: re-assigns raw[c] = raw[perm[c]] and renormalizes.
ClassIdProfile apply_profile_permutation(const ClassIdProfile& profile, const std::vector<std::size_t>& perm);

}  // namespace idim
