#include "idim/imbalance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "idim/error.hpp"
#include "idim/rng.hpp"

namespace idim {

const char* to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::FisherS: return "fishers";
    case EstimatorKind::Mle: return "mle";
    case EstimatorKind::Tle: return "tle";
  }
  return "fishers";
}

EstimatorKind estimator_kind_from_string(const std::string& name) {
  if (name == "fishers") return EstimatorKind::FisherS;
  if (name == "mle") return EstimatorKind::Mle;
  if (name == "tle") return EstimatorKind::Tle;
  throw Error(ErrorKind::DomainError, "unknown estimator '" + name + "'");
}

std::string EstimatorSelector::tag() const {
  switch (kind) {
    case EstimatorKind::FisherS: return fishers.tag();
    case EstimatorKind::Mle: return knn.tag("mle");
    case EstimatorKind::Tle: return knn.tag("tle");
  }
  return fishers.tag();
}

IdEstimate EstimatorSelector::run(const SampleMatrix& data) const {
  switch (kind) {
    case EstimatorKind::FisherS: return estimate_fishers(data, fishers);
    case EstimatorKind::Mle: return estimate_mle(data, knn);
    case EstimatorKind::Tle: return estimate_tle(data, knn);
  }
  return estimate_fishers(data, fishers);
}

void ClassIdProfile::normalize() {
  double sum = 0.0;
  for (double v : raw) sum += v;
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw Error(ErrorKind::DomainError, "raw IDs do not admit normalization (sum not positive)");
  }
  normalized.resize(raw.size());
  for (std::size_t c = 0; c < raw.size(); ++c) normalized[c] = raw[c] / sum;
}

void ClassIdProfile::validate() const {
  if (raw.empty()) throw Error(ErrorKind::EmptyClass, "profile has no classes");
  if (normalized.size() != raw.size() || counts.size() != raw.size()) {
    throw Error(ErrorKind::ShapeMismatch, "profile field lengths disagree");
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < raw.size(); ++c) {
    const bool flagged = c < degenerate.size() && degenerate[c];
    if (!(raw[c] > 0.0) && !flagged) {
      throw Error(ErrorKind::DomainError, "class " + std::to_string(c) + " has non-positive raw ID");
    }
    sum += normalized[c];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw Error(ErrorKind::DomainError, "normalized IDs sum to " + std::to_string(sum));
  }
}

ClassIdProfile classwise_id(const LabeledDataset& dataset, const EstimatorSelector& selector) {
  dataset.validate();
  const int num_classes = dataset.num_classes();

  ClassIdProfile profile;
  profile.estimator_tag = selector.tag();
  profile.counts = dataset.class_counts();
  profile.raw.assign(static_cast<std::size_t>(num_classes), 0.0);
  profile.degenerate.assign(static_cast<std::size_t>(num_classes), false);

  std::vector<std::size_t> failed;
  for (int c = 0; c < num_classes; ++c) {
    const auto rows = dataset.class_indices(c);
    SampleMatrix class_data(static_cast<Eigen::Index>(rows.size()), dataset.data.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      class_data.row(static_cast<Eigen::Index>(i)) = dataset.data.row(rows[i]);
    }
    try {
      const IdEstimate estimate = selector.run(class_data);
      profile.raw[static_cast<std::size_t>(c)] = estimate.value;
      profile.degenerate[static_cast<std::size_t>(c)] = estimate.degenerate;
    } catch (const Error& err) {
      if (!selector.fallback_to_mean) {
        throw Error(ErrorKind::ClassTooSmall,
                    "class " + std::to_string(c) + " failed estimation (" + err.what() + ")");
      }
      failed.push_back(static_cast<std::size_t>(c));
    }
  }

  if (!failed.empty()) {
    double sum = 0.0;
    std::size_t ok = 0;
    for (std::size_t c = 0; c < profile.raw.size(); ++c) {
      if (std::find(failed.begin(), failed.end(), c) == failed.end()) {
        sum += profile.raw[c];
        ++ok;
      }
    }
    if (ok == 0) throw Error(ErrorKind::AllDegenerate, "every class failed estimation");
    const double mean = sum / static_cast<double>(ok);
    for (std::size_t c : failed) {
      profile.raw[c] = mean;
      profile.degenerate[c] = true;
    }
  }

  profile.normalize();
  return profile;
}

std::vector<double> instance_balanced_probs(const std::vector<std::int64_t>& counts) {
  if (counts.empty()) throw Error(ErrorKind::EmptyClass, "no classes");
  double total = 0.0;
  for (std::int64_t c : counts) {
    if (c < 1) throw Error(ErrorKind::EmptyClass, "class with non-positive count");
    total += static_cast<double>(c);
  }
  std::vector<double> probs(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) probs[i] = static_cast<double>(counts[i]) / total;
  return probs;
}

SamplingProbs id_sampling_probs(const ClassIdProfile& profile) {
  profile.validate();
  SamplingProbs out;
  out.class_probs = profile.normalized;
  out.per_sample_probs.resize(profile.num_classes());
  for (std::size_t c = 0; c < profile.num_classes(); ++c) {
    out.per_sample_probs[c] = out.class_probs[c] / static_cast<double>(profile.counts[c]);
  }
  return out;
}

std::vector<double> progressive_blend(const std::vector<double>& p_a, const std::vector<double>& p_b,
                                      double t, double total_epochs) {
  if (p_a.size() != p_b.size()) {
    throw Error(ErrorKind::ShapeMismatch, "probability vectors have different lengths");
  }
  if (!(total_epochs > 0.0) || t < 0.0 || t > total_epochs) {
    throw Error(ErrorKind::DomainError, "epoch must lie in [0, total]");
  }
  const double w = t / total_epochs;
  std::vector<double> out(p_a.size());
  for (std::size_t i = 0; i < p_a.size(); ++i) out[i] = (1.0 - w) * p_a[i] + w * p_b[i];
  return out;
}

std::vector<double> loss_weights(const ClassIdProfile& profile) {
  profile.validate();
  const double size = static_cast<double>(profile.num_classes());
  std::vector<double> weights(profile.num_classes());
  for (std::size_t c = 0; c < weights.size(); ++c) weights[c] = profile.normalized[c] * size;
  return weights;
}

std::vector<double> ldam_margins(const ClassIdProfile& profile) {
  profile.validate();
  const double max_id = *std::max_element(profile.normalized.begin(), profile.normalized.end());
  if (!(max_id > 0.0)) throw Error(ErrorKind::DomainError, "profile has no positive ID");
  std::vector<double> margins(profile.num_classes());
  for (std::size_t c = 0; c < margins.size(); ++c) margins[c] = 0.5 * (profile.normalized[c] / max_id);
  return margins;
}

std::vector<double> ldam_baseline_margins(const std::vector<std::int64_t>& counts, double scale_c) {
  if (counts.empty()) throw Error(ErrorKind::EmptyClass, "no classes");
  if (!(scale_c > 0.0)) throw Error(ErrorKind::DomainError, "margin scale must be positive");
  std::vector<double> margins(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < 1) throw Error(ErrorKind::EmptyClass, "class with non-positive count");
    margins[c] = scale_c / std::pow(static_cast<double>(counts[c]), 0.25);
  }
  return margins;
}

DroMargins dro_margins(const ClassIdProfile& profile, double scale_c) {
  profile.validate();
  if (!(scale_c > 0.0)) throw Error(ErrorKind::DomainError, "margin scale must be positive");
  DroMargins out;
  out.margins.resize(profile.num_classes());
  for (std::size_t c = 0; c < out.margins.size(); ++c) out.margins[c] = profile.normalized[c] * scale_c;
  out.epsilon_init = profile.normalized;
  return out;
}

std::vector<double> logit_adjust_deltas(const ClassIdProfile& profile) {
  profile.validate();
  std::vector<double> inv(profile.num_classes());
  double sum = 0.0;
  for (std::size_t c = 0; c < inv.size(); ++c) {
    if (!(profile.normalized[c] > 0.0)) {
      throw Error(ErrorKind::DegenerateClass, "class " + std::to_string(c) + " has zero ID");
    }
    inv[c] = 1.0 / profile.normalized[c];
    sum += inv[c];
  }
  for (double& v : inv) v /= sum;
  return inv;
}

ClassIdProfile apply_profile_permutation(const ClassIdProfile& profile, const std::vector<std::size_t>& perm) {
  if (perm.size() != profile.num_classes()) {
    throw Error(ErrorKind::ShapeMismatch, "permutation length does not match class count");
  }
  ClassIdProfile out = profile;
  for (std::size_t c = 0; c < perm.size(); ++c) {
    out.raw[c] = profile.raw[perm[c]];
    out.degenerate[c] = profile.degenerate[perm[c]];
  }
  out.normalize();
  return out;
}

ClassIdProfile transform_profile(const ClassIdProfile& profile, ProfileTransform mode, std::uint64_t seed) {
  profile.validate();
  const std::size_t size = profile.num_classes();
  if (mode == ProfileTransform::Shuffled) {
    return apply_profile_permutation(profile, seeded_permutation(size, seed));
  }

  // Reversed: class at ascending-ID rank r receives the value at rank
  // size-1-r. Stable (value, index) ordering makes ties deterministic.
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return profile.raw[a] < profile.raw[b]; });
  std::vector<std::size_t> perm(size);
  for (std::size_t rank = 0; rank < size; ++rank) {
    perm[order[rank]] = order[size - 1 - rank];
  }
  return apply_profile_permutation(profile, perm);
}

const char* to_string(MitigationKind kind) noexcept {
  switch (kind) {
    case MitigationKind::Sampling: return "sampling";
    case MitigationKind::LossWeights: return "loss_weights";
    case MitigationKind::LdamMargins: return "ldam_margins";
    case MitigationKind::DroMargins: return "dro_margins";
    case MitigationKind::LogitDeltas: return "logit_deltas";
  }
  return "sampling";
}

MitigationKind mitigation_kind_from_string(const std::string& name) {
  if (name == "sampling") return MitigationKind::Sampling;
  if (name == "loss_weights" || name == "loss") return MitigationKind::LossWeights;
  if (name == "ldam_margins" || name == "ldam") return MitigationKind::LdamMargins;
  if (name == "dro_margins" || name == "dro") return MitigationKind::DroMargins;
  if (name == "logit_deltas" || name == "logit") return MitigationKind::LogitDeltas;
  throw Error(ErrorKind::DomainError, "unknown mitigation kind '" + name + "'");
}

}  // namespace idim
