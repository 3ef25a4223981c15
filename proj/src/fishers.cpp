#include "idim/fishers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numbers>
#include <unordered_set>

#include "idim/error.hpp"
#include "idim/numerics.hpp"

namespace idim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::uint64_t value_bits(const SampleMatrix& m, Eigen::Index i, Eigen::Index j) {
  const double v = m(i, j);
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  return bits;
}

// Bit-exact duplicate detection over raw rows (hash and equality both work
// on the bit patterns, so they agree on signed zeros).
Eigen::Index count_duplicate_rows(const SampleMatrix& data, std::vector<Eigen::Index>* unique_rows) {
  struct RowHash {
    const SampleMatrix* m;
    std::size_t operator()(Eigen::Index i) const {
      std::size_t h = 1469598103934665603ULL;
      for (Eigen::Index j = 0; j < m->cols(); ++j) h = (h ^ value_bits(*m, i, j)) * 1099511628211ULL;
      return h;
    }
  };
  struct RowEq {
    const SampleMatrix* m;
    bool operator()(Eigen::Index a, Eigen::Index b) const {
      for (Eigen::Index j = 0; j < m->cols(); ++j) {
        if (value_bits(*m, a, j) != value_bits(*m, b, j)) return false;
      }
      return true;
    }
  };
  std::unordered_set<Eigen::Index, RowHash, RowEq> seen(16, RowHash{&data}, RowEq{&data});
  Eigen::Index duplicates = 0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    if (seen.insert(i).second) {
      if (unique_rows) unique_rows->push_back(i);
    } else {
      ++duplicates;
    }
  }
  return duplicates;
}

struct Pipeline {
  SampleMatrix whitened;  // n x k, before sphere projection
  int retained_k = 0;
  Eigen::Index duplicate_count = 0;
  Eigen::Index rows_used = 0;
};

Pipeline run_pipeline(const SampleMatrix& data, const FisherSConfig& cfg) {
  cfg.validate();
  validate_samples(data);
  if (data.rows() < cfg.min_samples) {
    throw Error(ErrorKind::TooFewSamples, "need at least " + std::to_string(cfg.min_samples) +
                                              " samples, got " + std::to_string(data.rows()));
  }

  Pipeline result;
  std::vector<Eigen::Index> unique_rows;
  result.duplicate_count = count_duplicate_rows(data, &unique_rows);

  SampleMatrix working;
  if (cfg.dedupe && result.duplicate_count > 0) {
    working.resize(static_cast<Eigen::Index>(unique_rows.size()), data.cols());
    for (Eigen::Index i = 0; i < working.rows(); ++i) {
      working.row(i) = data.row(unique_rows[static_cast<std::size_t>(i)]);
    }
    if (working.rows() < cfg.min_samples) {
      throw Error(ErrorKind::TooFewSamples, "only " + std::to_string(working.rows()) +
                                                " distinct samples after deduplication");
    }
  } else {
    working = data;
  }
  result.rows_used = working.rows();

  const SampleMatrix centered = center(working);
  const Spectrum spectrum = pca_spectrum(centered);
  result.retained_k = select_major_components(spectrum, cfg.conditional_number);
  if (result.retained_k > 1) {
    result.whitened = whiten_columns(spectrum.projections, spectrum.eigenvalues, result.retained_k);
  }
  return result;
}

}  // namespace

std::vector<double> FisherSConfig::default_alpha_grid() {
  std::vector<double> grid(20);
  for (int i = 0; i < 20; ++i) grid[static_cast<std::size_t>(i)] = 0.60 + 0.02 * i;
  return grid;
}

void FisherSConfig::validate() const {
  if (!(conditional_number > 1.0)) {
    throw Error(ErrorKind::DomainError, "conditional_number must exceed 1");
  }
  if (alpha_grid.empty()) throw Error(ErrorKind::DomainError, "alpha grid is empty");
  double prev = 0.0;
  for (double a : alpha_grid) {
    if (!(a > 0.0 && a < 1.0)) throw Error(ErrorKind::DomainError, "alpha values must lie in (0,1)");
    if (!(a > prev)) throw Error(ErrorKind::DomainError, "alpha grid must be strictly increasing");
    prev = a;
  }
  if (!(selection_factor > 0.0 && selection_factor <= 1.0)) {
    throw Error(ErrorKind::DomainError, "selection_factor must lie in (0,1]");
  }
  if (min_samples < 2) throw Error(ErrorKind::DomainError, "min_samples must be at least 2");
}

std::string FisherSConfig::tag() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "fishers{C=%g,alpha=%g:%g/%zu,factor=%g,min=%d,dedupe=%d}",
                conditional_number, alpha_grid.front(), alpha_grid.back(), alpha_grid.size(),
                selection_factor, min_samples, dedupe ? 1 : 0);
  return buf;
}

PreprocessResult preprocess(const SampleMatrix& data, const FisherSConfig& cfg) {
  Pipeline pipe = run_pipeline(data, cfg);
  PreprocessResult result;
  result.retained_k = pipe.retained_k;
  result.duplicate_count = pipe.duplicate_count;
  if (pipe.retained_k == 1) {
    // Re-run the single retained column through whitening so the public
    // pipeline keeps its contract even for rank-1 clouds.
    const SampleMatrix centered = center(data);
    const Spectrum spectrum = pca_spectrum(centered);
    pipe.whitened = whiten_columns(spectrum.projections, spectrum.eigenvalues, 1);
  }
  result.cloud = project_to_sphere(pipe.whitened);
  return result;
}

std::vector<std::uint64_t> inseparability_counts(const SampleMatrix& cloud, const std::vector<double>& alphas) {
  const Eigen::Index n = cloud.rows();
  if (n < 2) throw Error(ErrorKind::TooFewSamples, "inseparability needs at least 2 samples");
  const std::size_t m = alphas.size();

  // bucket[t] = number of ordered pairs whose inner product exceeds exactly
  // t grid thresholds; suffix sums turn these into per-alpha counts.
  std::vector<std::uint64_t> bucket(m + 1, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dot = cloud.row(i).dot(cloud.row(j));
      const std::size_t idx = static_cast<std::size_t>(
          std::lower_bound(alphas.begin(), alphas.end(), dot) - alphas.begin());
      bucket[idx] += 2;  // (i,j) and (j,i)
    }
  }
  std::vector<std::uint64_t> counts(m, 0);
  std::uint64_t running = 0;
  for (std::size_t t = m; t-- > 0;) {
    running += bucket[t + 1];
    counts[t] = running;
  }
  return counts;
}

double mean_inseparability(const SampleMatrix& cloud, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::DomainError, "alpha must lie in (0,1)");
  }
  const Eigen::Index n = cloud.rows();
  const auto counts = inseparability_counts(cloud, {alpha});
  return static_cast<double>(counts[0]) / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double p_alpha_theoretical(double n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::DomainError, "alpha must lie in (0,1)");
  }
  if (!(n >= 1.0)) {
    throw Error(ErrorKind::DomainError, "dimension must be at least 1");
  }
  const double one_minus_a2 = 1.0 - alpha * alpha;
  return std::exp(0.5 * (n - 1.0) * std::log(one_minus_a2)) / (alpha * std::sqrt(2.0 * std::numbers::pi * n));
}

double n_alpha_from_p(double p_bar, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::DomainError, "alpha must lie in (0,1)");
  }
  if (!(p_bar > 0.0)) {
    throw Error(ErrorKind::InvalidInseparability, "p_bar must be positive to invert");
  }
  const double one_minus_a2 = 1.0 - alpha * alpha;
  const double neg_log = -std::log(one_minus_a2);  // > 0 on (0,1)
  const double arg = neg_log / (2.0 * std::numbers::pi * p_bar * p_bar * alpha * alpha * one_minus_a2);
  return lambert_w0(arg) / neg_log;
}

double select_alpha(const SeparabilityCurve& curve, double selection_factor) {
  double max_valid = -1.0;
  for (const auto& entry : curve) {
    if (entry.valid) max_valid = std::max(max_valid, entry.alpha);
  }
  if (max_valid < 0.0) {
    throw Error(ErrorKind::NoValidAlpha, "every separability entry is invalid");
  }
  const double target = selection_factor * max_valid;
  double best_alpha = kNan;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& entry : curve) {
    if (!entry.valid) continue;
    const double dist = std::abs(entry.alpha - target);
    if (dist < best_dist) {  // strict: ties keep the smaller alpha
      best_dist = dist;
      best_alpha = entry.alpha;
    }
  }
  return best_alpha;
}

IdEstimate estimate_fishers(const SampleMatrix& data, const FisherSConfig& cfg) {
  Pipeline pipe = run_pipeline(data, cfg);

  IdEstimate estimate;
  estimate.estimator = cfg.tag();
  estimate.retained_k = pipe.retained_k;
  estimate.sample_count = pipe.rows_used;
  estimate.duplicate_count = pipe.duplicate_count;

  if (pipe.retained_k == 1) {
    // One-dimensional cloud: ID is 1 by construction.
    estimate.value = 1.0;
    estimate.alpha_star = kNan;
    estimate.degenerate = true;
    return estimate;
  }

  const SampleMatrix cloud = project_to_sphere(pipe.whitened);
  const Eigen::Index n = cloud.rows();
  const auto counts = inseparability_counts(cloud, cfg.alpha_grid);
  const double pair_total = static_cast<double>(n) * static_cast<double>(n - 1);

  estimate.curve.reserve(cfg.alpha_grid.size());
  for (std::size_t t = 0; t < cfg.alpha_grid.size(); ++t) {
    SeparabilityEntry entry;
    entry.alpha = cfg.alpha_grid[t];
    entry.p_bar = static_cast<double>(counts[t]) / pair_total;
    if (entry.p_bar > 0.0) {
      entry.n_alpha = n_alpha_from_p(entry.p_bar, entry.alpha);
      entry.valid = std::isfinite(entry.n_alpha) && entry.n_alpha > 0.0;
    } else {
      entry.n_alpha = kNan;
      entry.valid = false;
    }
    estimate.curve.push_back(entry);
  }

  estimate.alpha_star = select_alpha(estimate.curve, cfg.selection_factor);
  for (const auto& entry : estimate.curve) {
    if (entry.valid && entry.alpha == estimate.alpha_star) {
      estimate.value = entry.n_alpha;
      break;
    }
  }
  return estimate;
}

}  // namespace idim
