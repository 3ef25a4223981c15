// Alternative intrinsic-dimension estimators over exact k-nearest-neighbor
// distances.
//
// MLE (Levina & Bickel): per-point inverse estimate
//     m_k(x)^-1 = (1/(k-1)) * sum_{j=1}^{k-1} ln(T_k(x) / T_j(x)),
// where T_j is the distance to the j-th nearest neighbor. The corrected
// global value (MacKay & Ghahramani) is the reciprocal of the mean of the
// per-point inverse estimates; the uncorrected one averages the per-point
// estimates directly.
//
// TLE (Amsaleg et al., tight-locality estimation): for a query with
// neighborhood radius r (k-th neighbor distance), every ordered neighbor
// pair (i, j) contributes two pseudo-distance measurements
//     s_ij = r * (sqrt(q^2 + 4 v^2 (r^2 - u_i^2)) - q) / (2 (r^2 - u_i^2)),
//         q = u_i^2 + v^2 - u_j^2,
//     t_ij = same expression with v^2 replaced by z^2 = 2 u_i^2 + 2 u_j^2 - v^2,
// where u_i, u_j are the pair's distances to the query and v their mutual
// distance. Boundary overrides: u_i = 0 -> both measurements equal u_j;
// u_j = 0 -> both equal u_i; v = 0 -> both equal r (zero log contribution).
// The local estimate is the log-ratio MLE over all kept measurements,
//     id(x) = -M / sum(ln(measurement / r)),
// with measurements below tle_epsilon * r dropped. Points aggregate by the
// harmonic mean by default.

#include "idim/knn_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "idim/error.hpp"

namespace idim {

namespace {

double euclidean_distance(const SampleMatrix& data, Eigen::Index a, Eigen::Index b) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    const double diff = data(a, j) - data(b, j);
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

struct KnnResult {
  Eigen::MatrixXd distances;             // n x k, ascending per row
  std::vector<std::vector<Eigen::Index>> indices;  // neighbor ids per row
};

KnnResult knn_search(const SampleMatrix& data, int k) {
  validate_samples(data);
  const Eigen::Index n = data.rows();
  if (k < 1) throw Error(ErrorKind::DomainError, "k must be positive");
  if (n <= k) {
    throw Error(ErrorKind::TooFewSamples,
                "need more than k=" + std::to_string(k) + " samples, got " + std::to_string(n));
  }

  KnnResult result;
  result.distances.resize(n, k);
  result.indices.assign(static_cast<std::size_t>(n), {});

  std::vector<std::pair<double, Eigen::Index>> row(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      row[m++] = {euclidean_distance(data, i, j), j};
    }
    std::partial_sort(row.begin(), row.begin() + k, row.end());
    auto& ids = result.indices[static_cast<std::size_t>(i)];
    ids.resize(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) {
      result.distances(i, t) = row[static_cast<std::size_t>(t)].first;
      ids[static_cast<std::size_t>(t)] = row[static_cast<std::size_t>(t)].second;
    }
  }
  return result;
}

}  // namespace

void KnnConfig::validate() const {
  if (k < 2) throw Error(ErrorKind::DomainError, "k must be at least 2");
  if (!(tle_epsilon > 0.0)) throw Error(ErrorKind::DomainError, "tle_epsilon must be positive");
}

std::string KnnConfig::tag(const std::string& name) const {
  char buf[128];
  if (name == "mle") {
    std::snprintf(buf, sizeof(buf), "mle{k=%d,corrected=%d}", k, apply_correction ? 1 : 0);
  } else {
    std::snprintf(buf, sizeof(buf), "tle{k=%d,eps=%g,agg=%s}", k, tle_epsilon,
                  tle_aggregation == TleAggregation::Harmonic ? "harmonic" : "arithmetic");
  }
  return buf;
}

Eigen::MatrixXd knn_distances(const SampleMatrix& data, int k) {
  return knn_search(data, k).distances;
}

IdEstimate estimate_mle(const SampleMatrix& data, const KnnConfig& cfg) {
  cfg.validate();
  const auto knn = knn_search(data, cfg.k);
  const Eigen::Index n = data.rows();
  const int k = cfg.k;

  IdEstimate estimate;
  estimate.estimator = cfg.tag("mle");
  estimate.sample_count = n;
  estimate.retained_k = static_cast<int>(data.cols());  // no projection step
  estimate.alpha_star = std::numeric_limits<double>::quiet_NaN();

  double sum_inverse = 0.0;
  double sum_direct = 0.0;
  Eigen::Index used = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (knn.distances(i, 0) <= 0.0) {
      ++estimate.excluded_count;  // zero neighbor distance, log ratio undefined
      continue;
    }
    const double t_k = knn.distances(i, k - 1);
    double acc = 0.0;
    for (int j = 0; j < k - 1; ++j) acc += std::log(t_k / knn.distances(i, j));
    const double inverse = acc / static_cast<double>(k - 1);
    sum_inverse += inverse;
    const double point_estimate = inverse > 0.0 ? 1.0 / inverse : std::numeric_limits<double>::infinity();
    sum_direct += point_estimate;
    estimate.per_point.push_back(point_estimate);
    ++used;
  }
  if (used == 0) {
    throw Error(ErrorKind::AllDegenerate, "every point has a zero k-th neighbor distance");
  }
  estimate.value = cfg.apply_correction ? static_cast<double>(used) / sum_inverse
                                        : sum_direct / static_cast<double>(used);
  return estimate;
}

IdEstimate estimate_tle(const SampleMatrix& data, const KnnConfig& cfg) {
  cfg.validate();
  const auto knn = knn_search(data, cfg.k);
  const Eigen::Index n = data.rows();
  const int k = cfg.k;

  IdEstimate estimate;
  estimate.estimator = cfg.tag("tle");
  estimate.sample_count = n;
  estimate.retained_k = static_cast<int>(data.cols());  // no projection step
  estimate.alpha_star = std::numeric_limits<double>::quiet_NaN();

  Eigen::MatrixXd pairwise(k, k);
  for (Eigen::Index p = 0; p < n; ++p) {
    const double r = knn.distances(p, k - 1);
    if (r <= 0.0) {
      ++estimate.excluded_count;  // degenerate neighborhood
      continue;
    }
    const auto& ids = knn.indices[static_cast<std::size_t>(p)];
    for (int a = 0; a < k; ++a) {
      pairwise(a, a) = 0.0;
      for (int b = a + 1; b < k; ++b) {
        const double d = euclidean_distance(data, ids[static_cast<std::size_t>(a)],
                                            ids[static_cast<std::size_t>(b)]);
        pairwise(a, b) = d;
        pairwise(b, a) = d;
      }
    }

    const double floor = cfg.tle_epsilon * r;
    double log_sum = 0.0;
    std::int64_t kept = 0;
    auto add_measurement = [&](double value) {
      if (value < floor) return;  // vanishing measurement, drop
      log_sum += std::log(value / r);
      ++kept;
    };

    for (int i = 0; i < k; ++i) {
      const double u_i = knn.distances(p, i);
      const double delta = r * r - u_i * u_i;
      for (int j = 0; j < k; ++j) {
        if (j == i) continue;
        const double u_j = knn.distances(p, j);
        const double v = pairwise(i, j);
        if (u_i == 0.0) {
          add_measurement(u_j);
          add_measurement(u_j);
          continue;
        }
        if (u_j == 0.0) {
          add_measurement(u_i);
          add_measurement(u_i);
          continue;
        }
        if (v == 0.0) {
          add_measurement(r);
          add_measurement(r);
          continue;
        }
        const double v2 = v * v;
        const double q_s = u_i * u_i + v2 - u_j * u_j;
        const double s = 2.0 * r * v2 / (std::sqrt(q_s * q_s + 4.0 * v2 * delta) + q_s);
        add_measurement(s);
        const double z2 = std::max(2.0 * u_i * u_i + 2.0 * u_j * u_j - v2, 0.0);
        if (z2 == 0.0) {
          add_measurement(r);
        } else {
          const double q_t = u_i * u_i + z2 - u_j * u_j;
          const double t = 2.0 * r * z2 / (std::sqrt(q_t * q_t + 4.0 * z2 * delta) + q_t);
          add_measurement(t);
        }
      }
    }

    if (kept == 0 || log_sum >= 0.0) {
      ++estimate.excluded_count;  // no informative measurements
      continue;
    }
    estimate.per_point.push_back(-static_cast<double>(kept) / log_sum);
  }

  if (estimate.per_point.empty()) {
    throw Error(ErrorKind::AllDegenerate, "no point produced a usable tight-locality estimate");
  }
  const auto& values = estimate.per_point;
  if (cfg.tle_aggregation == TleAggregation::Harmonic) {
    double inv_sum = 0.0;
    for (double v : values) inv_sum += 1.0 / v;
    estimate.value = static_cast<double>(values.size()) / inv_sum;
  } else {
    estimate.value = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }
  return estimate;
}

}  // namespace idim
