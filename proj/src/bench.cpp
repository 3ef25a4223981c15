#include "idim/bench.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

#include "idim/error.hpp"
#include "idim/rng.hpp"
#include "idim/synth.hpp"

namespace idim::bench {

namespace {

constexpr double kUnknownId = std::numeric_limits<double>::quiet_NaN();

Row make_row(double param, double true_id, double estimate, const EstimatorSelector& selector,
             std::uint64_t seed, Eigen::Index n, Eigen::Index dim) {
  Row row;
  row.sweep_param = param;
  row.true_id = true_id;
  row.estimate = estimate;
  row.estimator = to_string(selector.kind);
  row.seed = seed;
  row.n = n;
  row.dim = dim;
  return row;
}

SampleMatrix rotated_embedding(const synth::GaussianSpec& base, int passes, std::uint64_t seed) {
  synth::GaussianSpec spec = base;
  spec.seed = seed;
  spec.rotate = false;
  SampleMatrix data = synth::sample_gaussian(spec);
  for (int pass = 0; pass < passes; ++pass) {
    data = synth::embed_and_rotate(data, derive_seed(seed, 0x100 + static_cast<std::uint64_t>(pass)));
  }
  return data;
}

}  // namespace

std::vector<Row> sweep_sample_count(const SweepOptions& opts) {
  std::vector<Row> rows;
  for (int d : {2, 5, 10, 20}) {
    for (Eigen::Index n : {500, 1000, 5000}) {
      for (int rep = 0; rep < opts.repeats; ++rep) {
        const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(rep);
        synth::GaussianSpec spec{d, d, n, synth::Identity{}, false, seed};
        const double estimate = opts.estimator.run(synth::sample_gaussian(spec)).value;
        rows.push_back(make_row(static_cast<double>(n), d, estimate, opts.estimator, seed, n, d));
      }
    }
  }
  return rows;
}

std::vector<Row> sweep_extrinsic(const SweepOptions& opts) {
  constexpr int kIntrinsic = 5;
  constexpr Eigen::Index kSamples = 3000;
  std::vector<Row> rows;
  for (int extrinsic : {10, 50, 200}) {
    for (int rep = 0; rep < opts.repeats; ++rep) {
      const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(rep);
      synth::GaussianSpec spec{kIntrinsic, extrinsic, kSamples, synth::Identity{}, false, seed};
      const SampleMatrix data = rotated_embedding(spec, opts.rotation_passes, seed);
      const double estimate = opts.estimator.run(data).value;
      rows.push_back(make_row(extrinsic, kIntrinsic, estimate, opts.estimator, seed, kSamples, extrinsic));
    }
  }
  return rows;
}

std::vector<Row> sweep_cond_number(const SweepOptions& opts) {
  constexpr int kIntrinsic = 10;
  constexpr Eigen::Index kSamples = 3000;
  std::vector<Row> rows;
  for (int rep = 0; rep < opts.repeats; ++rep) {
    const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(rep);
    synth::GaussianSpec spec{kIntrinsic, kIntrinsic, kSamples, synth::Identity{}, false, seed};
    const SampleMatrix data = synth::sample_gaussian(spec);
    for (int cond = 4; cond <= 16; cond += 2) {
      EstimatorSelector selector = opts.estimator;
      selector.kind = EstimatorKind::FisherS;  // the sweep parameter is FisherS-specific
      selector.fishers.conditional_number = cond;
      const double estimate = selector.run(data).value;
      rows.push_back(make_row(cond, kIntrinsic, estimate, selector, seed, kSamples, kIntrinsic));
    }
  }
  return rows;
}

namespace {

std::vector<Row> covariance_sweep(const SweepOptions& opts, const std::vector<double>& params,
                                  const std::function<synth::CovarianceKind(double)>& kind_of) {
  constexpr int kIntrinsic = 10;
  constexpr Eigen::Index kSamples = 3000;
  std::vector<Row> rows;
  for (double param : params) {
    for (int rep = 0; rep < opts.repeats; ++rep) {
      const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(rep);
      synth::GaussianSpec spec{kIntrinsic, kIntrinsic, kSamples, kind_of(param), false, seed};
      const double estimate = opts.estimator.run(synth::sample_gaussian(spec)).value;
      rows.push_back(make_row(param, kIntrinsic, estimate, opts.estimator, seed, kSamples, kIntrinsic));
    }
  }
  return rows;
}

}  // namespace

std::vector<Row> sweep_covariance_spherical(const SweepOptions& opts) {
  return covariance_sweep(opts, {0.25, 1.0, 4.0},
                          [](double sigma) { return synth::CovarianceKind(synth::Spherical{sigma}); });
}

std::vector<Row> sweep_covariance_diagonal(const SweepOptions& opts) {
  return covariance_sweep(opts, {2.5, 5.0, 10.0, 20.0, 40.0}, [](double total) {
    return synth::CovarianceKind(synth::DiagonalFixedTrace{total});
  });
}

std::vector<Row> sweep_covariance_full(const SweepOptions& opts) {
  return covariance_sweep(opts, {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0},
                          [](double gen) { return synth::CovarianceKind(synth::FullFixedDet{gen}); });
}

std::vector<Row> sweep_low_sample(const SweepOptions& opts) {
  constexpr int kIntrinsic = 8;
  constexpr int kExtrinsic = 20;
  constexpr Eigen::Index kPool = 2000;
  constexpr int kSeedsPerPoint = 10;

  synth::GaussianSpec pool_spec{kIntrinsic, kExtrinsic, kPool, synth::Identity{}, true,
                                derive_seed(opts.seed, 0x10F)};
  const SampleMatrix pool = synth::sample_gaussian(pool_spec);

  std::vector<Row> rows;
  for (Eigen::Index subset : {25, 500}) {
    for (int rep = 0; rep < kSeedsPerPoint; ++rep) {
      const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(rep);
      Rng rng(derive_seed(seed, 0x200 + static_cast<std::uint64_t>(subset)));
      std::vector<Eigen::Index> picks(static_cast<std::size_t>(pool.rows()));
      for (std::size_t i = 0; i < picks.size(); ++i) picks[i] = static_cast<Eigen::Index>(i);
      for (Eigen::Index i = 0; i < subset; ++i) {
        const auto j = static_cast<std::size_t>(i) +
                       static_cast<std::size_t>(rng.below(picks.size() - static_cast<std::size_t>(i)));
        std::swap(picks[static_cast<std::size_t>(i)], picks[j]);
      }
      SampleMatrix data(subset, pool.cols());
      for (Eigen::Index i = 0; i < subset; ++i) data.row(i) = pool.row(picks[static_cast<std::size_t>(i)]);
      const double estimate = opts.estimator.run(data).value;
      rows.push_back(make_row(static_cast<double>(subset), kIntrinsic, estimate, opts.estimator, seed,
                              subset, kExtrinsic));
    }
  }
  return rows;
}

std::vector<Row> sweep_noise(const SweepOptions& opts, const SampleMatrix* input) {
  SampleMatrix base;
  double true_id = kUnknownId;
  double clip_lo = 0.0;
  double clip_hi = 1.0;
  if (input != nullptr) {
    base = *input;
  } else {
    // High signal variance keeps the noise floor well under the component
    // cutoff, mirroring the pixel-space regime of the original protocol.
    synth::GaussianSpec spec{10, 50, 3000, synth::Spherical{25.0}, true, derive_seed(opts.seed, 0x11F)};
    base = synth::sample_gaussian(spec);
    true_id = 10.0;
    clip_lo = -1e9;
    clip_hi = 1e9;
  }

  std::vector<Row> rows;
  for (double sigma : {0.0, 0.125, 0.25, 0.5}) {
    for (int rep = 0; rep < opts.repeats; ++rep) {
      const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(rep);
      synth::NoiseSpec noise{sigma, clip_lo, clip_hi, derive_seed(seed, 0x300)};
      const SampleMatrix data = synth::add_noise(base, noise);
      const double estimate = opts.estimator.run(data).value;
      rows.push_back(make_row(sigma, true_id, estimate, opts.estimator, seed, data.rows(), data.cols()));
    }
  }
  return rows;
}

std::string rows_to_csv(const std::vector<Row>& rows) {
  std::string out = "sweep_param,true_id,estimate,estimator,seed,n,D\n";
  char buf[96];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,", row.sweep_param, row.true_id, row.estimate);
    out += buf;
    out += row.estimator;
    std::snprintf(buf, sizeof(buf), ",%llu,%lld,%lld\n", static_cast<unsigned long long>(row.seed),
                  static_cast<long long>(row.n), static_cast<long long>(row.dim));
    out += buf;
  }
  return out;
}

std::vector<std::string> suite_names() {
  return {"sample_count",        "extrinsic",           "cond_number",     "covariance_spherical",
          "covariance_diagonal", "covariance_full",     "low_sample",      "noise"};
}

std::vector<Row> run_suite(const std::string& suite, const SweepOptions& opts, const SampleMatrix* noise_input) {
  if (suite == "sample_count") return sweep_sample_count(opts);
  if (suite == "extrinsic") return sweep_extrinsic(opts);
  if (suite == "cond_number") return sweep_cond_number(opts);
  if (suite == "covariance_spherical") return sweep_covariance_spherical(opts);
  if (suite == "covariance_diagonal") return sweep_covariance_diagonal(opts);
  if (suite == "covariance_full") return sweep_covariance_full(opts);
  if (suite == "low_sample") return sweep_low_sample(opts);
  if (suite == "noise") return sweep_noise(opts, noise_input);
  throw Error(ErrorKind::DomainError, "unknown bench suite '" + suite + "'");
}

}  // namespace idim::bench
