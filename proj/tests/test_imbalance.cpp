#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "idim/error.hpp"
#include "idim/imbalance.hpp"
#include "idim/rng.hpp"
#include "idim/synth.hpp"

using namespace idim;

namespace {

ClassIdProfile profile_from_raw(std::vector<double> raw, std::vector<std::int64_t> counts = {}) {
  ClassIdProfile profile;
  profile.raw = std::move(raw);
  if (counts.empty()) counts.assign(profile.raw.size(), 10);
  profile.counts = std::move(counts);
  profile.degenerate.assign(profile.raw.size(), false);
  profile.estimator_tag = "test";
  profile.normalize();
  return profile;
}

ClassIdProfile random_profile(Rng& rng, std::size_t max_classes = 12) {
  const std::size_t size = 2 + static_cast<std::size_t>(rng.below(max_classes - 1));
  std::vector<double> raw(size);
  std::vector<std::int64_t> counts(size);
  for (std::size_t c = 0; c < size; ++c) {
    raw[c] = std::exp(rng.uniform(-1.5, 3.0));
    counts[c] = 1 + static_cast<std::int64_t>(rng.below(5000));
  }
  return profile_from_raw(std::move(raw), std::move(counts));
}

}  // namespace

TEST_CASE("classwise_id is symmetric for identically distributed classes") {
  synth::GaussianSpec spec{4, 4, 1000, synth::Identity{}, false, 51};
  const SampleMatrix data = synth::sample_gaussian(spec);
  LabeledDataset dataset;
  dataset.data = data;
  dataset.labels.assign(1000, 0);
  for (std::size_t i = 500; i < 1000; ++i) dataset.labels[i] = 1;

  const auto profile = classwise_id(dataset, {});
  REQUIRE(profile.num_classes() == 2);
  CHECK(std::abs(profile.normalized[0] - 0.5) < 0.05);
  CHECK(std::abs(profile.normalized[1] - 0.5) < 0.05);
  CHECK(profile.counts[0] == 500);
  CHECK(profile.counts[1] == 500);
}

TEST_CASE("classwise_id errors on a too-small class unless fallback is on") {
  synth::GaussianSpec spec{3, 3, 60, synth::Identity{}, false, 52};
  LabeledDataset dataset;
  dataset.data = synth::sample_gaussian(spec);
  dataset.labels.assign(60, 0);
  dataset.labels[57] = 1;
  dataset.labels[58] = 1;
  dataset.labels[59] = 1;  // class 1 has 3 samples < min_samples

  EstimatorSelector selector;
  CHECK_THROWS_AS(classwise_id(dataset, selector), Error);

  selector.fallback_to_mean = true;
  const auto profile = classwise_id(dataset, selector);
  CHECK(profile.degenerate[1]);
  CHECK_FALSE(profile.degenerate[0]);
  CHECK(profile.raw[1] == profile.raw[0]);  // mean of the one successful class
}

TEST_CASE("instance_balanced_probs follows class counts") {
  CHECK(instance_balanced_probs({50, 50}) == std::vector<double>{0.5, 0.5});
  CHECK(instance_balanced_probs({90, 10}) == std::vector<double>{0.9, 0.1});

  synth::LongTailSpec spec{10, 5000, 100.0, 0};
  const auto counts = synth::longtail_counts(spec);
  const auto probs = instance_balanced_probs(counts);
  CHECK(probs.front() / probs.back() == doctest::Approx(100.0).epsilon(1e-12));
  CHECK_THROWS_AS(instance_balanced_probs({5, 0}), Error);
}

TEST_CASE("id_sampling_probs reuses the normalized profile") {
  const auto profile = profile_from_raw({0.2, 0.3, 0.5}, {10, 10, 5});
  const auto probs = id_sampling_probs(profile);
  CHECK(probs.class_probs[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(probs.class_probs[1] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(probs.class_probs[2] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(probs.per_sample_probs[2] == doctest::Approx(0.1).epsilon(1e-12));

  // equal IDs fall back to class-balanced sampling regardless of counts
  const auto equal = id_sampling_probs(profile_from_raw({3.0, 3.0, 3.0, 3.0}, {1, 10, 100, 1000}));
  for (double p : equal.class_probs) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("progressive_blend endpoints are exact") {
  const std::vector<double> a{1.0, 0.0};
  const std::vector<double> b{0.0, 1.0};
  CHECK(progressive_blend(a, b, 0.0, 200.0) == a);
  CHECK(progressive_blend(a, b, 200.0, 200.0) == b);
  const auto mid = progressive_blend(a, b, 100.0, 200.0);
  CHECK(mid[0] == 0.5);
  CHECK(mid[1] == 0.5);
  CHECK_THROWS_AS(progressive_blend(a, {0.5, 0.25, 0.25}, 1.0, 2.0), Error);
}

TEST_CASE("loss_weights substitute normalized IDs times the class count") {
  const auto weights = loss_weights(profile_from_raw({0.2, 0.3, 0.5}));
  CHECK(weights[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(weights[1] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(weights[2] == doctest::Approx(1.5).epsilon(1e-12));

  const auto uniform = loss_weights(profile_from_raw(std::vector<double>(10, 4.2)));
  for (double w : uniform) CHECK(w == doctest::Approx(1.0).epsilon(1e-12));

  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  CHECK(std::abs(sum - 3.0) < 1e-12);
}

TEST_CASE("ldam_margins scale the largest class margin to exactly 0.5") {
  const auto margins = ldam_margins(profile_from_raw({0.2, 0.3, 0.5}));
  CHECK(margins[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(margins[1] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(margins[2] == 0.5);

  const auto pair = ldam_margins(profile_from_raw({0.1, 0.4}));
  CHECK(pair[0] == 0.125);
  CHECK(pair[1] == 0.5);

  for (double m : ldam_margins(profile_from_raw(std::vector<double>(5, 2.0)))) CHECK(m == 0.5);
}

TEST_CASE("ldam_baseline_margins follow inverse fourth-root cardinality") {
  const auto margins = ldam_baseline_margins({16, 1}, 0.5);
  CHECK(margins[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(margins[1] == doctest::Approx(0.5).epsilon(1e-15));
  // the rarest class always carries the largest baseline margin
  const auto tail = ldam_baseline_margins({5000, 400, 50}, 0.5);
  CHECK(tail[2] > tail[1]);
  CHECK(tail[1] > tail[0]);
  CHECK_THROWS_AS(ldam_baseline_margins({10, 0}, 0.5), Error);
  CHECK_THROWS_AS(ldam_baseline_margins({10, 10}, 0.0), Error);
}

TEST_CASE("dro_margins scale normalized IDs and return epsilon inits") {
  const auto profile = profile_from_raw({0.2, 0.3, 0.5});
  const auto unit = dro_margins(profile, 1.0);
  CHECK(unit.margins == profile.normalized);
  const auto half = dro_margins(profile, 0.5);
  for (std::size_t c = 0; c < 3; ++c) CHECK(half.margins[c] == 0.5 * profile.normalized[c]);
  CHECK(half.epsilon_init == profile.normalized);
  CHECK_THROWS_AS(dro_margins(profile, 0.0), Error);
  CHECK_THROWS_AS(dro_margins(profile, -1.0), Error);
}

TEST_CASE("logit_adjust_deltas invert the normalized IDs") {
  const auto deltas = logit_adjust_deltas(profile_from_raw({0.2, 0.3, 0.5}));
  // direct substitution: (1/0.2, 1/0.3, 1/0.5) normalized
  const double inv0 = 1.0 / 0.2, inv1 = 1.0 / 0.3, inv2 = 1.0 / 0.5;
  const double total = inv0 + inv1 + inv2;
  CHECK(deltas[0] == doctest::Approx(inv0 / total).epsilon(1e-12));
  CHECK(deltas[1] == doctest::Approx(inv1 / total).epsilon(1e-12));
  CHECK(deltas[2] == doctest::Approx(inv2 / total).epsilon(1e-12));
  CHECK(deltas[0] == doctest::Approx(0.48387).epsilon(1e-4));
  CHECK(deltas[1] == doctest::Approx(0.32258).epsilon(1e-4));
  CHECK(deltas[2] == doctest::Approx(0.19355).epsilon(1e-4));

  const auto uniform = logit_adjust_deltas(profile_from_raw(std::vector<double>(4, 7.0)));
  for (double d : uniform) CHECK(d == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("mitigation invariants hold over random profiles") {
  Rng rng(53);
  for (int trial = 0; trial < 200; ++trial) {
    const auto profile = random_profile(rng);
    const std::size_t size = profile.num_classes();

    const auto sampling = id_sampling_probs(profile);
    CHECK(std::abs(std::accumulate(sampling.class_probs.begin(), sampling.class_probs.end(), 0.0) - 1.0) <=
          1e-12);

    const auto weights = loss_weights(profile);
    const double mean = std::accumulate(weights.begin(), weights.end(), 0.0) / static_cast<double>(size);
    CHECK(std::abs(mean - 1.0) <= 1e-12);

    const auto margins = ldam_margins(profile);
    CHECK(*std::max_element(margins.begin(), margins.end()) == 0.5);
    const std::size_t argmax_id = static_cast<std::size_t>(
        std::max_element(profile.normalized.begin(), profile.normalized.end()) - profile.normalized.begin());
    CHECK(margins[argmax_id] == 0.5);

    const double scale = rng.uniform(0.1, 2.0);
    const auto dro = dro_margins(profile, scale);
    CHECK(std::abs(std::accumulate(dro.margins.begin(), dro.margins.end(), 0.0) - scale) <= 1e-12);

    const auto deltas = logit_adjust_deltas(profile);
    CHECK(std::abs(std::accumulate(deltas.begin(), deltas.end(), 0.0) - 1.0) <= 1e-12);
    const std::size_t argmin_id = static_cast<std::size_t>(
        std::min_element(profile.normalized.begin(), profile.normalized.end()) - profile.normalized.begin());
    const std::size_t argmax_delta =
        static_cast<std::size_t>(std::max_element(deltas.begin(), deltas.end()) - deltas.begin());
    CHECK(argmax_delta == argmin_id);

    // scaling every raw ID leaves all reports unchanged
    ClassIdProfile scaled = profile;
    for (double& v : scaled.raw) v *= 7.0;
    scaled.normalize();
    const auto weights2 = loss_weights(scaled);
    for (std::size_t c = 0; c < size; ++c) CHECK(std::abs(weights2[c] - weights[c]) <= 1e-12);
  }
}

TEST_CASE("transform_profile reversed is an involution") {
  Rng rng(54);
  for (int trial = 0; trial < 50; ++trial) {
    const auto profile = random_profile(rng);
    const auto once = transform_profile(profile, ProfileTransform::Reversed);
    const auto twice = transform_profile(once, ProfileTransform::Reversed);
    CHECK(twice.raw == profile.raw);

    // largest ID moves to the class that held the smallest
    const auto lo = std::min_element(profile.raw.begin(), profile.raw.end()) - profile.raw.begin();
    const auto hi = std::max_element(profile.raw.begin(), profile.raw.end()) - profile.raw.begin();
    CHECK(once.raw[static_cast<std::size_t>(lo)] == profile.raw[static_cast<std::size_t>(hi)]);
  }
}

TEST_CASE("transform_profile shuffle preserves the value multiset") {
  const auto profile = profile_from_raw({4.0, 1.0, 2.5, 8.0, 1.0});

  const std::vector<std::size_t> identity{0, 1, 2, 3, 4};
  CHECK(apply_profile_permutation(profile, identity).raw == profile.raw);

  const auto shuffled = transform_profile(profile, ProfileTransform::Shuffled, 77);
  auto a = profile.raw;
  auto b = shuffled.raw;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);

  auto na = profile.normalized;
  auto nb = shuffled.normalized;
  std::sort(na.begin(), na.end());
  std::sort(nb.begin(), nb.end());
  for (std::size_t i = 0; i < na.size(); ++i) CHECK(na[i] == doctest::Approx(nb[i]).epsilon(1e-13));
}
