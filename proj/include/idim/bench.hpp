#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "idim/imbalance.hpp"
#include "idim/types.hpp"

namespace idim::bench {

/// One sweep measurement. true_id is NaN when the ground truth is unknown
/// (real datasets).
struct Row {
  double sweep_param = 0.0;
  double true_id = 0.0;
  double estimate = 0.0;
  std::string estimator;
  std::uint64_t seed = 0;
  Eigen::Index n = 0;
  Eigen::Index dim = 0;
};

struct SweepOptions {
  std::uint64_t seed = 0;
  int repeats = 1;  // seeds seed, seed+1, ...
  EstimatorSelector estimator;
  int rotation_passes = 1;  // consecutive-pair rotation passes per embedding
};

/// FisherS estimates of isotropic Gaussians, d in {2,5,10,20} x n in
/// {500,1000,5000}. sweep_param = n.
std::vector<Row> sweep_sample_count(const SweepOptions& opts);

/// d = 5 embedded in D in {10,50,200} with rotation, n = 3000.
/// sweep_param = D.
std::vector<Row> sweep_extrinsic(const SweepOptions& opts);

/// Conditional number C in {4,6,...,16} on one isotropic Gaussian d = 10,
/// n = 3000 per seed. sweep_param = C.
std::vector<Row> sweep_cond_number(const SweepOptions& opts);

/// Spherical covariance sigma in {0.25,1,4}, d = 10, n = 3000.
std::vector<Row> sweep_covariance_spherical(const SweepOptions& opts);

/// Diagonal covariance with fixed total variation in {2.5,5,10,20,40},
/// d = 10, n = 3000.
std::vector<Row> sweep_covariance_diagonal(const SweepOptions& opts);

/// Full covariance with fixed generalized variance over 8 log-spaced
/// points, d = 10, n = 3000.
std::vector<Row> sweep_covariance_full(const SweepOptions& opts);

/// Estimator variance at n in {25,500}: 10 seeded subsamples of one fixed
/// synthetic class (Gaussian d = 8 in D = 20, rotated).
std::vector<Row> sweep_low_sample(const SweepOptions& opts);

/// Additive Gaussian noise sigma in {0,0.125,0.25,0.5} on a provided cloud,
/// or on a high-variance synthetic default when `input` is null.
std::vector<Row> sweep_noise(const SweepOptions& opts, const SampleMatrix* input);

/// CSV with header sweep_param,true_id,estimate,estimator,seed,n,D.
std::string rows_to_csv(const std::vector<Row>& rows);

std::vector<Row> run_suite(const std::string& suite, const SweepOptions& opts,
                           const SampleMatrix* noise_input = nullptr);

std::vector<std::string> suite_names();

}  // namespace idim::bench
