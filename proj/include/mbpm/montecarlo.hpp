#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mbpm/model.hpp"

namespace mbpm {

// Worker count from MBPM_WORKERS, else the hardware concurrency (at least 1).
unsigned default_workers();

// Runs body(k) for k in [0, count) on `workers` threads with a static
// contiguous partition. The first exception by index is rethrown.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

struct EnsembleOptions {
  unsigned workers = 0;                    // 0: default_workers()
  std::vector<std::size_t> snapshot_steps; // times whose states are kept for every replicate
};

struct Ensemble {
  std::string spec_digest;
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::vector<State> terminal;               // Z_n per replicate
  std::vector<std::int64_t> path_max;        // max_k ‖Z_k‖₁ per replicate
  std::vector<std::size_t> snapshot_steps;
  std::vector<std::vector<State>> snapshots; // [replicate][snapshot]
};

// Replicate r follows the stream (seed, r), so the result does not depend on
// the number of workers.
Ensemble run_ensemble(const ModelSpec& spec, std::size_t n, std::size_t replicates, std::uint64_t seed,
                      const EnsembleOptions& options = {});

struct ExplosionEstimate {
  double threshold = 0.0;
  std::size_t count = 0;
  std::size_t replicates = 0;
  double fraction = 0.0;
  double ci_low = 0.0;  // Wilson 95% interval
  double ci_high = 0.0;
};

// Fraction of replicates with ‖Z_n‖₁ > K, or with max_k ‖Z_k‖₁ > K when
// along_path is set.
ExplosionEstimate estimate_explosion(const Ensemble& ensemble, double threshold, bool along_path = false);

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

using Cdf = std::function<double(double)>;

// sup_x |F_R(x) − F(x)| over the empirical CDF of the sample; O(R log R).
double ks_statistic(std::vector<double> sample, const Cdf& cdf);

// sup_x |F_a(x) − F_b(x)| between two empirical CDFs.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Regularized lower incomplete gamma P(shape, x/scale).
double gamma_cdf(double x, double shape, double scale);
double normal_cdf(double x);

// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> sample, double prob);

struct MomentCheck {
  State z;
  std::size_t samples = 0;
  Vector exact_mean;
  Matrix exact_cov;
  Vector mean;
  Matrix cov;
  Vector mean_se;
  Matrix cov_se;
  double max_z_score = 0.0;  // largest |empirical − exact| / SE
  bool passed = false;
};

// Empirical one-step mean and covariance from n ≥ 10⁴ draws, split into 100
// batches with batch b on the stream (seed, b), against the exact formulas.
// Passes iff every entry lies within 4 standard errors (exactly, when the SE
// is zero).
MomentCheck moment_check(const ModelSpec& spec, std::span<const std::int64_t> z, std::size_t n, std::uint64_t seed,
                         unsigned workers = 0);

}  // namespace mbpm
