#include "mbpm/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include "mbpm/error.hpp"
#include "mbpm/moments.hpp"
#include "mbpm/spec_io.hpp"

namespace mbpm {

unsigned default_workers() {
  if (const char* env = std::getenv("MBPM_WORKERS")) {
    char* end = nullptr;
    const long w = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && w > 0) return static_cast<unsigned>(w);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k < hi; ++k) {
      try {
        body(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run(0, count);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk, hi = std::min(count, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run, lo, hi);
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Ensemble run_ensemble(const ModelSpec& spec, std::size_t n, std::size_t replicates, std::uint64_t seed,
                      const EnsembleOptions& options) {
  if (replicates == 0) throw ArgumentError("run_ensemble: at least one replicate is required");
  Ensemble e;
  e.spec_digest = spec_digest(spec);
  e.n = n;
  e.replicates = replicates;
  e.seed = seed;
  e.snapshot_steps = options.snapshot_steps;
  std::sort(e.snapshot_steps.begin(), e.snapshot_steps.end());
  e.snapshot_steps.erase(std::unique(e.snapshot_steps.begin(), e.snapshot_steps.end()), e.snapshot_steps.end());
  if (!e.snapshot_steps.empty() && e.snapshot_steps.back() > n)
    throw ArgumentError("run_ensemble: snapshot step beyond the horizon");
  e.terminal.resize(replicates);
  e.path_max.resize(replicates);
  e.snapshots.resize(e.snapshot_steps.empty() ? 0 : replicates);

  parallel_for(replicates, options.workers, [&](std::size_t r) {
    Stream rng(seed, r);
    State z = spec.initial().sample(rng);
    std::int64_t peak = l1_norm(z);
    std::size_t next_snap = 0;
    std::vector<State> snaps;
    for (std::size_t k = 0;; ++k) {
      while (next_snap < e.snapshot_steps.size() && e.snapshot_steps[next_snap] == k) {
        snaps.push_back(z);
        ++next_snap;
      }
      if (k == n) break;
      z = step(spec, z, rng);
      peak = std::max(peak, l1_norm(z));
    }
    e.terminal[r] = std::move(z);
    e.path_max[r] = peak;
    if (!e.snapshots.empty()) e.snapshots[r] = std::move(snaps);
  });
  return e;
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  // the endpoints are exact at the boundary counts; avoid rounding residue
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

ExplosionEstimate estimate_explosion(const Ensemble& ensemble, double threshold, bool along_path) {
  if (!(threshold >= 0.0)) throw ArgumentError("estimate_explosion: threshold must be nonnegative");
  ExplosionEstimate out;
  out.threshold = threshold;
  out.replicates = ensemble.replicates;
  for (std::size_t r = 0; r < ensemble.replicates; ++r) {
    const double size =
        static_cast<double>(along_path ? ensemble.path_max[r] : l1_norm(ensemble.terminal[r]));
    if (size > threshold) ++out.count;
  }
  out.fraction = out.replicates ? static_cast<double>(out.count) / static_cast<double>(out.replicates) : 0.0;
  std::tie(out.ci_low, out.ci_high) = wilson_interval(out.count, out.replicates);
  return out;
}

double ks_statistic(std::vector<double> sample, const Cdf& cdf) {
  if (sample.empty()) throw ArgumentError("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return std::min(d, 1.0);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ArgumentError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

namespace {

// P(a, x) by its power series; converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a, sum = term;
  for (int k = 1; k < 100000; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the modified Lentz continued fraction, for x ≥ a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int k = 1; k < 100000; ++k) {
    const double an = -k * (k - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_cdf(double x, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw ArgumentError("gamma_cdf: shape and scale must be positive");
  if (std::isnan(x)) throw ArgumentError("gamma_cdf: x is NaN");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double y = x / scale;
  if (y < shape + 1.0) return std::min(1.0, gamma_p_series(shape, y));
  return std::max(0.0, 1.0 - gamma_q_fraction(shape, y));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double quantile(std::vector<double> sample, double prob) {
  if (sample.empty()) throw ArgumentError("quantile: empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw ArgumentError("quantile: probability outside [0, 1]");
  std::sort(sample.begin(), sample.end());
  const double h = prob * static_cast<double>(sample.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  return sample[lo] + (h - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

MomentCheck moment_check(const ModelSpec& spec, std::span<const std::int64_t> z, std::size_t n, std::uint64_t seed,
                         unsigned workers) {
  if (n < 10000) throw ArgumentError("moment_check: at least 10000 samples are required");
  if (z.size() != spec.dim()) throw DimensionError("moment_check: state has the wrong dimension");
  const std::size_t p = spec.dim();
  constexpr std::size_t kBatches = 100;

  MomentCheck mc;
  mc.z.assign(z.begin(), z.end());
  mc.samples = n;
  mc.exact_mean = cond_mean(spec, z);
  mc.exact_cov = cond_var(spec, z);

  std::vector<double> draws(n * p);
  parallel_for(kBatches, workers, [&](std::size_t b) {
    Stream rng(seed, b);
    const std::size_t lo = b * n / kBatches, hi = (b + 1) * n / kBatches;
    for (std::size_t k = lo; k < hi; ++k) {
      const State next = step(spec, z, rng);
      for (std::size_t i = 0; i < p; ++i) draws[k * p + i] = static_cast<double>(next[i]);
    }
  });

  const double N = static_cast<double>(n);
  mc.mean.assign(p, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < p; ++i) mc.mean[i] += draws[k * p + i];
  for (auto& x : mc.mean) x /= N;

  // Centered products w_ij = (x_i − x̄_i)(x_j − x̄_j): their mean is the
  // covariance estimate and their spread gives its standard error.
  mc.cov = Matrix(p, p);
  Matrix w2(p, p);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) {
        const double w = (draws[k * p + i] - mc.mean[i]) * (draws[k * p + j] - mc.mean[j]);
        mc.cov(i, j) += w;
        w2(i, j) += w * w;
      }
  mc.cov_se = Matrix(p, p);
  mc.mean_se.assign(p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      const double m = mc.cov(i, j) / N;
      const double var_w = std::max(0.0, w2(i, j) / N - m * m);
      mc.cov(i, j) = m * N / (N - 1.0);
      mc.cov_se(i, j) = std::sqrt(var_w / N);
    }
  for (std::size_t i = 0; i < p; ++i) mc.mean_se[i] = std::sqrt(std::max(0.0, mc.cov(i, i)) / N);

  bool ok = true;
  auto compare = [&](double emp, double exact, double se) {
    const double diff = std::abs(emp - exact);
    if (se == 0.0) {
      const bool same = diff <= 1e-9 * std::max(1.0, std::abs(exact));
      ok = ok && same;
      if (!same) mc.max_z_score = std::numeric_limits<double>::infinity();
      return;
    }
    mc.max_z_score = std::max(mc.max_z_score, diff / se);
    ok = ok && diff <= 4.0 * se;
  };
  for (std::size_t i = 0; i < p; ++i) compare(mc.mean[i], mc.exact_mean[i], mc.mean_se[i]);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) compare(mc.cov(i, j), mc.exact_cov(i, j), mc.cov_se(i, j));
  mc.passed = ok;
  return mc;
}

}  // namespace mbpm
