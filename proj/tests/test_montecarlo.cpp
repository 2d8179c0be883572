#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mbpm/error.hpp"
#include "mbpm/montecarlo.hpp"

using namespace mbpm;

namespace {

ModelSpec doubling() {
  return ModelSpec({OffspringLaw::independent({Marginal::deterministic(2)})}, MigrationSpec::none(1),
                   InitialLaw::deterministic({1}));
}

bool same(const Ensemble& a, const Ensemble& b) {
  return a.terminal == b.terminal && a.path_max == b.path_max && a.snapshots == b.snapshots &&
         a.spec_digest == b.spec_digest;
}

}  // namespace

TEST(RunEnsemble, DeterministicSpecGivesIdenticalReplicates) {
  const auto e = run_ensemble(doubling(), 10, 16, 3);
  for (const auto& z : e.terminal) EXPECT_EQ(z, State{1024});
  for (auto m : e.path_max) EXPECT_EQ(m, 1024);
}

TEST(RunEnsemble, SameSeedSameEnsembleAnyWorkerCount) {
  const auto spec = fixtures::load("coupled2.json");
  EnsembleOptions one{1, {0, 10, 50}}, many{7, {0, 10, 50}};
  const auto a = run_ensemble(spec, 50, 301, 42, one);
  const auto b = run_ensemble(spec, 50, 301, 42, many);
  const auto c = run_ensemble(spec, 50, 301, 42, many);
  EXPECT_TRUE(same(a, b));
  EXPECT_TRUE(same(b, c));
  ASSERT_EQ(a.snapshots.size(), 301u);
  EXPECT_EQ(a.snapshots[5][2], a.terminal[5]);
  EXPECT_FALSE(same(a, run_ensemble(spec, 50, 301, 43, one)));
}

TEST(RunEnsemble, SingleReplicateMatchesSimulatePath) {
  const auto spec = fixtures::load("coupled2.json");
  const auto e = run_ensemble(spec, 40, 1, 9);
  const auto path = simulate_path(spec, 40, StreamKey{9, 0});
  EXPECT_EQ(e.terminal.front(), path.states.back());
  std::int64_t mx = 0;
  for (const auto& z : path.states) mx = std::max<std::int64_t>(mx, z[0] + z[1]);
  EXPECT_EQ(e.path_max.front(), mx);
}

TEST(RunEnsemble, RejectsEmptyEnsembles) {
  EXPECT_THROW(run_ensemble(doubling(), 5, 0, 1), ArgumentError);
}

TEST(Explosion, PureDeathIsZero) {
  const auto e = run_ensemble(fixtures::load("pure_death.json"), 50, 500, 1);
  const auto x = estimate_explosion(e, 1.0);
  EXPECT_EQ(x.fraction, 0.0);
  EXPECT_EQ(x.ci_low, 0.0);
  EXPECT_GT(x.ci_high, 0.0);
}

TEST(Explosion, DoublingModelExceedsThreshold) {
  const auto e = run_ensemble(doubling(), 20, 100, 5);
  const auto x = estimate_explosion(e, 1e3);
  EXPECT_EQ(x.fraction, 1.0);
  EXPECT_EQ(x.count, 100u);
}

TEST(Explosion, ZeroThresholdCountsNonemptyStates) {
  const auto e = run_ensemble(fixtures::load("gamma1.json"), 20, 200, 5);
  EXPECT_EQ(estimate_explosion(e, 0.0).fraction, 1.0);
  EXPECT_THROW(estimate_explosion(e, -1.0), ArgumentError);
}

TEST(Explosion, MonotoneInThreshold) {
  const auto e = run_ensemble(fixtures::load("drift_quarter.json"), 200, 1000, 8);
  double prev = 1.0, prev_path = 1.0;
  for (double k = 0; k <= 400; k += 10) {
    const double f = estimate_explosion(e, k).fraction;
    const double fp = estimate_explosion(e, k, true).fraction;
    EXPECT_LE(f, prev);
    EXPECT_LE(fp, prev_path);
    EXPECT_GE(fp, f);
    prev = f;
    prev_path = fp;
  }
}

TEST(Wilson, KnownInterval) {
  const auto [lo, hi] = wilson_interval(50, 100);
  EXPECT_NEAR(lo, 0.4038, 1e-4);
  EXPECT_NEAR(hi, 0.5962, 1e-4);
}

TEST(KsStatistic, Examples) {
  const Cdf uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  EXPECT_DOUBLE_EQ(ks_statistic({0.5}, uniform), 0.5);
  std::vector<double> grid;
  const int r = 10000;
  for (int i = 1; i <= r; ++i) grid.push_back(static_cast<double>(i) / (r + 1));
  EXPECT_LT(ks_statistic(grid, uniform), 2.0 / r);
  EXPECT_DOUBLE_EQ(ks_statistic({-3.0, -2.0, -1.0}, uniform), 1.0);
  EXPECT_THROW(ks_statistic({}, uniform), ArgumentError);
}

TEST(KsStatistic, AgreesWithBruteForce) {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> size(1, 50);
  std::exponential_distribution<double> expo(1.0);
  const Cdf ref = [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x); };
  for (int t = 0; t < 100; ++t) {
    std::vector<double> s(static_cast<std::size_t>(size(gen)));
    for (auto& x : s) x = 1.3 * expo(gen);
    if (t % 5 == 0) s.push_back(s.front());  // ties
    EXPECT_NEAR(ks_statistic(s, ref), oracle::ks_brute_force(s, ref, 0.0, 12.0, 2000), 1e-12);
  }
}

TEST(KsTwoSample, Basics) {
  EXPECT_DOUBLE_EQ(ks_two_sample({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(ks_two_sample({1, 2}, {3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(ks_two_sample({1, 2, 3, 4}, {2, 4}), 0.25);
}

TEST(GammaCdf, Examples) {
  EXPECT_EQ(gamma_cdf(0.0, 3.0, 2.0), 0.0);
  EXPECT_NEAR(gamma_cdf(1.0, 1.0, 1.0), 1.0 - std::exp(-1.0), 1e-14);
  EXPECT_NEAR(gamma_cdf(1.0, 1.0, 1.0), 0.632121, 1e-6);
  EXPECT_THROW(gamma_cdf(1.0, 0.0, 1.0), ArgumentError);
  EXPECT_THROW(gamma_cdf(1.0, 1.0, -1.0), ArgumentError);
}

TEST(GammaCdf, AgreesWithReferenceImplementation) {
  for (double k : {0.3, 1.0, 2.5, 4.0, 17.0, 150.0})
    for (double x : {1e-6, 0.01, 0.5, 1.0, 2.0, 3.9, 10.0, 40.0, 200.0})
      EXPECT_NEAR(gamma_cdf(x * 0.5, k, 0.5), boost::math::gamma_p(k, x), 1e-10) << k << " " << x;
}

TEST(NormalCdf, Values) {
  EXPECT_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(1.96), 0.9750021048517795, 1e-12);
  EXPECT_NEAR(normal_cdf(-1.0), 0.15865525393145707, 1e-12);
  EXPECT_NEAR(normal_cdf(-8.0), 6.22096057427178e-16, 1e-25);
}

TEST(Quantile, Type7) {
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 1.0), 4.0);
}

TEST(MomentCheck, DeterministicSpecMatchesExactly) {
  TypeMigration t;
  t.q = StateFunction::constant(1.0);
  t.immigration = ImmigrationLaw::deterministic(2);
  const ModelSpec det({OffspringLaw::independent({Marginal::deterministic(1)})}, MigrationSpec({t}),
                      InitialLaw::deterministic({3}));
  const auto mc = moment_check(det, State{3}, 10000, 1);
  EXPECT_TRUE(mc.passed);
  EXPECT_EQ(mc.mean_se[0], 0.0);
  EXPECT_EQ(mc.cov(0, 0), 0.0);
  EXPECT_EQ(mc.mean[0], 5.0);
}

TEST(MomentCheck, PoissonNoMigration) {
  const ModelSpec spec({OffspringLaw::independent({Marginal::poisson(1.0)})}, MigrationSpec::none(1),
                       InitialLaw::deterministic({10}));
  const auto mc = moment_check(spec, State{10}, 100000, 4);
  EXPECT_TRUE(mc.passed);
  EXPECT_DOUBLE_EQ(mc.exact_mean[0], 10.0);
  EXPECT_DOUBLE_EQ(mc.exact_cov(0, 0), 10.0);
  EXPECT_NEAR(mc.mean[0], 10.0, 0.1);
  EXPECT_NEAR(mc.cov(0, 0), 10.0, 0.3);
}

TEST(MomentCheck, RequiresEnoughSamples) {
  EXPECT_THROW(moment_check(fixtures::load("gamma1.json"), State{1}, 100, 1), ArgumentError);
}

TEST(ParallelFor, VisitsEveryIndexOnceAndRethrows) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 6, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(100, 4, [](std::size_t i) { if (i == 37) throw NumericError("boom"); }), NumericError);
}
