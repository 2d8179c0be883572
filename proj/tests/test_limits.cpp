#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "mbpm/error.hpp"
#include "mbpm/limits.hpp"

using namespace mbpm;

namespace {

LimitParams params(double alpha, double c_dot_u, double beta, double nu) {
  LimitParams p;
  p.alpha = alpha;
  p.c_dot_u = c_dot_u;
  p.beta = beta;
  p.nu = nu;
  return p;
}

}  // namespace

TEST(ASeq, ConstantDriftIsArithmetic) {
  const auto a = a_seq(hbar_power(0.75, 0.0), 1000);
  ASSERT_EQ(a.size(), 1001u);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], 1.0 + 0.75 * static_cast<double>(k));
}

TEST(ASeq, IdentityDoubles) {
  const auto a = a_seq([](double x) { return x; }, 40);
  for (std::size_t k = 0; k <= 40; ++k) EXPECT_EQ(a[k], std::ldexp(1.0, static_cast<int>(k)));
}

TEST(ASeq, SquareRootByHand) {
  const auto a = a_seq([](double x) { return std::sqrt(x); }, 2);
  EXPECT_DOUBLE_EQ(a[1], 2.0);
  EXPECT_NEAR(a[2], 3.414214, 1e-6);
}

TEST(ASeq, RejectsNonpositiveDrift) {
  EXPECT_THROW(a_seq([](double x) { return 2.0 - x; }, 5), NumericError);
  EXPECT_EQ(a_seq([](double) { return 1.0; }, 0), std::vector<double>{1.0});
}

TEST(ASeq, ApproachesClosedForm) {
  for (auto [c, alpha] : {std::pair{2.0, 0.0}, std::pair{1.0, 0.5}}) {
    const auto a = a_seq(hbar_power(c, alpha), 100000);
    EXPECT_NEAR(a.back() / a_asymptotic(c, alpha, 1e5), 1.0, 0.05) << c << " " << alpha;
  }
}

TEST(AAsymptotic, Examples) {
  EXPECT_DOUBLE_EQ(a_asymptotic(2.0, 0.0, 10), 20.0);
  EXPECT_DOUBLE_EQ(a_asymptotic(1.0, 0.5, 4), 4.0);
  for (double alpha : {0.0, 0.25, 0.5, 0.8})
    EXPECT_NEAR(a_asymptotic(1.3, alpha, 40) / a_asymptotic(1.3, alpha, 10), std::pow(4.0, 1.0 / (1.0 - alpha)),
                1e-9 * std::pow(4.0, 1.0 / (1.0 - alpha)));
}

TEST(LambdaN, PowerBranchExample) {
  const auto p = params(0.0, 2.0, 1.0, 1.0);
  for (double n : {2.0, 10.0, 500.0, 1e6}) EXPECT_DOUBLE_EQ(lambda_n(p, n), n);
}

TEST(LambdaN, LogBranchExample) {
  const double n = std::exp(2.0);
  const double expect = std::pow(0.5, 0.5 / 1.0) * std::pow(n, 1.0) * std::sqrt(2.0);
  EXPECT_NEAR(lambda_n(params(0.5, 1.0, 0.5, 1.0), n), expect, 1e-12 * expect);
}

TEST(LambdaN, SquareRootSpecValue) {
  // α = 0.5, β = 1, ν = 1, u'c = 1: Λ_n = (2 (n/2)³)^{1/2}.
  const double n = 2000;
  EXPECT_NEAR(lambda_n(params(0.5, 1.0, 1.0, 1.0), n), std::sqrt(2.0 * std::pow(n / 2.0, 3.0)), 1e-9);
}

TEST(LambdaN, ScalesWithRootNu) {
  for (const auto& base : {params(0.0, 2.0, 1.0, 1.0), params(0.5, 1.0, 0.5, 1.0), params(0.3, 0.7, 1.1, 1.0)}) {
    auto four = base;
    four.nu = 4.0;
    EXPECT_NEAR(lambda_n(four, 300) / lambda_n(base, 300), 2.0, 1e-12);
  }
}

TEST(LambdaN, RangeErrors) {
  EXPECT_THROW(lambda_n(params(1.0, 1.0, 1.0, 1.0), 10), ArgumentError);
  EXPECT_THROW(lambda_n(params(0.5, 1.0, 0.4, 1.0), 10), ArgumentError);
  EXPECT_THROW(lambda_n(params(0.5, 1.0, 1.6, 1.0), 10), ArgumentError);
  EXPECT_THROW(lambda_n(params(0.5, 0.0, 1.0, 1.0), 10), ArgumentError);
}

TEST(GammaLimit, Examples) {
  auto [k1, t1] = gamma_limit_params(0.0, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(k1, 4.0);
  EXPECT_DOUBLE_EQ(t1, 0.5);
  auto [k2, t2] = gamma_limit_params(0.0, 2.0, 2.0 + 1e-9);
  EXPECT_NEAR(k2, 2.0, 1e-8);
  EXPECT_DOUBLE_EQ(t2, 1.0);
  auto [k3, t3] = gamma_limit_params(0.0, 4.0 - 1e-9, 2.0);
  EXPECT_NEAR(k3, 1.0, 1e-8);
  (void)t3;
  EXPECT_THROW(gamma_limit_params(0.0, 4.0, 2.0), InfeasibleError);
}

TEST(GammaLimit, MeanIsProductFormula) {
  for (double alpha : {0.0, 0.2, 0.5})
    for (double nu : {0.5, 1.0, 1.5})
      for (double c : {1.0, 2.0}) {
        auto [k, t] = gamma_limit_params(alpha, nu, c);
        EXPECT_NEAR(k * t, (2 * c - nu * alpha) * (1 - alpha) / 2.0, 1e-14);
      }
}

TEST(L1Constant, Values) {
  EXPECT_DOUBLE_EQ(l1_constant(1.0, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(l1_constant(2.0, 0.0), 2.0);
  EXPECT_THROW(l1_constant(0.0, 0.5), ArgumentError);
}

TEST(CompleteLimitParams, DerivedFieldsByRegime) {
  const auto g = complete_limit_params(params(0.0, 2.0, 1.0, 1.0));
  ASSERT_TRUE(g.gamma_shape && g.gamma_scale && g.l1_constant);
  EXPECT_DOUBLE_EQ(*g.gamma_shape, 4.0);
  const auto s = complete_limit_params(params(0.5, 1.0, 1.0, 1.0));
  EXPECT_FALSE(s.gamma_shape.has_value());
  EXPECT_DOUBLE_EQ(*s.l1_constant, 0.25);
  const auto none = complete_limit_params(params(0.0, 0.25, 1.0, 1.0));
  EXPECT_FALSE(none.gamma_shape.has_value());
}

TEST(FitLimitParams, ConstantImmigration) {
  const auto g = fit_limit_params(fixtures::load("gamma1.json"));
  EXPECT_EQ(g.source, "fitted");
  EXPECT_DOUBLE_EQ(g.alpha, 0.0);
  EXPECT_DOUBLE_EQ(g.beta, 1.0);
  EXPECT_NEAR(g.c_dot_u, 2.0, 1e-9);
  EXPECT_NEAR(g.nu, 1.0, 1e-6);
  const auto d = fit_limit_params(fixtures::load("drift_quarter.json"));
  EXPECT_NEAR(d.c_dot_u, 0.25, 1e-9);
}

TEST(FitLimitParams, SquareRootImmigration) {
  const auto spec = fixtures::load("sqrt_growth.json");
  const auto f = fit_limit_params(spec);
  EXPECT_DOUBLE_EQ(f.alpha, 0.5);
  EXPECT_DOUBLE_EQ(f.beta, 1.0);
  EXPECT_NEAR(f.c_dot_u, 1.0, 1e-3);
  EXPECT_NEAR(f.nu, 1.0, 1e-3);
  const auto r = resolve_limit_params(spec);
  EXPECT_EQ(r.source, "declared");
  EXPECT_DOUBLE_EQ(r.c_dot_u, 1.0);
}

TEST(FellerParams, SingleType) {
  const auto f = feller_params(fixtures::load("gamma1.json"));
  EXPECT_NEAR(f.drift, 2.0, 1e-12);
  EXPECT_NEAR(f.diffusion, 1.0, 1e-12);
}

TEST(FellerParams, DiagonalCovariances) {
  // u = (1/2, 1/2), v = (1, 1), Σᵢ = diag(1/2, 1/2).
  const auto f = feller_params(fixtures::load("coupled2.json"));
  const double expect = 0.25 * (0.5 + 0.5) + 0.25 * (0.5 + 0.5);
  EXPECT_NEAR(f.diffusion, expect, 1e-12);
  const double zeta2 = std::numbers::pi * std::numbers::pi / 6.0;
  const double zeta3 = 1.2020569031595942;
  const double drift = 0.5 * (0.3 * 3.0 - 0.2 * zeta2 / zeta3) + 0.5 * (0.25 * 2.0 - 0.25 * 2.0);
  EXPECT_NEAR(f.drift, drift, 1e-9);
}

TEST(FellerParams, DegenerateAndAbsent) {
  TypeMigration t;
  t.q = StateFunction::constant(1.0);
  t.immigration = ImmigrationLaw::deterministic(2);
  const ModelSpec det({OffspringLaw::independent({Marginal::deterministic(1)})}, MigrationSpec({t}),
                      InitialLaw::deterministic({0}));
  EXPECT_EQ(feller_params(det).diffusion, 0.0);
  EXPECT_THROW(feller_params(fixtures::load("sqrt_growth.json")), InfeasibleError);
}

TEST(EulerMaruyama, DriftOnlyIsExact) {
  Stream rng(1, 0);
  const auto path = euler_maruyama(2.5, 0.0, 1.0, 1e-3, rng);
  ASSERT_EQ(path.size(), 1001u);
  for (std::size_t k = 0; k < path.size(); ++k) EXPECT_NEAR(path[k], 2.5 * static_cast<double>(k) * 1e-3, 1e-12);
  EXPECT_NEAR(path.back(), 2.5, 1e-12);
  Stream r2(1, 1);
  const auto odd = euler_maruyama(1.0, 0.0, 1.0, 0.3, r2);
  EXPECT_NEAR(odd.back(), 1.0, 1e-12);
}

TEST(EulerMaruyama, ZeroStartNoDriftStaysZero) {
  Stream rng(4, 0);
  for (double x : euler_maruyama(0.0, 3.0, 2.0, 1e-3, rng)) EXPECT_EQ(x, 0.0);
}

TEST(EulerMaruyama, MeanMatchesDrift) {
  const std::size_t paths = 100000;
  double sum = 0, sum2 = 0;
  for (std::size_t r = 0; r < paths; ++r) {
    Stream rng(21, r);
    const double x = euler_maruyama(2.0, 1.0, 1.0, 1e-3, rng).back();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / paths;
  const double se = std::sqrt((sum2 / paths - mean * mean) / paths);
  EXPECT_NEAR(mean, 2.0, 3.0 * se);
}

TEST(ScaledPath, Examples) {
  Trajectory constant{std::vector<State>(11, State{6, 4}), {}};
  const auto c = scaled_path(constant, 2, 5.0);
  for (const auto& v : c.values) EXPECT_EQ(v, (Vector{3.0, 2.0}));

  Trajectory ramp;
  for (std::int64_t k = 0; k <= 8; ++k) ramp.states.push_back({k * k});
  const auto one = scaled_path(ramp, 1, 8.0);
  ASSERT_EQ(one.values.size(), 9u);
  for (std::size_t k = 0; k < 9; ++k) {
    EXPECT_DOUBLE_EQ(one.t[k], static_cast<double>(k));
    EXPECT_DOUBLE_EQ(one.values[k][0], static_cast<double>(k * k));
  }

  const auto fine = scaled_path(ramp, 4, 2.0, 17);
  EXPECT_DOUBLE_EQ(fine.values.front()[0], 0.0);
  // t = 0.125 · j, ⌊4t⌋ changes every other grid point.
  for (std::size_t j = 0; j + 1 < 17; j += 2) EXPECT_EQ(fine.values[j], fine.values[j + 1]);
  EXPECT_DOUBLE_EQ(fine.values.back()[0], 64.0 / 4.0);

  EXPECT_THROW(scaled_path(ramp, 4, 3.0), ArgumentError);
}
