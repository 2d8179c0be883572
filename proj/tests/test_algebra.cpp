#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "mbpm/algebra.hpp"
#include "mbpm/error.hpp"

using namespace mbpm;

namespace {

double residual_right(const NonnegMatrix& m, const SpectralData& s) {
  const Vector mv = m.matrix() * std::span<const double>(s.v);
  double r = 0.0;
  for (std::size_t i = 0; i < mv.size(); ++i) r = std::max(r, std::abs(mv[i] - s.rho * s.v[i]));
  return r;
}

double residual_left(const NonnegMatrix& m, const SpectralData& s) {
  const Vector um = m.matrix().transpose() * std::span<const double>(s.u);
  double r = 0.0;
  for (std::size_t i = 0; i < um.size(); ++i) r = std::max(r, std::abs(um[i] - s.rho * s.u[i]));
  return r;
}

}  // namespace

TEST(Matrix, ArithmeticAndTranspose) {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{0, 1}, {1, 0}};
  EXPECT_EQ(a * b, (Matrix{{2, 1}, {4, 3}}));
  EXPECT_EQ(a + b, (Matrix{{1, 3}, {4, 4}}));
  EXPECT_EQ(2.0 * a, (Matrix{{2, 4}, {6, 8}}));
  EXPECT_EQ(a.transpose(), (Matrix{{1, 3}, {2, 4}}));
  const Vector x{1.0, -1.0};
  EXPECT_EQ(a * std::span<const double>(x), (Vector{-1.0, -1.0}));
  EXPECT_DOUBLE_EQ(quadratic_form(x, a, x), 1 - 2 - 3 + 4);
  EXPECT_EQ(a.column(1), (Vector{2, 4}));
}

TEST(Matrix, HadamardAndOdot) {
  EXPECT_EQ(hadamard(Vector{1, 2, 3}, Vector{4, 5, 6}), (Vector{4, 10, 18}));
  const std::vector<Matrix> mats{Matrix{{1, 0}, {0, 0}}, Matrix{{0, 1}, {1, 2}}};
  EXPECT_EQ(odot(Vector{3, 2}, mats), (Matrix{{3, 2}, {2, 4}}));
  EXPECT_THROW(hadamard(Vector{1}, Vector{1, 2}), DimensionError);
}

TEST(NonnegMatrix, RejectsInvalidInput) {
  EXPECT_THROW(NonnegMatrix({{1, -0.1}, {0, 1}}), Error);
  EXPECT_THROW(NonnegMatrix(Matrix(2, 3)), Error);
  EXPECT_THROW(NonnegMatrix({{NAN}}), Error);
}

TEST(Primitivity, Examples) {
  EXPECT_TRUE(is_primitive(NonnegMatrix{{0.5, 0.5}, {0.5, 0.5}}));
  EXPECT_FALSE(is_primitive(NonnegMatrix{{0, 1}, {1, 0}}));  // irreducible, period 2
  EXPECT_FALSE(is_primitive(NonnegMatrix{{1, 0}, {0, 1}}));  // reducible
  EXPECT_TRUE(is_primitive(NonnegMatrix{{0, 1}, {1, 1}}));
  // Wielandt's matrix attains the exponent bound (p−1)²+1 = 10 for p = 4.
  EXPECT_TRUE(is_primitive(NonnegMatrix{{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {1, 1, 0, 0}}));
  EXPECT_FALSE(is_primitive(NonnegMatrix{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}));
}

TEST(Perron, ClosedFormTwoByTwo) {
  // Eigenvalues of [[a, b], [c, d]] with a = 0.2, b = 0.6, c = 0.3, d = 0.5.
  const NonnegMatrix m{{0.2, 0.6}, {0.3, 0.5}};
  const auto s = perron(m);
  const double tr = 0.7, det = 0.1 - 0.18;
  const double rho = (tr + std::sqrt(tr * tr - 4 * det)) / 2;
  EXPECT_NEAR(s.rho, rho, 1e-13);
  EXPECT_NEAR(s.u[0] + s.u[1], 1.0, 1e-14);
  EXPECT_NEAR(s.u[0] * s.v[0] + s.u[1] * s.v[1], 1.0, 1e-14);
  EXPECT_LE(residual_right(m, s), 1e-12);
  EXPECT_LE(residual_left(m, s), 1e-12);
}

TEST(Perron, UniformCoupledMatrix) {
  const auto s = perron(NonnegMatrix{{0.5, 0.5}, {0.5, 0.5}});
  EXPECT_NEAR(s.rho, 1.0, 1e-14);
  EXPECT_NEAR(s.u[0], 0.5, 1e-14);
  EXPECT_NEAR(s.v[0], 1.0, 1e-14);
  EXPECT_NEAR(s.v[1], 1.0, 1e-14);
}

TEST(Perron, NotPrimitiveThrows) {
  EXPECT_THROW(perron(NonnegMatrix{{0, 1}, {1, 0}}), NotPrimitiveError);
}

TEST(Perron, IterationBudgetExhaustedThrows) {
  PerronOptions opt;
  opt.max_iterations = 1;
  opt.residual_tol = 1e-300;
  EXPECT_THROW(perron(NonnegMatrix{{0.2, 0.6}, {0.3, 0.5}}, opt), ConvergenceError);
}

TEST(Perron, AgreesWithDenseEigensolver) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t p = 1 + trial % 6;
    Matrix a(p, p);
    Eigen::MatrixXd e(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) e(i, j) = a(i, j) = unif(gen);
    const auto s = perron(NonnegMatrix(a));
    Eigen::EigenSolver<Eigen::MatrixXd> es(e);
    double best = 0.0;
    for (int k = 0; k < es.eigenvalues().size(); ++k) best = std::max(best, std::abs(es.eigenvalues()[k]));
    EXPECT_NEAR(s.rho, best, 1e-10 * std::max(1.0, best));
    for (double x : s.u) EXPECT_GT(x, 0.0);
    for (double x : s.v) EXPECT_GT(x, 0.0);
  }
}

TEST(Criticality, Classifies) {
  EXPECT_EQ(criticality(NonnegMatrix{{0.5, 0.5}, {0.5, 0.5}}), Criticality::critical);
  EXPECT_EQ(criticality(NonnegMatrix{{0.4, 0.5}, {0.5, 0.4}}), Criticality::subcritical);
  EXPECT_EQ(criticality(NonnegMatrix{{2}}), Criticality::supercritical);
  EXPECT_STREQ(to_string(Criticality::critical), "critical");
}

// Positivity of m^k for k up to the Wielandt bound, by plain boolean products.
TEST(Primitivity, AgreesWithBruteForceOnAllZeroOneMatrices) {
  for (std::size_t p = 1; p <= 4; ++p) {
    const unsigned total = 1u << (p * p);
    const std::size_t bound = (p - 1) * (p - 1) + 1;
    for (unsigned bits = 0; bits < total; ++bits) {
      std::vector<std::vector<int>> a(p, std::vector<int>(p));
      Matrix m(p, p);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
          a[i][j] = (bits >> (i * p + j)) & 1u;
          m(i, j) = a[i][j];
        }
      auto power = a;
      bool expect = false;
      for (std::size_t k = 1; k <= bound && !expect; ++k) {
        bool all = true;
        for (const auto& row : power)
          for (int x : row) all = all && x;
        expect = all;
        std::vector<std::vector<int>> next(p, std::vector<int>(p, 0));
        for (std::size_t i = 0; i < p; ++i)
          for (std::size_t l = 0; l < p; ++l)
            if (power[i][l])
              for (std::size_t j = 0; j < p; ++j) next[i][j] |= a[l][j];
        power = std::move(next);
      }
      ASSERT_EQ(is_primitive(NonnegMatrix(m)), expect) << "p=" << p << " bits=" << bits;
    }
  }
}

TEST(Matrix, OdotSelectsAndIsLinear) {
  const std::vector<Matrix> mats{Matrix{{1, 2}, {3, 4}}, Matrix{{-1, 0.5}, {2, 7}}};
  EXPECT_EQ(odot(Vector{1, 0}, mats), mats[0]);
  EXPECT_EQ(odot(Vector{0, 1}, mats), mats[1]);
  EXPECT_EQ(odot(Vector{0, 0}, mats), Matrix(2, 2));
  const std::vector<Matrix> ids{Matrix::identity(2), Matrix::identity(2)};
  EXPECT_EQ(odot(Vector{2, 3}, ids), 5.0 * Matrix::identity(2));
  const Vector x{0.5, -2}, y{3, 1.25};
  const Matrix lhs = odot(add(x, y), mats);
  const Matrix rhs = odot(x, mats) + odot(y, mats);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(lhs(i, j), rhs(i, j), 1e-15);
  EXPECT_EQ(hadamard(Vector{0, 5}, Vector{7, 0}), (Vector{0, 0}));
  EXPECT_EQ(hadamard(Vector{1, 2}, Vector{1, 1}), (Vector{1, 2}));
  EXPECT_THROW(odot(Vector{1}, mats), DimensionError);
}
