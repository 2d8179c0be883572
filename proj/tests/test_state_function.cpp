#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "mbpm/error.hpp"
#include "mbpm/state_function.hpp"

using namespace mbpm;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(StateFunction, Forms) {
  EXPECT_DOUBLE_EQ(StateFunction::constant(0.3)(17.0), 0.3);
  EXPECT_DOUBLE_EQ(StateFunction::power(2.0, 0.5)(16.0), 8.0);
  EXPECT_DOUBLE_EQ(StateFunction::power(2.0, 0.5)(0.0), 0.0);
  EXPECT_DOUBLE_EQ(StateFunction::power(2.0, 0.0)(0.0), 2.0);
  const auto t = StateFunction::table({{0, 1}, {10, 3}});
  EXPECT_DOUBLE_EQ(t(-5), 1.0);
  EXPECT_DOUBLE_EQ(t(5), 2.0);
  EXPECT_DOUBLE_EQ(t(50), 3.0);
  const auto c = StateFunction::clamp(StateFunction::power(1.0, 0.5), 1.0, kInf);
  EXPECT_DOUBLE_EQ(c(0.0), 1.0);
  EXPECT_DOUBLE_EQ(c(0.25), 1.0);
  EXPECT_DOUBLE_EQ(c(9.0), 3.0);
}

TEST(StateFunction, TableValidation) {
  EXPECT_THROW(StateFunction::table({}), Error);
  EXPECT_THROW(StateFunction::table({{1, 0}, {1, 2}}), Error);
  // unsorted points are accepted and sorted
  EXPECT_DOUBLE_EQ(StateFunction::table({{2, 0}, {1, 2}})(1.5), 1.0);
}

TEST(StateFunction, LimitsAndGrowth) {
  EXPECT_DOUBLE_EQ(StateFunction::constant(0.4).limit(), 0.4);
  EXPECT_EQ(StateFunction::power(1.0, 0.5).limit(), kInf);
  EXPECT_DOUBLE_EQ(StateFunction::power(3.0, -1.0).limit(), 0.0);
  EXPECT_DOUBLE_EQ(StateFunction::table({{0, 3}, {100, 2}}).limit(), 2.0);
  EXPECT_DOUBLE_EQ(StateFunction::clamp(StateFunction::power(1, 1), 0, 0.5).limit(), 0.5);

  EXPECT_EQ(StateFunction::constant(0.0).growth_exponent(), -kInf);
  EXPECT_DOUBLE_EQ(StateFunction::constant(2.0).growth_exponent(), 0.0);
  EXPECT_DOUBLE_EQ(StateFunction::power(1.0, 0.5).growth_exponent(), 0.5);
  EXPECT_DOUBLE_EQ(StateFunction::clamp(StateFunction::power(1.0, 0.5), 1.0, kInf).growth_exponent(), 0.5);
  EXPECT_DOUBLE_EQ(StateFunction::clamp(StateFunction::power(1.0, 0.5), 0.0, 0.25).growth_exponent(), 0.0);

  EXPECT_TRUE(StateFunction::constant(1).is_constant());
  EXPECT_TRUE(StateFunction::power(1, 0).is_constant());
  EXPECT_FALSE(StateFunction::power(1, 0.5).is_constant());
}
