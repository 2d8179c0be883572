#include "mbpm/power_sums.hpp"

#include <cmath>

#include "mbpm/error.hpp"

namespace mbpm {

namespace {

constexpr std::int64_t kDirectTerms = 1'000'000;

// Euler–Maclaurin antiderivative of x^e (e < 0), accurate to O(x^(e-3)).
double em_primitive(int e, double x) {
  const double se = static_cast<double>(e);
  const double lead = e == -1 ? std::log(x) : std::pow(x, se + 1.0) / (se + 1.0);
  return lead + 0.5 * std::pow(x, se) + se / 12.0 * std::pow(x, se - 1.0);
}

}  // namespace

double power_sum_tail(int e, std::int64_t from, std::int64_t to) {
  if (to <= from) return 0.0;
  return em_primitive(e, static_cast<double>(to)) - em_primitive(e, static_cast<double>(from));
}

double power_sum(int e, std::int64_t n) {
  if (n <= 0) return 0.0;
  const double x = static_cast<double>(n);
  switch (e) {
    case 0: return x;
    case 1: return x * (x + 1.0) / 2.0;
    case 2: return x * (x + 1.0) * (2.0 * x + 1.0) / 6.0;
    case 3: {
      const double t = x * (x + 1.0) / 2.0;
      return t * t;
    }
    case 4: return x * (x + 1.0) * (2.0 * x + 1.0) * (3.0 * x * x + 3.0 * x - 1.0) / 30.0;
    case -1:
    case -2:
    case -3: {
      const std::int64_t direct = n < kDirectTerms ? n : kDirectTerms;
      double s = 0.0;
      // Smallest terms first.
      for (std::int64_t j = direct; j >= 1; --j) {
        const double r = 1.0 / static_cast<double>(j);
        s += e == -1 ? r : (e == -2 ? r * r : r * r * r);
      }
      if (n > direct) {
        // Σ_{j=d+1}^{n} j^e = F(n) − F(d) + O(d^(e-3)).
        s += power_sum_tail(e, direct, n);
      }
      return s;
    }
    default:
      throw NumericError("power_sum: exponent out of range");
  }
}

}  // namespace mbpm
