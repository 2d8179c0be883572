#pragma once

#include <cstdint>

namespace mbpm {

inline constexpr double kZeta2 = 1.6449340668482264365;
inline constexpr double kZeta3 = 1.2020569031595942854;

// Σ_{j=1}^{n} j^e for integer e in [-3, 4]. Negative exponents are summed
// directly up to 10⁶ terms; the remainder uses the Euler–Maclaurin expansion.
double power_sum(int e, std::int64_t n);

// Σ_{j=from+1}^{to} j^e for e < 0 by Euler–Maclaurin; intended for from ≥ 10³.
double power_sum_tail(int e, std::int64_t from, std::int64_t to);

}  // namespace mbpm
