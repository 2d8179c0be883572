#pragma once

#include <memory>
#include <utility>
#include <vector>

namespace mbpm {

// A scalar function of the population state through its size functional
// s = uᵀz. Closed set of forms:
//   constant(c)            c
//   power(c, a)            c·s^a
//   table({(sₖ, yₖ)})      piecewise-linear in s, constant beyond the ends
//   clamp(f, lo, hi)       min(max(f(s), lo), hi)
class StateFunction {
 public:
  enum class Kind { constant, power, table, clamp };

  StateFunction() = default;  // constant 0

  static StateFunction constant(double c);
  static StateFunction power(double coef, double exponent);
  static StateFunction table(std::vector<std::pair<double, double>> points);
  static StateFunction clamp(StateFunction inner, double lo, double hi);

  double operator()(double size) const;

  // Limit as s → ∞ in the extended reals (±inf for divergent powers).
  double limit() const;

  // a with f(s) = Θ(s^a) as s → ∞; -inf when f is eventually zero.
  double growth_exponent() const;

  bool is_constant() const;

  Kind kind() const noexcept { return kind_; }
  double coef() const noexcept { return coef_; }
  double exponent() const noexcept { return exponent_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }
  const StateFunction& inner() const { return *inner_; }

 private:
  Kind kind_ = Kind::constant;
  double coef_ = 0.0;
  double exponent_ = 0.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<std::pair<double, double>> points_;
  std::shared_ptr<const StateFunction> inner_;
};

}  // namespace mbpm
