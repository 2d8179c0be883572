#include "mbpm/state_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mbpm/error.hpp"

namespace mbpm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

StateFunction StateFunction::constant(double c) {
  if (!std::isfinite(c)) throw SpecError("constant: value must be finite");
  StateFunction f;
  f.kind_ = Kind::constant;
  f.coef_ = c;
  return f;
}

StateFunction StateFunction::power(double coef, double exponent) {
  if (!std::isfinite(coef) || !std::isfinite(exponent)) throw SpecError("power: coef and exponent must be finite");
  StateFunction f;
  f.kind_ = Kind::power;
  f.coef_ = coef;
  f.exponent_ = exponent;
  return f;
}

StateFunction StateFunction::table(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw SpecError("table: needs at least one point");
  std::sort(points.begin(), points.end());
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!std::isfinite(points[k].first) || !std::isfinite(points[k].second))
      throw SpecError("table: points must be finite");
    if (k > 0 && points[k].first == points[k - 1].first) throw SpecError("table: duplicate abscissa");
  }
  StateFunction f;
  f.kind_ = Kind::table;
  f.points_ = std::move(points);
  return f;
}

StateFunction StateFunction::clamp(StateFunction inner, double lo, double hi) {
  if (std::isnan(lo) || std::isnan(hi) || lo > hi) throw SpecError("clamp: need lo <= hi");
  StateFunction f;
  f.kind_ = Kind::clamp;
  f.lo_ = lo;
  f.hi_ = hi;
  f.inner_ = std::make_shared<const StateFunction>(std::move(inner));
  return f;
}

double StateFunction::operator()(double s) const {
  switch (kind_) {
    case Kind::constant:
      return coef_;
    case Kind::power:
      if (coef_ == 0.0) return 0.0;
      if (s <= 0.0) {
        if (exponent_ > 0.0) return 0.0;
        if (exponent_ == 0.0) return coef_;
        return coef_ > 0.0 ? kInf : -kInf;
      }
      return coef_ * std::pow(s, exponent_);
    case Kind::table: {
      if (s <= points_.front().first) return points_.front().second;
      if (s >= points_.back().first) return points_.back().second;
      auto hi = std::upper_bound(points_.begin(), points_.end(), s,
                                 [](double x, const auto& p) { return x < p.first; });
      auto lo = std::prev(hi);
      const double w = (s - lo->first) / (hi->first - lo->first);
      return lo->second + w * (hi->second - lo->second);
    }
    case Kind::clamp:
      return std::clamp((*inner_)(s), lo_, hi_);
  }
  return 0.0;
}

double StateFunction::limit() const {
  switch (kind_) {
    case Kind::constant:
      return coef_;
    case Kind::power:
      if (coef_ == 0.0 || exponent_ < 0.0) return 0.0;
      if (exponent_ == 0.0) return coef_;
      return coef_ > 0.0 ? kInf : -kInf;
    case Kind::table:
      return points_.back().second;
    case Kind::clamp:
      return std::clamp(inner_->limit(), lo_, hi_);
  }
  return 0.0;
}

double StateFunction::growth_exponent() const {
  switch (kind_) {
    case Kind::constant:
      return coef_ == 0.0 ? -kInf : 0.0;
    case Kind::power:
      return coef_ == 0.0 ? -kInf : exponent_;
    case Kind::table:
      return points_.back().second == 0.0 ? -kInf : 0.0;
    case Kind::clamp: {
      const double lim = limit();
      if (std::isfinite(lim)) {
        if (lim != 0.0) return 0.0;
        // Clamped to a range containing 0: decays like the inner function.
        return std::min(inner_->growth_exponent(), 0.0);
      }
      return inner_->growth_exponent();
    }
  }
  return 0.0;
}

bool StateFunction::is_constant() const {
  switch (kind_) {
    case Kind::constant: return true;
    case Kind::power: return coef_ == 0.0 || exponent_ == 0.0;
    case Kind::table: return points_.size() == 1;
    case Kind::clamp: return inner_->is_constant() || lo_ == hi_;
  }
  return false;
}

}  // namespace mbpm
