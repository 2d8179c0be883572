#include "mbpm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "mbpm/error.hpp"
#include "mbpm/moments.hpp"
#include "mbpm/power_sums.hpp"

namespace mbpm {

namespace {

constexpr double kPmfTol = 1e-12;

void check_pmf(const std::vector<double>& probs, const char* what) {
  double total = 0.0;
  for (double x : probs) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw SpecError(std::string(what) + ": probabilities must be >= 0");
    total += x;
  }
  if (std::abs(total - 1.0) > kPmfTol) {
    std::ostringstream msg;
    msg << what << ": probabilities sum to " << total << ", expected 1";
    throw SpecError(msg.str());
  }
}

std::int64_t poisson_draw(double mean, Stream& rng) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(rng);
}

std::int64_t binomial_draw(std::int64_t n, double p, Stream& rng) {
  if (n <= 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::binomial_distribution<std::int64_t> dist(n, p);
  return dist(rng);
}

// Multinomial counts of n draws over the given probabilities, by sequential
// conditional binomials.
template <typename Visit>
void multinomial(std::int64_t n, std::span<const double> probs, Stream& rng, Visit&& visit) {
  double remaining = 1.0;
  for (std::size_t k = 0; k < probs.size() && n > 0; ++k) {
    std::int64_t count;
    if (k + 1 == probs.size() || probs[k] >= remaining) {
      count = n;
    } else {
      count = binomial_draw(n, probs[k] / remaining, rng);
    }
    if (count > 0) visit(k, count);
    n -= count;
    remaining -= probs[k];
  }
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  const std::int64_t s = a + b;
  if (s > kPopulationCap) throw NumericError("population exceeded the simulation cap");
  return s;
}

std::int64_t checked_mul(std::int64_t n, std::int64_t k) {
  if (k != 0 && n > kPopulationCap / k) throw NumericError("population exceeded the simulation cap");
  return n * k;
}

// Prefix sums of j^-3 used by the inverse-cube sampler; built once.
constexpr std::int64_t kInverseCubeTable = 1 << 20;

const std::vector<double>& inverse_cube_prefix() {
  static std::once_flag once;
  static std::vector<double> prefix;
  std::call_once(once, [] {
    prefix.resize(static_cast<std::size_t>(kInverseCubeTable));
    double s = 0.0;
    for (std::int64_t j = 1; j <= kInverseCubeTable; ++j) {
      const double x = static_cast<double>(j);
      s += 1.0 / (x * x * x);
      prefix[static_cast<std::size_t>(j - 1)] = s;
    }
  });
  return prefix;
}

}  // namespace

// ---------------------------------------------------------------- Marginal

Marginal Marginal::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw SpecError("poisson: mean must be >= 0");
  Marginal m;
  m.kind_ = Kind::poisson;
  m.param_ = mean;
  return m;
}

Marginal Marginal::geometric(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw SpecError("geometric: mean must be >= 0");
  Marginal m;
  m.kind_ = Kind::geometric;
  m.param_ = mean;
  return m;
}

Marginal Marginal::bernoulli(double prob) {
  if (!(prob >= 0.0 && prob <= 1.0)) throw SpecError("bernoulli: prob must lie in [0, 1]");
  Marginal m;
  m.kind_ = Kind::bernoulli;
  m.param_ = prob;
  return m;
}

Marginal Marginal::deterministic(std::int64_t value) {
  if (value < 0) throw SpecError("deterministic: value must be >= 0");
  Marginal m;
  m.kind_ = Kind::deterministic;
  m.value_ = value;
  return m;
}

Marginal Marginal::table(std::vector<double> pmf) {
  if (pmf.empty()) throw SpecError("table: pmf must not be empty");
  check_pmf(pmf, "table");
  Marginal m;
  m.kind_ = Kind::table;
  m.pmf_ = std::move(pmf);
  return m;
}

double Marginal::mean() const {
  switch (kind_) {
    case Kind::poisson:
    case Kind::geometric:
    case Kind::bernoulli:
      return param_;
    case Kind::deterministic:
      return static_cast<double>(value_);
    case Kind::table: {
      double s = 0.0;
      for (std::size_t k = 0; k < pmf_.size(); ++k) s += static_cast<double>(k) * pmf_[k];
      return s;
    }
  }
  return 0.0;
}

double Marginal::variance() const {
  switch (kind_) {
    case Kind::poisson:
      return param_;
    case Kind::geometric:
      return param_ * (1.0 + param_);
    case Kind::bernoulli:
      return param_ * (1.0 - param_);
    case Kind::deterministic:
      return 0.0;
    case Kind::table: {
      const double mu = mean();
      double s = 0.0;
      for (std::size_t k = 0; k < pmf_.size(); ++k) {
        const double d = static_cast<double>(k) - mu;
        s += d * d * pmf_[k];
      }
      return s;
    }
  }
  return 0.0;
}

double Marginal::prob_zero() const {
  switch (kind_) {
    case Kind::poisson: return std::exp(-param_);
    case Kind::geometric: return 1.0 / (1.0 + param_);
    case Kind::bernoulli: return 1.0 - param_;
    case Kind::deterministic: return value_ == 0 ? 1.0 : 0.0;
    case Kind::table: return pmf_[0];
  }
  return 1.0;
}

std::int64_t Marginal::sample_sum(std::int64_t n, Stream& rng) const {
  if (n <= 0) return 0;
  switch (kind_) {
    case Kind::poisson:
      return poisson_draw(static_cast<double>(n) * param_, rng);
    case Kind::geometric: {
      if (param_ == 0.0) return 0;
      std::negative_binomial_distribution<std::int64_t> dist(n, 1.0 / (1.0 + param_));
      return dist(rng);
    }
    case Kind::bernoulli:
      return binomial_draw(n, param_, rng);
    case Kind::deterministic:
      return checked_mul(n, value_);
    case Kind::table: {
      std::int64_t total = 0;
      multinomial(n, pmf_, rng, [&](std::size_t k, std::int64_t count) {
        total = checked_add(total, checked_mul(count, static_cast<std::int64_t>(k)));
      });
      return total;
    }
  }
  return 0;
}

// ------------------------------------------------------------ OffspringLaw

OffspringLaw OffspringLaw::independent(std::vector<Marginal> marginals) {
  if (marginals.empty()) throw SpecError("offspring: need one marginal per type");
  OffspringLaw law;
  law.dim_ = marginals.size();
  law.marginals_ = std::move(marginals);
  return law;
}

OffspringLaw OffspringLaw::joint(std::vector<Atom> atoms) {
  if (atoms.empty()) throw SpecError("offspring: joint law needs at least one atom");
  OffspringLaw law;
  law.dim_ = atoms.front().value.size();
  std::vector<double> probs;
  for (const auto& a : atoms) {
    if (a.value.size() != law.dim_) throw SpecError("offspring: joint atoms differ in dimension");
    for (auto x : a.value)
      if (x < 0) throw SpecError("offspring: joint atoms must be nonnegative");
    probs.push_back(a.prob);
  }
  check_pmf(probs, "offspring");
  law.atoms_ = std::move(atoms);
  return law;
}

Vector OffspringLaw::mean() const {
  Vector mu(dim_, 0.0);
  if (is_joint()) {
    for (const auto& a : atoms_)
      for (std::size_t j = 0; j < dim_; ++j) mu[j] += a.prob * static_cast<double>(a.value[j]);
  } else {
    for (std::size_t j = 0; j < dim_; ++j) mu[j] = marginals_[j].mean();
  }
  return mu;
}

Matrix OffspringLaw::covariance() const {
  Matrix cov(dim_, dim_);
  if (is_joint()) {
    const Vector mu = mean();
    for (const auto& a : atoms_)
      for (std::size_t j = 0; j < dim_; ++j)
        for (std::size_t k = 0; k < dim_; ++k)
          cov(j, k) += a.prob * (static_cast<double>(a.value[j]) - mu[j]) *
                       (static_cast<double>(a.value[k]) - mu[k]);
  } else {
    for (std::size_t j = 0; j < dim_; ++j) cov(j, j) = marginals_[j].variance();
  }
  return cov;
}

double OffspringLaw::prob_nonzero() const {
  if (is_joint()) {
    double zero = 0.0;
    for (const auto& a : atoms_)
      if (std::all_of(a.value.begin(), a.value.end(), [](auto x) { return x == 0; })) zero += a.prob;
    return 1.0 - zero;
  }
  double all_zero = 1.0;
  for (const auto& m : marginals_) all_zero *= m.prob_zero();
  return 1.0 - all_zero;
}

void OffspringLaw::sample_sum(std::int64_t n, Stream& rng, std::span<std::int64_t> out) const {
  if (n <= 0) return;
  if (is_joint()) {
    std::vector<double> probs;
    probs.reserve(atoms_.size());
    for (const auto& a : atoms_) probs.push_back(a.prob);
    multinomial(n, probs, rng, [&](std::size_t k, std::int64_t count) {
      for (std::size_t j = 0; j < dim_; ++j)
        out[j] = checked_add(out[j], checked_mul(count, atoms_[k].value[j]));
    });
    return;
  }
  for (std::size_t j = 0; j < dim_; ++j) out[j] = checked_add(out[j], marginals_[j].sample_sum(n, rng));
}

// ---------------------------------------------------------- ImmigrationLaw

ImmigrationLaw ImmigrationLaw::shifted_poisson(StateFunction mean) {
  ImmigrationLaw law;
  law.kind_ = Kind::shifted_poisson;
  law.mean_ = std::move(mean);
  return law;
}

ImmigrationLaw ImmigrationLaw::deterministic(std::int64_t value) {
  if (value < 1) throw SpecError("immigration: deterministic value must be >= 1");
  ImmigrationLaw law;
  law.kind_ = Kind::deterministic;
  law.value_ = value;
  law.mean_ = StateFunction::constant(static_cast<double>(value));
  return law;
}

ImmigrationLaw ImmigrationLaw::table(std::vector<std::pair<std::int64_t, double>> pmf) {
  if (pmf.empty()) throw SpecError("immigration: table must not be empty");
  std::vector<double> probs;
  double mu = 0.0;
  for (const auto& [k, p] : pmf) {
    if (k < 1) throw SpecError("immigration: table values must be >= 1");
    probs.push_back(p);
    mu += static_cast<double>(k) * p;
  }
  check_pmf(probs, "immigration");
  ImmigrationLaw law;
  law.kind_ = Kind::table;
  law.pmf_ = std::move(pmf);
  law.mean_ = StateFunction::constant(mu);
  return law;
}

double ImmigrationLaw::poisson_rate(double s) const {
  const double a = mean_(s);
  if (!(a >= 1.0 - 1e-12) || !std::isfinite(a)) {
    std::ostringstream msg;
    msg << "immigration: mean " << a << " at size " << s << " is below 1";
    throw SpecError(msg.str());
  }
  return std::max(0.0, a - 1.0);
}

double ImmigrationLaw::mean(double s) const {
  switch (kind_) {
    case Kind::shifted_poisson: return 1.0 + poisson_rate(s);
    case Kind::deterministic: return static_cast<double>(value_);
    case Kind::table: return mean_.coef();
  }
  return 0.0;
}

double ImmigrationLaw::raw_moment(int k, double s) const {
  switch (kind_) {
    case Kind::shifted_poisson: {
      const double l = poisson_rate(s);
      // Raw moments of Poisson(l), then binomial expansion of (1 + P)^k.
      const double m[5] = {1.0, l, l + l * l, l * l * l + 3 * l * l + l,
                           l * l * l * l + 6 * l * l * l + 7 * l * l + l};
      static constexpr double binom[5][5] = {
          {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};
      double out = 0.0;
      for (int j = 0; j <= k; ++j) out += binom[k][j] * m[j];
      return out;
    }
    case Kind::deterministic:
      return std::pow(static_cast<double>(value_), k);
    case Kind::table: {
      double out = 0.0;
      for (const auto& [v, p] : pmf_) out += p * std::pow(static_cast<double>(v), k);
      return out;
    }
  }
  return 0.0;
}

std::int64_t ImmigrationLaw::sample(double s, Stream& rng) const {
  switch (kind_) {
    case Kind::shifted_poisson:
      return 1 + poisson_draw(poisson_rate(s), rng);
    case Kind::deterministic:
      return value_;
    case Kind::table: {
      double u = rng.uniform01();
      for (const auto& [v, p] : pmf_) {
        if (u < p) return v;
        u -= p;
      }
      return pmf_.back().first;
    }
  }
  return 1;
}

void ImmigrationLaw::for_each_atom(double s, const std::function<void(std::int64_t, double)>& visit) const {
  switch (kind_) {
    case Kind::shifted_poisson: {
      const double l = poisson_rate(s);
      if (l == 0.0) {
        visit(1, 1.0);
        return;
      }
      const double sd = std::sqrt(l);
      const auto lo = static_cast<std::int64_t>(std::max(0.0, std::floor(l - 12.0 * sd - 20.0)));
      const auto hi = static_cast<std::int64_t>(std::ceil(l + 12.0 * sd + 40.0));
      for (std::int64_t j = lo; j <= hi; ++j) {
        const double lp = static_cast<double>(j) * std::log(l) - l - std::lgamma(static_cast<double>(j) + 1.0);
        const double p = std::exp(lp);
        if (p > 1e-17) visit(1 + j, p);
      }
      return;
    }
    case Kind::deterministic:
      visit(value_, 1.0);
      return;
    case Kind::table:
      for (const auto& [v, p] : pmf_) visit(v, p);
      return;
  }
}

double ImmigrationLaw::mean_limit() const {
  if (kind_ == Kind::shifted_poisson) return mean_.limit();
  return mean(0.0);
}

double ImmigrationLaw::mean_growth_exponent() const {
  return kind_ == Kind::shifted_poisson ? std::max(0.0, mean_.growth_exponent()) : 0.0;
}

// ----------------------------------------------------------- EmigrationLaw

EmigrationLaw EmigrationLaw::uniform() {
  EmigrationLaw law;
  law.kind_ = Kind::uniform;
  return law;
}

EmigrationLaw EmigrationLaw::truncated_geometric(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw SpecError("emigration: theta must lie in (0, 1]");
  EmigrationLaw law;
  law.kind_ = Kind::truncated_geometric;
  law.theta_ = theta;
  return law;
}

EmigrationLaw EmigrationLaw::inverse_cube() {
  EmigrationLaw law;
  law.kind_ = Kind::inverse_cube;
  return law;
}

EmigrationLaw EmigrationLaw::deterministic(std::int64_t value) {
  if (value < 1) throw SpecError("emigration: deterministic value must be >= 1");
  EmigrationLaw law;
  law.kind_ = Kind::deterministic;
  law.value_ = value;
  return law;
}

double EmigrationLaw::raw_moment(int k, std::int64_t zi) const {
  if (zi <= 0) return 0.0;
  const double z = static_cast<double>(zi);
  switch (kind_) {
    case Kind::uniform:
      return power_sum(k, zi) / z;
    case Kind::truncated_geometric: {
      const double w = 1.0 - theta_;
      double num = 0.0, den = 0.0, weight = 1.0;
      for (std::int64_t j = 1; j <= zi; ++j) {
        const double x = static_cast<double>(j);
        num += weight * std::pow(x, k);
        den += weight;
        weight *= w;
        // The summand decreases once j > k/θ; stop when the geometric tail is negligible.
        if (x > k / theta_ && weight * std::pow(x + 1.0, k) < 1e-18 * theta_ * num) break;
      }
      return num / den;
    }
    case Kind::inverse_cube:
      return power_sum(k - 3, zi) / power_sum(-3, zi);
    case Kind::deterministic:
      return std::pow(static_cast<double>(std::min(value_, zi)), k);
  }
  return 0.0;
}

std::int64_t EmigrationLaw::sample(std::int64_t zi, Stream& rng) const {
  if (zi <= 0) return 0;
  switch (kind_) {
    case Kind::uniform: {
      std::uniform_int_distribution<std::int64_t> dist(1, zi);
      return dist(rng);
    }
    case Kind::truncated_geometric: {
      if (theta_ >= 1.0) return 1;
      const double lw = std::log1p(-theta_);
      const double mass = -std::expm1(static_cast<double>(zi) * lw);  // 1 − w^z
      const double u = rng.uniform01();
      const double j = std::ceil(std::log1p(-u * mass) / lw);
      return std::clamp(static_cast<std::int64_t>(j), std::int64_t{1}, zi);
    }
    case Kind::inverse_cube: {
      const auto& prefix = inverse_cube_prefix();
      const std::int64_t top = std::min(zi, kInverseCubeTable);
      const double head = prefix[static_cast<std::size_t>(top - 1)];
      double total = head;
      if (zi > kInverseCubeTable) total += power_sum_tail(-3, kInverseCubeTable, zi);
      const double u = rng.uniform01() * total;
      if (u < head) {
        auto it = std::upper_bound(prefix.begin(), prefix.begin() + top, u);
        return std::min<std::int64_t>(static_cast<std::int64_t>(it - prefix.begin()) + 1, top);
      }
      // Tail beyond the table, P < 1e-12: continuous inverse of x⁻³ on the range.
      const double a = static_cast<double>(kInverseCubeTable) + 0.5;
      const double b = static_cast<double>(zi) + 0.5;
      const double v = rng.uniform01();
      const double x = 1.0 / std::sqrt(1.0 / (a * a) - v * (1.0 / (a * a) - 1.0 / (b * b)));
      return std::clamp(static_cast<std::int64_t>(std::llround(x)), kInverseCubeTable + 1, zi);
    }
    case Kind::deterministic:
      return std::min(value_, zi);
  }
  return 0;
}

void EmigrationLaw::for_each_atom(std::int64_t zi, const std::function<void(std::int64_t, double)>& visit) const {
  if (zi <= 0) {
    visit(0, 1.0);
    return;
  }
  switch (kind_) {
    case Kind::uniform: {
      const double p = 1.0 / static_cast<double>(zi);
      for (std::int64_t j = 1; j <= zi; ++j) visit(j, p);
      return;
    }
    case Kind::truncated_geometric: {
      const double w = 1.0 - theta_;
      const double mass = theta_ >= 1.0 ? 1.0 : -std::expm1(static_cast<double>(zi) * std::log1p(-theta_));
      double p = theta_ / mass;
      for (std::int64_t j = 1; j <= zi && p > 1e-17; ++j) {
        visit(j, p);
        p *= w;
      }
      return;
    }
    case Kind::inverse_cube: {
      const double norm = power_sum(-3, zi);
      for (std::int64_t j = 1; j <= zi; ++j) {
        const double x = static_cast<double>(j);
        const double p = 1.0 / (x * x * x * norm);
        if (p < 1e-17) break;
        visit(j, p);
      }
      return;
    }
    case Kind::deterministic:
      visit(std::min(value_, zi), 1.0);
      return;
  }
}

double EmigrationLaw::mean_limit() const {
  switch (kind_) {
    case Kind::uniform: return std::numeric_limits<double>::infinity();
    case Kind::truncated_geometric: return 1.0 / theta_;
    case Kind::inverse_cube: return kZeta2 / kZeta3;
    case Kind::deterministic: return static_cast<double>(value_);
  }
  return 0.0;
}

double EmigrationLaw::mean_growth_exponent() const { return kind_ == Kind::uniform ? 1.0 : 0.0; }

// ----------------------------------------------------------- MigrationSpec

MigrationSpec::MigrationSpec(std::vector<TypeMigration> types) : types_(std::move(types)) {
  if (!types_.empty()) weights_.assign(types_.size(), 1.0 / static_cast<double>(types_.size()));
}

MigrationSpec MigrationSpec::none(std::size_t dim) { return MigrationSpec(std::vector<TypeMigration>(dim)); }

void MigrationSpec::set_size_weights(Vector u) {
  if (u.size() != types_.size()) throw DimensionError("migration: size weights have the wrong length");
  weights_ = std::move(u);
}

double MigrationSpec::size(std::span<const std::int64_t> z) const {
  if (z.size() != weights_.size()) throw DimensionError("migration: state has the wrong dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += weights_[i] * static_cast<double>(z[i]);
  return s;
}

MigrationProbabilities MigrationSpec::probabilities(std::size_t i, std::span<const std::int64_t> z) const {
  const double s = size(z);
  const auto& t = types_.at(i);
  MigrationProbabilities out;
  out.q = t.q(s);
  out.r = z[i] > 0 ? t.r(s) : 0.0;
  const bool bad = !(out.q >= 0.0 && out.q <= 1.0) || !(out.r >= 0.0 && out.r <= 1.0) ||
                   out.q + out.r > 1.0 + 1e-12;
  if (bad) {
    std::ostringstream msg;
    msg << "migration[" << i << "]: probabilities q=" << out.q << ", r=" << out.r << " invalid at size " << s;
    throw SpecError(msg.str());
  }
  out.p = std::max(0.0, 1.0 - out.q - out.r);
  return out;
}

// -------------------------------------------------------------- InitialLaw

InitialLaw InitialLaw::deterministic(State z) {
  for (auto x : z)
    if (x < 0) throw SpecError("initial: state must be nonnegative");
  if (z.empty()) throw SpecError("initial: state must not be empty");
  InitialLaw law;
  law.atoms_.push_back({std::move(z), 1.0});
  return law;
}

InitialLaw InitialLaw::table(std::vector<Atom> atoms) {
  if (atoms.empty()) throw SpecError("initial: table must not be empty");
  std::vector<double> probs;
  for (const auto& a : atoms) {
    if (a.value.size() != atoms.front().value.size()) throw SpecError("initial: atoms differ in dimension");
    for (auto x : a.value)
      if (x < 0) throw SpecError("initial: states must be nonnegative");
    probs.push_back(a.prob);
  }
  check_pmf(probs, "initial");
  InitialLaw law;
  law.atoms_ = std::move(atoms);
  return law;
}

std::size_t InitialLaw::dim() const { return atoms_.empty() ? 0 : atoms_.front().value.size(); }

Vector InitialLaw::mean() const {
  Vector mu(dim(), 0.0);
  for (const auto& a : atoms_)
    for (std::size_t j = 0; j < mu.size(); ++j) mu[j] += a.prob * static_cast<double>(a.value[j]);
  return mu;
}

State InitialLaw::sample(Stream& rng) const {
  if (atoms_.size() == 1) return atoms_.front().value;
  double u = rng.uniform01();
  for (const auto& a : atoms_) {
    if (u < a.prob) return a.value;
    u -= a.prob;
  }
  return atoms_.back().value;
}

// --------------------------------------------------------------- ModelSpec

namespace {

void validate_migration(const MigrationSpec& mig) {
  // Probe sizes: powers of ten plus every table breakpoint.
  std::vector<double> sizes = {0.0};
  for (int e = 0; e <= 12; ++e) sizes.push_back(std::pow(10.0, e));
  auto add_points = [&](const StateFunction& f, auto& self) -> void {
    if (f.kind() == StateFunction::Kind::table)
      for (const auto& [x, y] : f.points()) sizes.push_back(std::max(0.0, x));
    if (f.kind() == StateFunction::Kind::clamp) self(f.inner(), self);
  };
  for (const auto& t : mig.types()) {
    add_points(t.q, add_points);
    add_points(t.r, add_points);
    add_points(t.immigration.mean_function(), add_points);
  }
  for (std::size_t i = 0; i < mig.dim(); ++i) {
    const auto& t = mig.type(i);
    const std::string where = "migration[" + std::to_string(i) + "]";
    for (double s : sizes) {
      const double q = t.q(s), r = t.r(s);
      if (!(q >= 0.0 && q <= 1.0)) throw SpecError(where + ".q: probability outside [0, 1]");
      if (!(r >= 0.0 && r <= 1.0)) throw SpecError(where + ".r: probability outside [0, 1]");
      if (q + r > 1.0 + 1e-12) throw SpecError(where + ": q + r exceeds 1");
      if (t.immigration.kind() == ImmigrationLaw::Kind::shifted_poisson) {
        const double a = t.immigration.mean_function()(s);
        if (!(a >= 1.0 - 1e-12) || !std::isfinite(a))
          throw SpecError(where + ".immigration.mean: must be >= 1 for all states");
      }
    }
  }
}

}  // namespace

ModelSpec::ModelSpec(OffspringSpec offspring, MigrationSpec migration, InitialLaw initial,
                     std::optional<DeclaredAsymptotics> asymptotics)
    : dim_(offspring.size()),
      offspring_(std::move(offspring)),
      migration_(std::move(migration)),
      initial_(std::move(initial)),
      asymptotics_(asymptotics),
      mean_(Matrix(1, 1)) {
  if (dim_ == 0) throw SpecError("offspring: at least one type is required");
  for (std::size_t i = 0; i < dim_; ++i)
    if (offspring_[i].dim() != dim_)
      throw SpecError("offspring[" + std::to_string(i) + "]: law has the wrong dimension");
  if (migration_.dim() == 0) migration_ = MigrationSpec::none(dim_);
  if (migration_.dim() != dim_) throw SpecError("migration: one entry per type is required");
  if (initial_.dim() != dim_) throw SpecError("initial: state has the wrong dimension");
  validate_migration(migration_);

  auto moments = offspring_moments(offspring_);
  mean_ = NonnegMatrix(std::move(moments.mean));
  cov_ = std::move(moments.cov);
  if (is_primitive(mean_)) {
    spectral_ = perron(mean_);
    migration_.set_size_weights(spectral_->u);
  } else {
    migration_.set_size_weights(Vector(dim_, 1.0 / static_cast<double>(dim_)));
  }
}

// -------------------------------------------------------------- simulation

std::int64_t l1_norm(std::span<const std::int64_t> z) {
  return std::accumulate(z.begin(), z.end(), std::int64_t{0});
}

std::vector<std::int64_t> sample_migration(const MigrationSpec& spec, std::span<const std::int64_t> z,
                                           Stream& rng) {
  if (z.size() != spec.dim()) throw DimensionError("sample_migration: state has the wrong dimension");
  const double s = spec.size(z);
  std::vector<std::int64_t> m(z.size(), 0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto pr = spec.probabilities(i, z);
    if (pr.q == 0.0 && pr.r == 0.0) continue;
    const double u = rng.uniform01();
    if (u < pr.q) {
      m[i] = spec.type(i).immigration.sample(s, rng);
    } else if (u < pr.q + pr.r) {
      m[i] = -spec.type(i).emigration.sample(z[i], rng);
    }
  }
  return m;
}

State step(const ModelSpec& spec, std::span<const std::int64_t> z, Stream& rng) {
  const auto m = sample_migration(spec.migration(), z, rng);
  State next(spec.dim(), 0);
  for (std::size_t i = 0; i < spec.dim(); ++i) {
    const std::int64_t parents = z[i] + m[i];
    spec.offspring()[i].sample_sum(parents, rng, next);
  }
  return next;
}

Trajectory simulate_path(const ModelSpec& spec, std::size_t n, Stream& rng) {
  Trajectory out;
  out.key = rng.key();
  out.states.reserve(n + 1);
  out.states.push_back(spec.initial().sample(rng));
  for (std::size_t k = 0; k < n; ++k) out.states.push_back(step(spec, out.states.back(), rng));
  return out;
}

Trajectory simulate_path(const ModelSpec& spec, std::size_t n, StreamKey key) {
  Stream rng(key);
  return simulate_path(spec, n, rng);
}

}  // namespace mbpm
