#include "mbpm/limits.hpp"

#include <cmath>
#include <random>

#include "mbpm/classify.hpp"
#include "mbpm/error.hpp"
#include "mbpm/moments.hpp"

namespace mbpm {

std::vector<double> a_seq(const ScalarFunction& hbar, std::size_t n) {
  std::vector<double> a(n + 1);
  a[0] = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double inc = hbar(a[k]);
    if (!(inc > 0.0) || !std::isfinite(inc))
      throw NumericError("a_seq: h(a_" + std::to_string(k) + ") is not a positive finite number");
    a[k + 1] = a[k] + inc;
  }
  return a;
}

ScalarFunction hbar_power(double c_dot_u, double alpha) {
  if (alpha == 0.0) return [c_dot_u](double) { return c_dot_u; };
  return [c_dot_u, alpha](double x) { return c_dot_u * std::pow(x, alpha); };
}

double a_asymptotic(double c_dot_u, double alpha, double n) {
  if (!(alpha < 1.0)) throw ArgumentError("a_asymptotic: alpha must be below 1");
  if (!(c_dot_u > 0.0)) throw ArgumentError("a_asymptotic: c_dot_u must be positive");
  return std::pow(c_dot_u * (1.0 - alpha) * n, 1.0 / (1.0 - alpha));
}

double lambda_n(const LimitParams& p, double n) {
  const double a = p.alpha, b = p.beta;
  if (!(a >= 0.0 && a < 1.0)) throw ArgumentError("lambda_n: alpha must lie in [0, 1)");
  if (!(p.nu > 0.0) || !(p.c_dot_u > 0.0)) throw ArgumentError("lambda_n: nu and c_dot_u must be positive");
  const double edge = 3.0 * a - 1.0;
  if (b < edge - 1e-12 || b > a + 1.0) throw ArgumentError("lambda_n: beta must lie in [3 alpha - 1, alpha + 1]");
  if (!(n > 1.0)) throw ArgumentError("lambda_n: n must exceed 1");
  if (std::abs(b - edge) <= 1e-12) {
    return std::sqrt(p.nu) * std::pow(p.c_dot_u * (1.0 - a), edge / (2.0 * (1.0 - a))) *
           std::pow(n, a / (1.0 - a)) * std::sqrt(std::log(n));
  }
  return std::sqrt(p.nu / (b - edge) * std::pow(p.c_dot_u, b / (1.0 - a)) *
                   std::pow((1.0 - a) * n, (b - a + 1.0) / (1.0 - a)));
}

std::pair<double, double> gamma_limit_params(double alpha, double nu, double c_dot_u) {
  if (!(alpha < 1.0)) throw ArgumentError("gamma_limit_params: alpha must be below 1");
  if (!(nu > 0.0)) throw ArgumentError("gamma_limit_params: nu must be positive");
  if (!(nu < 2.0 * c_dot_u))
    throw InfeasibleError("gamma_limit_params: nu >= 2 u'c, where the process has no unlimited growth");
  const double shape = (2.0 * c_dot_u - nu * alpha) / (nu * (1.0 - alpha));
  const double scale = nu * (1.0 - alpha) * (1.0 - alpha) / 2.0;
  return {shape, scale};
}

double l1_constant(double c_dot_u, double alpha) {
  if (!(alpha < 1.0)) throw ArgumentError("l1_constant: alpha must be below 1");
  if (!(c_dot_u > 0.0)) throw ArgumentError("l1_constant: c_dot_u must be positive");
  return std::pow(c_dot_u * (1.0 - alpha), 1.0 / (1.0 - alpha));
}

LimitParams complete_limit_params(LimitParams p) {
  p.gamma_shape.reset();
  p.gamma_scale.reset();
  p.l1_constant.reset();
  if (p.c_dot_u > 0.0 && p.alpha < 1.0) p.l1_constant = l1_constant(p.c_dot_u, p.alpha);
  if (std::abs(p.beta - (1.0 + p.alpha)) <= 1e-9 && p.nu > 0.0 && p.nu < 2.0 * p.c_dot_u) {
    const auto [k, th] = gamma_limit_params(p.alpha, p.nu, p.c_dot_u);
    p.gamma_shape = k;
    p.gamma_scale = th;
  }
  return p;
}

namespace {

double snap(double e) {
  const double r = std::round(e * 100.0) / 100.0;
  return std::abs(r - e) <= 1e-3 ? r : e;
}

}  // namespace

LimitParams fit_limit_params(const ModelSpec& spec) {
  CriteriaConfig cfg;
  cfg.ray_points = {1e6, 1e8, 1e10, 1e12};
  const auto probes = probe_states(spec, cfg);
  const Vector& u = spec.size_weights();
  std::vector<double> s, uh, s2;
  for (const auto& z : probes) {
    std::vector<double> zd(z.begin(), z.end());
    s.push_back(dot(u, zd));
    uh.push_back(dot(u, migration_mean(spec.migration(), z)));
    s2.push_back(sigma2(spec, u, z));
  }
  // Local slopes at the largest probes are least affected by lower-order terms.
  const std::size_t k = s.size() - 1;
  auto local = [&](const std::vector<double>& y) {
    if (!(y[k] > 0.0) || !(y[k - 1] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return std::log(y[k] / y[k - 1]) / std::log(s[k] / s[k - 1]);
  };
  LimitParams p;
  p.source = "fitted";
  p.alpha = snap(local(uh));
  p.beta = snap(local(s2));
  p.c_dot_u = std::isfinite(p.alpha) ? uh[k] / std::pow(s[k], p.alpha) : 0.0;
  p.nu = std::isfinite(p.beta) ? s2[k] / std::pow(s[k], p.beta) : 0.0;
  if (!std::isfinite(p.alpha)) p.alpha = 0.0;
  if (!std::isfinite(p.beta)) p.beta = 0.0;
  return complete_limit_params(p);
}

LimitParams resolve_limit_params(const ModelSpec& spec) {
  if (const auto& d = spec.asymptotics()) {
    LimitParams p;
    p.alpha = d->alpha;
    p.c_dot_u = d->c_dot_u;
    p.beta = d->beta;
    p.nu = d->nu;
    p.source = "declared";
    return complete_limit_params(p);
  }
  return fit_limit_params(spec);
}

FellerParams feller_params(const ModelSpec& spec) {
  if (!spec.spectral()) throw InfeasibleError("feller_params: mean matrix is not primitive");
  const auto c = check_hypothesis_C(spec);
  if (!c) throw InfeasibleError("feller_params: migration parameters have no finite limits");
  const auto& sp = *spec.spectral();
  FellerParams f;
  for (std::size_t i = 0; i < spec.dim(); ++i) f.drift += sp.u[i] * (c->a[i] * c->q[i] - c->b[i] * c->r[i]);
  const Matrix vs = odot(sp.v, spec.offspring_covariances());
  f.diffusion = quadratic_form(sp.u, vs, sp.u);
  return f;
}

std::vector<double> euler_maruyama(double drift, double diffusion, double T, double dt, Stream& rng, double z0) {
  if (!(dt > 0.0)) throw ArgumentError("euler_maruyama: dt must be positive");
  if (!(T >= 0.0)) throw ArgumentError("euler_maruyama: T must be nonnegative");
  if (!(diffusion >= 0.0)) throw ArgumentError("euler_maruyama: diffusion must be nonnegative");
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  std::vector<double> path(steps + 1);
  path[0] = z0;
  std::normal_distribution<double> normal;
  double z = z0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double h = (k + 1 == steps) ? T - dt * static_cast<double>(k) : dt;
    const double root = std::sqrt(diffusion * std::max(z, 0.0));
    z += drift * h;
    if (root > 0.0) z += root * std::sqrt(h) * normal(rng);
    path[k + 1] = z;
  }
  return path;
}

ScaledPath scaled_path(const Trajectory& traj, std::size_t n, double T, std::size_t points) {
  if (n == 0) throw ArgumentError("scaled_path: n must be positive");
  if (!(T >= 0.0)) throw ArgumentError("scaled_path: T must be nonnegative");
  const double steps = static_cast<double>(n) * T;
  const auto last = static_cast<std::size_t>(std::floor(steps * (1.0 + 1e-12)));
  if (traj.states.size() <= last)
    throw ArgumentError("scaled_path: trajectory has " + std::to_string(traj.states.size()) + " states, needs " +
                        std::to_string(last + 1));
  if (points == 0) points = last + 1;
  ScaledPath out;
  out.n = n;
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < points; ++j) {
    const double t = points == 1 ? 0.0 : T * static_cast<double>(j) / static_cast<double>(points - 1);
    const auto idx = std::min(last, static_cast<std::size_t>(std::floor(static_cast<double>(n) * t * (1.0 + 1e-12))));
    Vector v;
    for (auto x : traj.states[idx]) v.push_back(static_cast<double>(x) * inv);
    out.t.push_back(t);
    out.values.push_back(std::move(v));
  }
  return out;
}

}  // namespace mbpm
