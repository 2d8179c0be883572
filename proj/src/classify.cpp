#include "mbpm/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mbpm/error.hpp"
#include "mbpm/moments.hpp"

namespace mbpm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

double norm1(std::span<const std::int64_t> z) { return static_cast<double>(l1_norm(z)); }

// Slope check: the moment on the left must grow strictly slower than the
// target order on the right.
SlopeCheck slope_check(std::string name, std::vector<double> sizes, std::vector<double> lhs, std::vector<double> rhs,
                       double gap) {
  SlopeCheck c;
  c.name = std::move(name);
  c.lhs = std::move(lhs);
  c.rhs = std::move(rhs);
  const bool rhs_positive =
      std::all_of(c.rhs.begin(), c.rhs.end(), [](double y) { return y > 0.0 && std::isfinite(y); });
  const bool lhs_zero = std::all_of(c.lhs.begin(), c.lhs.end(), [](double y) { return y == 0.0; });
  const auto rs = rhs_positive ? log_log_slope(sizes, c.rhs) : std::nullopt;
  c.rhs_slope = rs.value_or(std::numeric_limits<double>::quiet_NaN());
  if (lhs_zero) {
    c.lhs_slope = -kInf;
    c.passed = rhs_positive;
    return c;
  }
  const auto ls = log_log_slope(sizes, c.lhs);
  c.lhs_slope = ls.value_or(std::numeric_limits<double>::quiet_NaN());
  c.passed = rs && ls && *ls <= *rs - gap;
  return c;
}

std::vector<std::size_t> upper_half(std::size_t n) {
  std::vector<std::size_t> idx;
  for (std::size_t k = n / 2; k < n; ++k) idx.push_back(k);
  return idx;
}

}  // namespace

void CriteriaConfig::validate() const {
  if (!(delta > 0.0 && delta <= 1.0)) throw ArgumentError("criteria.delta: must lie in (0, 1]");
  if (!(alpha_log > 0.0)) throw ArgumentError("criteria.alpha_log: must be positive");
  if (!(alpha_tilde > 1.0 && alpha_tilde <= 2.0)) throw ArgumentError("criteria.alpha_tilde: must lie in (1, 2]");
  if (!(delta1 < 1.0) || !(delta2 < 1.0)) throw ArgumentError("criteria.delta1/delta2: must be below 1");
  if (ray_points.size() < 2) throw ArgumentError("criteria.ray_points: at least two magnitudes are required");
  for (double k : ray_points)
    if (!(k >= 1.0) || !std::isfinite(k)) throw ArgumentError("criteria.ray_points: magnitudes must be >= 1");
  if (!std::is_sorted(ray_points.begin(), ray_points.end()))
    throw ArgumentError("criteria.ray_points: magnitudes must be increasing");
  if (!(margin >= 0.0 && margin < 1.0)) throw ArgumentError("criteria.margin: must lie in [0, 1)");
  if (xi_samples < 10000) throw ArgumentError("criteria.xi_samples: at least 10000 samples are required");
}

std::vector<State> probe_states(const ModelSpec& spec, const CriteriaConfig& config) {
  Vector dir = config.direction;
  if (dir.empty()) dir = spec.spectral() ? spec.spectral()->v : Vector(spec.dim(), 1.0);
  if (dir.size() != spec.dim()) throw DimensionError("criteria.direction: expected one entry per type");
  for (double d : dir)
    if (!(d >= 0.0) || !std::isfinite(d)) throw ArgumentError("criteria.direction: entries must be nonnegative");
  std::vector<State> probes;
  for (double k : config.ray_points) {
    State z(dir.size());
    for (std::size_t i = 0; i < dir.size(); ++i) z[i] = std::llround(k * dir[i]);
    if (l1_norm(z) == 0) throw ArgumentError("criteria.direction: probe rounds to the zero state");
    probes.push_back(std::move(z));
  }
  return probes;
}

bool is_absorbing_zero(const ModelSpec& spec) {
  for (const auto& t : spec.migration().types())
    if (t.q(0.0) != 0.0) return false;
  return true;
}

HypothesisA check_hypothesis_A(const ModelSpec& spec, double tol) {
  HypothesisA a;
  a.primitive = spec.spectral().has_value();
  if (a.primitive) {
    a.rho = spec.spectral()->rho;
    a.holds = std::abs(a.rho - 1.0) <= tol;
  }
  return a;
}

HypothesisB check_hypothesis_B(const ModelSpec& spec, const CriteriaConfig& config) {
  HypothesisB b;
  double e = -kInf;
  for (const auto& t : spec.migration().types()) {
    const double eq = t.q.growth_exponent();
    const double er = t.r.growth_exponent();
    if (eq > -kInf) e = std::max(e, eq + t.immigration.mean_growth_exponent());
    if (er > -kInf) e = std::max(e, er + t.emigration.mean_growth_exponent());
  }
  b.growth_exponent = e;
  if (e < 1.0) {
    b.holds = true;
    b.exact = true;
    b.reason = "migration means grow with exponent " + fmt(e) + " < 1";
  }
  std::vector<State> probes;
  try {
    probes = probe_states(spec, config);
  } catch (const Error& err) {
    if (!b.exact) b.reason = err.what();
    return b;
  }
  for (const auto& z : probes) {
    const Vector h = migration_mean(spec.migration(), z);
    b.sizes.push_back(norm1(z));
    b.ratios.push_back(max_abs(h) / b.sizes.back());
  }
  if (b.exact) return b;
  bool monotone = true;
  for (std::size_t k = 1; k < b.ratios.size(); ++k) monotone = monotone && b.ratios[k] < b.ratios[k - 1];
  const double last = b.ratios.back();
  b.holds = monotone && last < config.hyp_b_threshold;
  b.reason = "max|h|/|z| at the largest probe is " + fmt(last) + (monotone ? " (decreasing)" : " (not decreasing)");
  return b;
}

std::optional<HypothesisC> check_hypothesis_C(const ModelSpec& spec) {
  HypothesisC c;
  for (const auto& t : spec.migration().types()) {
    const double q = t.q.limit();
    const double r = t.r.limit();
    const double a = t.immigration.mean_limit();
    const double b = t.emigration.mean_limit();
    if (!std::isfinite(q) || !std::isfinite(r) || !std::isfinite(a) || !std::isfinite(b)) return std::nullopt;
    if (q < 0.0 || q > 1.0 || r < 0.0 || r > 1.0) return std::nullopt;
    c.q.push_back(q);
    c.r.push_back(r);
    c.a.push_back(a);
    c.b.push_back(b);
  }
  return c;
}

double growth_ratio(const ModelSpec& spec, std::span<const double> u, std::span<const std::int64_t> z) {
  if (u.size() != spec.dim() || z.size() != spec.dim()) throw DimensionError("growth_ratio: dimension mismatch");
  const double s2 = sigma2(spec, u, z);
  if (!(s2 > 0.0)) throw NumericError("growth_ratio: sigma^2(z) is zero (degenerate one-step law)");
  std::vector<double> zd(z.begin(), z.end());
  const Vector h = migration_mean(spec.migration(), z);
  return 2.0 * dot(u, zd) * dot(u, h) / s2;
}

double estimate_xi(const ModelSpec& spec, std::span<const double> u, std::span<const std::int64_t> z, double delta,
                   std::size_t n, Stream& rng) {
  if (n < 10000) throw ArgumentError("estimate_xi: at least 10000 samples are required");
  if (u.size() != spec.dim() || z.size() != spec.dim()) throw DimensionError("estimate_xi: dimension mismatch");
  const double mu = dot(u, cond_mean(spec, z));
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const State next = step(spec, z, rng);
    double s = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) s += u[i] * static_cast<double>(next[i]);
    acc += std::pow(std::abs(s - mu), 2.0 + delta);
  }
  return acc / static_cast<double>(n);
}

bool check_growth_support(const ModelSpec& spec, std::span<const std::int64_t> z) {
  if (z.size() != spec.dim()) throw DimensionError("check_growth_support: dimension mismatch");
  if (l1_norm(z) == 0) throw ArgumentError("check_growth_support: z must be non-null");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] == 0) continue;
    // Immigration counts are at least 1, so P(Iᵢ > 0) = 1 whenever qᵢ > 0.
    if (!(spec.migration().probabilities(i, z).q > 0.0)) return false;
    if (!(spec.offspring()[i].prob_nonzero() > 0.0)) return false;
  }
  return true;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::no_growth: return "no-growth";
    case Verdict::growth_possible: return "growth-possible";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::optional<double> log_log_slope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) {
    if (!(y[k] > 0.0) || !(x[k] > 0.0) || !std::isfinite(y[k])) continue;
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double den = static_cast<double>(n) * sxx - sx * sx;
  if (den <= 0.0) return std::nullopt;
  return (static_cast<double>(n) * sxy - sx * sy) / den;
}

GrowthVerdict classify_growth(const ModelSpec& spec, const CriteriaConfig& config) {
  config.validate();
  GrowthVerdict g;
  const std::size_t p = spec.dim();
  const Vector& u = spec.size_weights();

  g.hypothesis_a = check_hypothesis_A(spec);
  g.checks.push_back({"hypothesis A", g.hypothesis_a.holds,
                      g.hypothesis_a.primitive ? "rho = " + fmt(g.hypothesis_a.rho) : "mean matrix not primitive"});
  if (!g.hypothesis_a.holds) return g;

  g.hypothesis_b = check_hypothesis_B(spec, config);
  g.checks.push_back({"hypothesis B", g.hypothesis_b.holds, g.hypothesis_b.reason});

  g.probes = probe_states(spec, config);
  const std::size_t np = g.probes.size();
  std::vector<Vector> h;
  std::vector<double> uh, s2;
  for (const auto& z : g.probes) {
    std::vector<double> zd(z.begin(), z.end());
    g.sizes.push_back(dot(u, zd));
    h.push_back(migration_mean(spec.migration(), z));
    uh.push_back(dot(u, h.back()));
    s2.push_back(sigma2(spec, u, z));
  }

  // Condition (a): no type gains in expectation from migration at large sizes.
  bool cond_a = true;
  for (const auto& hk : h)
    for (double x : hk) cond_a = cond_a && x <= 0.0;
  g.checks.push_back({"condition (a): h(z) <= 0 at all probes", cond_a, ""});

  const bool degenerate = std::any_of(s2.begin(), s2.end(), [](double x) { return !(x > 0.0); });
  if (!degenerate) {
    for (std::size_t k = 0; k < np; ++k) g.ratio_values.push_back(2.0 * g.sizes[k] * uh[k] / s2[k]);
  } else {
    g.checks.push_back({"sigma^2(z) > 0 at all probes", false, "degenerate one-step law"});
  }

  for (std::size_t k = 0; k < np; ++k) {
    Stream rng(config.seed, k);
    try {
      g.xi.push_back(estimate_xi(spec, u, g.probes[k], config.delta, config.xi_samples, rng));
    } catch (const NumericError&) {
      g.xi.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }

  if (cond_a) {
    g.verdict = Verdict::no_growth;
    g.condition = g.hypothesis_b.holds ? "condition (a)"
                                       : "condition (a) (hypothesis B fails; h <= 0 makes u'Z a supermartingale "
                                         "at large sizes)";
    return g;
  }
  if (!g.hypothesis_b.holds || degenerate) return g;

  const double d = config.delta;
  std::vector<std::vector<double>> phi(p), cen(p);
  for (std::size_t i = 0; i < p; ++i)
    for (const auto& z : g.probes) {
      phi[i].push_back(phi_abs_moment(spec.migration(), z, i, 1.0 + d / 2.0));
      cen[i].push_back(migration_abs_central_moment(spec.migration(), z, i, 2.0 + d));
    }

  // Runs one family of order checks (one target order for both moments and
  // every type); true iff all pass.
  auto order_family = [&](const std::string& tag, const std::vector<double>& target) {
    bool all = true;
    for (std::size_t i = 0; i < p; ++i) {
      const std::string ti = "[" + std::to_string(i) + "]";
      g.slopes.push_back(slope_check(tag + " E|z+M|^(1+d/2)" + ti, g.sizes, phi[i], target, config.slope_gap));
      all = all && g.slopes.back().passed;
      g.slopes.push_back(slope_check(tag + " E|M-h|^(2+d)" + ti, g.sizes, cen[i], target, config.slope_gap));
      all = all && g.slopes.back().passed;
    }
    g.checks.push_back({tag + " order conditions", all, ""});
    return all;
  };

  std::vector<double> t_sigma(np), t_h(np), t_log_h(np), t_log_sigma(np), t_xi(np);
  for (std::size_t k = 0; k < np; ++k) {
    const double s = g.sizes[k];
    const double lg = std::pow(std::log(s), 1.0 + config.alpha_log);
    t_sigma[k] = std::pow(s, 1.0 + d) * s2[k];
    t_h[k] = std::pow(s, 2.0 + d) * uh[k];
    t_log_h[k] = std::pow(s, 1.0 + d) * uh[k] / lg;
    t_log_sigma[k] = s2[k] * std::pow(s, d) / lg;
    t_xi[k] = t_sigma[k];
  }
  g.slopes.push_back(slope_check("diagnostic xi(z) vs (u'z)^(1+d) sigma^2", g.sizes, g.xi, t_xi, config.slope_gap));

  const auto hi = upper_half(np);
  double limsup = -kInf, liminf = kInf;
  for (std::size_t k : hi) {
    limsup = std::max(limsup, g.ratio_values[k]);
    liminf = std::min(liminf, g.ratio_values[k]);
  }

  // Condition (b).
  const bool below = limsup < 1.0 - config.margin;
  g.checks.push_back({"limsup ratio < 1 - margin", below, "limsup estimate " + fmt(limsup)});
  if (below) {
    bool orders = order_family("no-growth", t_sigma);
    if (!orders && std::all_of(uh.begin(), uh.end(), [](double x) { return x > 0.0; }))
      orders = order_family("no-growth (alternative)", t_h);
    if (orders) {
      g.verdict = Verdict::no_growth;
      g.condition = "condition (b)";
      return g;
    }
  }

  // Unlimited growth with positive probability.
  bool support = true;
  for (const auto& z : g.probes) support = support && check_growth_support(spec, z);
  g.checks.push_back({"growth support at probes", support, ""});
  const bool above = liminf > 1.0 + config.margin;
  g.checks.push_back({"liminf ratio > 1 + margin", above, "liminf estimate " + fmt(liminf)});
  const bool positive_drift = std::all_of(uh.begin(), uh.end(), [](double x) { return x > 0.0; });
  if (support && above && positive_drift) {
    bool orders = order_family("growth", t_log_h);
    if (!orders) orders = order_family("growth (alternative)", t_log_sigma);
    if (orders) {
      g.verdict = Verdict::growth_possible;
      g.condition = "liminf ratio > 1 with support and order conditions";
    }
  }
  return g;
}

}  // namespace mbpm
