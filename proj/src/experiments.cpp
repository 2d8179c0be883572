#include "mbpm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mbpm/error.hpp"
#include "mbpm/limits.hpp"
#include "mbpm/moments.hpp"
#include "mbpm/montecarlo.hpp"
#include "mbpm/spec_io.hpp"

namespace mbpm {

using nlohmann::json;

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string now_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

// Non-finite numbers are not representable in JSON; they are written as strings.
json real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json reals(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(real(x));
  return a;
}

// Accumulates the assertion list of one suite.
class Assertions {
 public:
  void add(const std::string& name, bool passed, double value, double threshold, const std::string& relation) {
    list_.push_back({{"name", name},
                     {"passed", passed},
                     {"value", real(value)},
                     {"threshold", real(threshold)},
                     {"relation", relation}});
    all_ = all_ && passed;
  }
  void add_flag(const std::string& name, bool passed) {
    list_.push_back({{"name", name}, {"passed", passed}});
    all_ = all_ && passed;
  }
  json list() const { return list_; }
  bool all() const { return all_; }

 private:
  json list_ = json::array();
  bool all_ = true;
};

struct SuiteOutput {
  json parameters = json::object();
  json thresholds = json::object();
  json results = json::object();
  Assertions assertions;
  std::vector<Artifact> artifacts;
};

double threshold(const ExperimentConfig& cfg, const std::string& key, double fallback) {
  auto it = cfg.thresholds.find(key);
  return it == cfg.thresholds.end() ? fallback : it->second;
}

std::size_t horizon(const ExperimentConfig& cfg, std::size_t fallback) { return cfg.n.value_or(fallback); }
std::size_t reps(const ExperimentConfig& cfg, std::size_t fallback) { return cfg.replicates.value_or(fallback); }

CriteriaConfig criteria(const ExperimentConfig& cfg) {
  CriteriaConfig c;
  if (!cfg.probe_magnitudes.empty()) c.ray_points = cfg.probe_magnitudes;
  c.seed = cfg.seed;
  return c;
}

double expected_norm(const ModelSpec& spec) {
  const Vector mu = spec.initial().mean();
  return std::accumulate(mu.begin(), mu.end(), 0.0);
}

double u_dot(const Vector& u, const State& z) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += u[i] * static_cast<double>(z[i]);
  return s;
}

// TSV of the sample against a reference CDF at (up to) 500 evenly spaced
// order statistics.
std::string cdf_table(std::vector<double> sample, const Cdf& reference) {
  std::sort(sample.begin(), sample.end());
  std::ostringstream os;
  os << "x\tempirical\treference\n";
  const std::size_t n = sample.size();
  const std::size_t rows = std::min<std::size_t>(n, 500);
  for (std::size_t k = 0; k < rows; ++k) {
    const std::size_t i = rows == 1 ? n - 1 : k * (n - 1) / (rows - 1);
    os << num(sample[i]) << '\t' << num(static_cast<double>(i + 1) / static_cast<double>(n)) << '\t'
       << num(reference(sample[i])) << '\n';
  }
  return os.str();
}

std::string terminal_table(const Ensemble& e) {
  std::ostringstream os;
  os << "replicate";
  const std::size_t p = e.terminal.empty() ? 0 : e.terminal.front().size();
  for (std::size_t i = 0; i < p; ++i) os << "\tz" << i;
  os << "\tpath_max\n";
  for (std::size_t r = 0; r < e.replicates; ++r) {
    os << r;
    for (auto x : e.terminal[r]) os << '\t' << x;
    os << '\t' << e.path_max[r] << '\n';
  }
  return os.str();
}

json ensemble_json(const Ensemble& e) {
  return {{"n", e.n}, {"replicates", e.replicates}, {"seed", e.seed}, {"spec_digest", e.spec_digest}};
}

json explosion_json(const ExplosionEstimate& x) {
  return {{"threshold", x.threshold}, {"count", x.count},     {"replicates", x.replicates},
          {"fraction", x.fraction},   {"ci_low", x.ci_low}, {"ci_high", x.ci_high}};
}

json limit_params_json(const LimitParams& p) {
  json j = {{"alpha", p.alpha}, {"c_dot_u", real(p.c_dot_u)}, {"beta", p.beta}, {"nu", real(p.nu)}, {"source", p.source}};
  if (p.gamma_shape) j["gamma_shape"] = *p.gamma_shape;
  if (p.gamma_scale) j["gamma_scale"] = *p.gamma_scale;
  if (p.l1_constant) j["l1_constant"] = *p.l1_constant;
  return j;
}

void require_primitive(const ModelSpec& spec, const std::string& suite) {
  if (!spec.spectral()) throw InfeasibleError(suite + ": the offspring mean matrix is not primitive");
}

// Selects the normalized statistic for replicates whose uᵀZ_n exceeds
// eps·a_n, the finite-horizon stand-in for the unlimited-growth event.
struct Conditioned {
  std::vector<double> values;
  std::size_t kept = 0;
  double a_n = 0.0;
};

Conditioned condition_on_growth(const ModelSpec& spec, const Ensemble& e, const LimitParams& lp, double eps,
                                const std::function<double(double)>& transform) {
  Conditioned c;
  c.a_n = a_seq(hbar_power(lp.c_dot_u, lp.alpha), e.n).back();
  const Vector& u = spec.size_weights();
  for (const auto& z : e.terminal) {
    const double s = u_dot(u, z);
    if (s > eps * c.a_n) c.values.push_back(transform(s));
  }
  c.kept = c.values.size();
  return c;
}

// ------------------------------------------------------------------ suites

void suite_moments(const ModelSpec& spec, const ExperimentConfig& cfg, SuiteOutput& out) {
  State z;
  if (cfg.state) {
    z = *cfg.state;
  } else if (spec.initial().is_deterministic()) {
    z = spec.initial().atoms().front().value;
  } else {
    throw ArgumentError("moments: a state is required when the initial law is random");
  }
  if (z.size() != spec.dim()) throw ArgumentError("moments: state has the wrong dimension");
  const std::size_t n = reps(cfg, 1'000'000);
  const double bands = threshold(cfg, "se_bands", 4.0);
  out.parameters = {{"state", z}, {"samples", n}};
  out.thresholds = {{"se_bands", bands}};

  const MomentReport exact = moment_report(spec, z);
  const MomentCheck mc = moment_check(spec, z, n, cfg.seed, cfg.workers);
  out.results["exact"] = {{"h", exact.h},         {"cond_mean", exact.cond_mean}, {"cond_cov", matrix_json(exact.cond_cov)},
                          {"var_m", matrix_json(exact.var_m)}, {"sigma2", exact.sigma2},       {"kappa", exact.kappa}};
  out.results["empirical"] = {{"mean", mc.mean},
                              {"mean_se", mc.mean_se},
                              {"cov", matrix_json(mc.cov)},
                              {"cov_se", matrix_json(mc.cov_se)},
                              {"max_z_score", real(mc.max_z_score)}};

  std::ostringstream tsv;
  tsv << "quantity\ti\tj\texact\tempirical\tse\n";
  bool ok = true;
  for (std::size_t i = 0; i < z.size(); ++i) {
    tsv << "mean\t" << i << "\t-\t" << num(mc.exact_mean[i]) << '\t' << num(mc.mean[i]) << '\t' << num(mc.mean_se[i])
        << '\n';
    ok = ok && (mc.mean_se[i] == 0.0 ? std::abs(mc.mean[i] - mc.exact_mean[i]) <= 1e-9 * std::max(1.0, std::abs(mc.exact_mean[i]))
                                     : std::abs(mc.mean[i] - mc.exact_mean[i]) <= bands * mc.mean_se[i]);
  }
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = 0; j < z.size(); ++j) {
      tsv << "cov\t" << i << '\t' << j << '\t' << num(mc.exact_cov(i, j)) << '\t' << num(mc.cov(i, j)) << '\t'
          << num(mc.cov_se(i, j)) << '\n';
      const double d = std::abs(mc.cov(i, j) - mc.exact_cov(i, j));
      ok = ok && (mc.cov_se(i, j) == 0.0 ? d <= 1e-9 * std::max(1.0, std::abs(mc.exact_cov(i, j)))
                                         : d <= bands * mc.cov_se(i, j));
    }
  out.assertions.add("all entries within se_bands standard errors", ok, mc.max_z_score, bands, "<=");
  out.artifacts.push_back({"moments.tsv", tsv.str()});
}

void classify_corroboration(const ModelSpec& spec, const ExperimentConfig& cfg, const GrowthVerdict& g,
                            SuiteOutput& out) {
  const std::size_t n = horizon(cfg, 500), R = reps(cfg, 2000);
  const double K = threshold(cfg, "K", 100.0 * expected_norm(spec) + 100.0);
  const double max_fraction = threshold(cfg, "max_fraction", 0.005);
  const double growth_factor = threshold(cfg, "growth_factor", 10.0);
  const double min_growth = threshold(cfg, "min_growth_fraction", 0.05);
  out.parameters["n"] = n;
  out.parameters["replicates"] = R;
  out.thresholds["K"] = K;
  out.thresholds["max_fraction"] = max_fraction;
  out.thresholds["growth_factor"] = growth_factor;
  out.thresholds["min_growth_fraction"] = min_growth;

  EnsembleOptions opt;
  opt.workers = cfg.workers;
  const Ensemble e = run_ensemble(spec, n, R, cfg.seed, opt);
  out.results["ensemble"] = ensemble_json(e);
  const auto terminal = estimate_explosion(e, K);
  const auto along = estimate_explosion(e, K, true);
  const auto grown = estimate_explosion(e, growth_factor * expected_norm(spec));
  out.results["exceed_K_terminal"] = explosion_json(terminal);
  out.results["exceed_K_along_path"] = explosion_json(along);
  out.results["grown_by_factor"] = explosion_json(grown);
  out.artifacts.push_back({"terminal.tsv", terminal_table(e)});

  out.assertions.add_flag("verdict decided", g.verdict != Verdict::inconclusive);
  if (g.verdict == Verdict::no_growth)
    out.assertions.add("fraction with |Z_n| > K", terminal.fraction <= max_fraction, terminal.fraction, max_fraction,
                       "<=");
  if (g.verdict == Verdict::growth_possible)
    out.assertions.add("fraction with |Z_n| > growth_factor * E|Z_0|", grown.fraction >= min_growth, grown.fraction,
                       min_growth, ">=");
}

void suite_classify(const ModelSpec& spec, const ExperimentConfig& cfg, SuiteOutput& out) {
  const CriteriaConfig cc = criteria(cfg);
  out.parameters["probe_magnitudes"] = cc.ray_points;
  const GrowthVerdict g = classify_growth(spec, cc);
  out.results["verdict"] = to_json(g);
  out.results["absorbing_zero"] = is_absorbing_zero(spec);
  if (auto c = check_hypothesis_C(spec)) out.results["hypothesis_C"] = {{"a", c->a}, {"b", c->b}, {"q", c->q}, {"r", c->r}};
  else out.results["hypothesis_C"] = nullptr;
  classify_corroboration(spec, cfg, g, out);
}

Ensemble limit_ensemble(const ModelSpec& spec, const ExperimentConfig& cfg, std::size_t n, std::size_t R,
                        SuiteOutput& out, std::vector<std::size_t> snapshots = {}) {
  EnsembleOptions opt;
  opt.workers = cfg.workers;
  opt.snapshot_steps = std::move(snapshots);
  out.parameters["n"] = n;
  out.parameters["replicates"] = R;
  Ensemble e = run_ensemble(spec, n, R, cfg.seed, opt);
  out.results["ensemble"] = ensemble_json(e);
  out.artifacts.push_back({"terminal.tsv", terminal_table(e)});
  return e;
}

void suite_gamma(const ModelSpec& spec, const ExperimentConfig& cfg, SuiteOutput& out) {
  require_primitive(spec, "gamma-limit");
  const LimitParams lp = resolve_limit_params(spec);
  out.parameters["limit_params"] = limit_params_json(lp);
  if (!lp.gamma_shape) {
    if (std::abs(lp.beta - (1.0 + lp.alpha)) > 1e-9)
      throw InfeasibleError("gamma-limit: requires beta = 1 + alpha (have alpha = " + num(lp.alpha) +
                            ", beta = " + num(lp.beta) + ")");
    throw InfeasibleError("gamma-limit: nu = " + num(lp.nu) + " >= 2 u'c = " + num(2.0 * lp.c_dot_u) +
                          "; unlimited growth has probability zero in this regime");
  }
  const double ks_max = threshold(cfg, "ks", 0.05);
  const double eps = threshold(cfg, "event_eps", 0.01);
  out.thresholds = {{"ks", ks_max}, {"event_eps", eps}};
  const std::size_t n = horizon(cfg, 1000);
  const Ensemble e = limit_ensemble(spec, cfg, n, reps(cfg, 5000), out);

  const double scale_n = std::pow(static_cast<double>(n), 1.0 / (1.0 - lp.alpha));
  const auto c = condition_on_growth(spec, e, lp, eps, [&](double s) { return s / scale_n; });
  const double shape = *lp.gamma_shape, scale = *lp.gamma_scale, expo = 1.0 - lp.alpha;
  const Cdf ref = [=](double x) { return x <= 0.0 ? 0.0 : gamma_cdf(std::pow(x, expo), shape, scale); };
  const double d = c.values.empty() ? 1.0 : ks_statistic(c.values, ref);
  out.results["statistic"] = "u'Z_n / n^(1/(1-alpha))";
  out.results["conditioning"] = {{"event", "u'Z_n > event_eps * a_n"}, {"a_n", c.a_n}, {"kept", c.kept}};
  out.results["reference"] = {{"law", "Z with Z^(1-alpha) ~ Gamma"}, {"shape", shape}, {"scale", scale}};
  out.results["ks"] = d;
  out.assertions.add("KS distance to the gamma limit", d <= ks_max, d, ks_max, "<=");
  out.artifacts.push_back({"cdf.tsv", cdf_table(c.values, ref)});
}

void suite_normal(const ModelSpec& spec, const ExperimentConfig& cfg, SuiteOutput& out) {
  require_primitive(spec, "normal-limit");
  const LimitParams lp = resolve_limit_params(spec);
  out.parameters["limit_params"] = limit_params_json(lp);
  if (!(lp.alpha > 0.0 && lp.alpha < 1.0) || !(lp.beta < lp.alpha + 1.0) || lp.beta < 3.0 * lp.alpha - 1.0 - 1e-12 ||
      !(lp.c_dot_u > 0.0))
    throw InfeasibleError("normal-limit: requires 0 < alpha < 1, 3 alpha - 1 <= beta < alpha + 1 and u'c > 0 (have alpha = " +
                          num(lp.alpha) + ", beta = " + num(lp.beta) + ")");
  const double ks_max = threshold(cfg, "ks", 0.07);
  const double eps = threshold(cfg, "event_eps", 0.01);
  out.thresholds = {{"ks", ks_max}, {"event_eps", eps}};
  const std::size_t n = horizon(cfg, 2000);
  const Ensemble e = limit_ensemble(spec, cfg, n, reps(cfg, 3000), out);

  const double lam = lambda_n(lp, static_cast<double>(n));
  const double a_n = a_seq(hbar_power(lp.c_dot_u, lp.alpha), n).back();
  const auto c = condition_on_growth(spec, e, lp, eps, [&](double s) { return (s - a_n) / lam; });
  const double d = c.values.empty() ? 1.0 : ks_statistic(c.values, normal_cdf);

  // Order exponents δ₁, δ₂ estimated along the probe ray.
  const CriteriaConfig cc = criteria(cfg);
  const auto probes = probe_states(spec, cc);
  std::vector<double> sizes, h_max, v_max;
  for (const auto& z : probes) {
    sizes.push_back(u_dot(spec.size_weights(), z));
    const Vector h = migration_mean(spec.migration(), z);
    h_max.push_back(max_abs(h));
    double m = 0.0;
    for (std::size_t i = 0; i < spec.dim(); ++i)
      m = std::max({m, static_cast<double>(z[i]) + h[i],
                    migration_abs_central_moment(spec.migration(), z, i, cc.alpha_tilde)});
    v_max.push_back(m);
  }
  const auto s1 = log_log_slope(sizes, h_max);
  const auto s2 = log_log_slope(sizes, v_max);
  const double delta1 = s1.value_or(-std::numeric_limits<double>::infinity());
  const double delta2 = s2 ? *s2 / cc.alpha_tilde : -std::numeric_limits<double>::infinity();
  const double bound = (lp.beta - lp.alpha + 1.0) / 2.0;

  out.results["statistic"] = "(u'Z_n - a_n) / Lambda_n";
  out.results["a_n"] = a_n;
  out.results["lambda_n"] = lam;
  out.results["lambda_branch"] = std::abs(lp.beta - (3.0 * lp.alpha - 1.0)) <= 1e-12 ? "log" : "power";
  out.results["conditioning"] = {{"event", "u'Z_n > event_eps * a_n"}, {"kept", c.kept}};
  out.results["order_exponents"] = {{"probe_magnitudes", cc.ray_points},
                                    {"delta1", real(delta1)},
                                    {"delta2", real(delta2)},
                                    {"alpha_tilde", cc.alpha_tilde},
                                    {"bound", bound},
                                    {"within_bound", std::max(delta1, delta2) < bound}};
  out.results["ks"] = d;
  out.assertions.add("KS distance to the standard normal", d <= ks_max, d, ks_max, "<=");
  out.artifacts.push_back({"cdf.tsv", cdf_table(c.values, normal_cdf)});
}

void suite_l1(const ModelSpec& spec, const ExperimentConfig& cfg, SuiteOutput& out) {
  require_primitive(spec, "l1-limit");
  const LimitParams lp = resolve_limit_params(spec);
  out.parameters["limit_params"] = limit_params_json(lp);
  if (!(lp.alpha > 0.0 && lp.alpha < 1.0) || !(lp.beta < lp.alpha + 1.0) || !lp.l1_constant)
    throw InfeasibleError("l1-limit: requires 0 < alpha < 1, beta < alpha + 1 and u'c > 0 (have alpha = " +
                          num(lp.alpha) + ", beta = " + num(lp.beta) + ")");
  const double tol = threshold(cfg, "rel_tol", 0.10);
  const double eps = threshold(cfg, "event_eps", 0.01);
  out.thresholds = {{"rel_tol", tol}, {"event_eps", eps}};
  const std::size_t n = horizon(cfg, 2000);
  const Ensemble e = limit_ensemble(spec, cfg, n, reps(cfg, 2000), out);

  const double norm = std::pow(static_cast<double>(n), 1.0 / (lp.alpha - 1.0));
  const auto c = condition_on_growth(spec, e, lp, eps, [&](double s) { return s * norm; });
  const double C = *lp.l1_constant;
  double mean = 0.0, l1 = 0.0;
  for (double x : c.values) {
    mean += x;
    l1 += std::abs(x - C);
  }
  if (!c.values.empty()) {
    mean /= static_cast<double>(c.values.size());
    l1 /= static_cast<double>(c.values.size());
  }
  const double rel = c.values.empty() ? std::numeric_limits<double>::infinity() : std::abs(mean - C) / C;
  out.results["statistic"] = "n^(1/(alpha-1)) u'Z_n";
  out.results["conditioning"] = {{"event", "u'Z_n > event_eps * a_n"}, {"kept", c.kept}};
  out.results["l1_constant"] = C;
  out.results["sample_mean"] = mean;
  out.results["mean_abs_deviation"] = l1;
  out.results["relative_error"] = real(rel);
  out.assertions.add("relative error of the sample mean", rel <= tol, rel, tol, "<=");
  out.artifacts.push_back({"cdf.tsv", cdf_table(c.values, [C](double x) { return x < C ? 0.0 : 1.0; })});
}

std::string fan_row(double t, std::vector<double> xs) {
  std::ostringstream os;
  os << num(t);
  for (double q : {0.05, 0.25, 0.5, 0.75, 0.95}) os << '\t' << num(quantile(xs, q));
  return os.str();
}

void suite_feller(const ModelSpec& spec, const ExperimentConfig& cfg, SuiteOutput& out) {
  require_primitive(spec, "feller");
  const FellerParams fp = feller_params(spec);
  const double ks_max = threshold(cfg, "ks", 0.05);
  const double T = cfg.time, dt = cfg.dt;
  if (!(T > 0.0) || !(dt > 0.0)) throw ArgumentError("feller: time and dt must be positive");
  out.thresholds = {{"ks", ks_max}};
  out.parameters["drift"] = fp.drift;
  out.parameters["diffusion"] = fp.diffusion;
  out.parameters["time"] = T;
  out.parameters["dt"] = dt;
  const std::size_t n = horizon(cfg, 500), R = reps(cfg, 2000);

  constexpr std::size_t kGrid = 51;
  std::vector<std::size_t> steps;
  std::vector<double> grid;
  for (std::size_t j = 0; j < kGrid; ++j) {
    const double t = T * static_cast<double>(j) / (kGrid - 1);
    grid.push_back(t);
    steps.push_back(static_cast<std::size_t>(std::floor(static_cast<double>(n) * t * (1.0 + 1e-12))));
  }
  const std::size_t last = steps.back();
  const Ensemble e = limit_ensemble(spec, cfg, last, R, out, steps);
  out.parameters["n"] = n;

  const Vector& u = spec.size_weights();
  const double inv = 1.0 / static_cast<double>(n);
  // Snapshot index of each grid point after deduplication of equal steps.
  auto snap_index = [&](std::size_t step) {
    return static_cast<std::size_t>(std::lower_bound(e.snapshot_steps.begin(), e.snapshot_steps.end(), step) -
                                    e.snapshot_steps.begin());
  };
  std::vector<double> sim;
  for (std::size_t r = 0; r < R; ++r) sim.push_back(u_dot(u, e.terminal[r]) * inv);

  // Reference diffusion paths on their own streams.
  const std::uint64_t em_base = std::uint64_t{1} << 40;
  std::vector<std::vector<double>> em_paths(R);
  parallel_for(R, cfg.workers, [&](std::size_t r) {
    Stream rng(cfg.seed, em_base + r);
    em_paths[r] = euler_maruyama(fp.drift, fp.diffusion, T, dt, rng);
  });
  std::vector<double> em;
  for (const auto& p : em_paths) em.push_back(p.back());

  const double d = ks_two_sample(sim, em);
  out.results["statistic"] = "u'Z_floor(nT) / n";
  out.results["ks_two_sample"] = d;
  out.assertions.add("two-sample KS distance to Euler-Maruyama samples", d <= ks_max, d, ks_max, "<=");
  Cdf exact;
  if (fp.drift > 0.0 && fp.diffusion > 0.0) {
    const double shape = 2.0 * fp.drift / fp.diffusion, scale = fp.diffusion * T / 2.0;
    exact = [=](double x) { return gamma_cdf(x, shape, scale); };
    out.results["exact_marginal"] = {{"law", "Gamma"}, {"shape", shape}, {"scale", scale},
                                     {"ks_simulation", ks_statistic(sim, exact)},
                                     {"ks_euler_maruyama", ks_statistic(em, exact)}};
  }

  std::ostringstream cdf;
  cdf << "x\tsimulation\teuler_maruyama\n";
  std::vector<double> pooled = sim;
  pooled.insert(pooled.end(), em.begin(), em.end());
  std::sort(pooled.begin(), pooled.end());
  std::vector<double> ss = sim, es = em;
  std::sort(ss.begin(), ss.end());
  std::sort(es.begin(), es.end());
  const std::size_t rows = std::min<std::size_t>(pooled.size(), 500);
  for (std::size_t k = 0; k < rows; ++k) {
    const double x = pooled[k * (pooled.size() - 1) / std::max<std::size_t>(rows - 1, 1)];
    const auto fs = static_cast<double>(std::upper_bound(ss.begin(), ss.end(), x) - ss.begin()) / ss.size();
    const auto fe = static_cast<double>(std::upper_bound(es.begin(), es.end(), x) - es.begin()) / es.size();
    cdf << num(x) << '\t' << num(fs) << '\t' << num(fe) << '\n';
  }
  out.artifacts.push_back({"cdf.tsv", cdf.str()});

  std::ostringstream fan;
  fan << "t\tsource\tq05\tq25\tq50\tq75\tq95\n";
  for (std::size_t j = 0; j < kGrid; ++j) {
    std::vector<double> xs;
    for (std::size_t r = 0; r < R; ++r) xs.push_back(u_dot(u, e.snapshots[r][snap_index(steps[j])]) * inv);
    const std::string row = fan_row(grid[j], xs);
    fan << row.substr(0, row.find('\t')) << "\tsimulation" << row.substr(row.find('\t')) << '\n';
  }
  for (std::size_t j = 0; j < kGrid; ++j) {
    const auto k = static_cast<std::size_t>(std::llround(grid[j] / dt));
    std::vector<double> xs;
    for (const auto& p : em_paths) xs.push_back(p[std::min(k, p.size() - 1)]);
    const std::string row = fan_row(grid[j], xs);
    fan << row.substr(0, row.find('\t')) << "\teuler_maruyama" << row.substr(row.find('\t')) << '\n';
  }
  out.artifacts.push_back({"fan.tsv", fan.str()});

  const Trajectory path = simulate_path(spec, last, StreamKey{cfg.seed, 0});
  const ScaledPath sp = scaled_path(path, n, T);
  std::ostringstream sps;
  sps << 't';
  for (std::size_t i = 0; i < spec.dim(); ++i) sps << "\tz" << i;
  sps << '\n';
  for (std::size_t j = 0; j < sp.t.size(); ++j) {
    sps << num(sp.t[j]);
    for (double x : sp.values[j]) sps << '\t' << num(x);
    sps << '\n';
  }
  out.artifacts.push_back({"scaled_path.tsv", sps.str()});
}

void suite_explosion(const ModelSpec& spec, const ExperimentConfig& cfg, SuiteOutput& out) {
  const std::size_t n = horizon(cfg, 500), R = reps(cfg, 2000);
  const double K = threshold(cfg, "K", 100.0 * expected_norm(spec) + 100.0);
  out.thresholds["K"] = K;
  const Ensemble e = limit_ensemble(spec, cfg, n, R, out);
  const auto terminal = estimate_explosion(e, K);
  const auto along = estimate_explosion(e, K, true);
  out.results["terminal"] = explosion_json(terminal);
  out.results["along_path"] = explosion_json(along);
  json curve = json::array();
  std::ostringstream tsv;
  tsv << "K\tfraction\tci_low\tci_high\n";
  for (double k = 1.0; k <= std::max(10.0 * K, 10.0); k *= 10.0) {
    const auto x = estimate_explosion(e, k);
    curve.push_back({{"K", k}, {"fraction", x.fraction}});
    tsv << num(k) << '\t' << num(x.fraction) << '\t' << num(x.ci_low) << '\t' << num(x.ci_high) << '\n';
  }
  out.results["curve"] = curve;
  out.artifacts.push_back({"explosion.tsv", tsv.str()});
  if (auto it = cfg.thresholds.find("max_fraction"); it != cfg.thresholds.end()) {
    out.thresholds["max_fraction"] = it->second;
    out.assertions.add("fraction with |Z_n| > K", terminal.fraction <= it->second, terminal.fraction, it->second, "<=");
  }
  if (auto it = cfg.thresholds.find("min_fraction"); it != cfg.thresholds.end()) {
    out.thresholds["min_fraction"] = it->second;
    out.assertions.add("fraction with |Z_n| > K", terminal.fraction >= it->second, terminal.fraction, it->second, ">=");
  }
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"moments", "classify", "gamma-limit", "normal-limit",
                                                 "l1-limit", "feller",   "explosion"};
  return names;
}

ExperimentConfig parse_experiment_config(const json& doc) {
  if (!doc.is_object()) throw SpecError("config: expected an object");
  ExperimentConfig c;
  auto field = [&](const char* key) -> const json* {
    auto it = doc.find(key);
    return it == doc.end() || it->is_null() ? nullptr : &*it;
  };
  auto unsigned_int = [&](const char* key) -> std::optional<std::uint64_t> {
    const json* j = field(key);
    if (!j) return std::nullopt;
    if (!j->is_number_unsigned() && !(j->is_number_integer() && j->get<std::int64_t>() >= 0))
      throw SpecError(std::string("config.") + key + ": expected a nonnegative integer");
    return j->get<std::uint64_t>();
  };
  auto real_field = [&](const char* key) -> std::optional<double> {
    const json* j = field(key);
    if (!j) return std::nullopt;
    if (!j->is_number()) throw SpecError(std::string("config.") + key + ": expected a number");
    return j->get<double>();
  };
  const json* suite = field("suite");
  if (!suite) throw SpecError("config.suite: required field missing");
  if (!suite->is_string()) throw SpecError("config.suite: expected a string");
  c.suite = suite->get<std::string>();
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), c.suite) == names.end())
    throw SpecError("config.suite: unknown suite '" + c.suite + "'");
  if (auto v = unsigned_int("n")) c.n = *v;
  if (auto v = unsigned_int("replicates")) {
    if (*v == 0) throw SpecError("config.replicates: must be positive");
    c.replicates = *v;
  }
  if (auto v = unsigned_int("seed")) c.seed = *v;
  if (auto v = unsigned_int("workers")) c.workers = static_cast<unsigned>(*v);
  if (const json* s = field("state")) {
    if (!s->is_array()) throw SpecError("config.state: expected an array of counts");
    State z;
    for (const auto& x : *s) {
      if (!x.is_number_integer() || x.get<std::int64_t>() < 0) throw SpecError("config.state: expected nonnegative integers");
      z.push_back(x.get<std::int64_t>());
    }
    c.state = z;
  }
  if (const json* t = field("thresholds")) {
    if (!t->is_object()) throw SpecError("config.thresholds: expected an object");
    for (const auto& [k, v] : t->items()) {
      if (!v.is_number()) throw SpecError("config.thresholds." + k + ": expected a number");
      c.thresholds[k] = v.get<double>();
    }
  }
  if (const json* p = field("probe_magnitudes")) {
    if (!p->is_array()) throw SpecError("config.probe_magnitudes: expected an array");
    for (const auto& x : *p) {
      if (!x.is_number()) throw SpecError("config.probe_magnitudes: expected numbers");
      c.probe_magnitudes.push_back(x.get<double>());
    }
  }
  if (auto v = real_field("dt")) c.dt = *v;
  if (auto v = real_field("time")) c.time = *v;
  if (const json* t = field("timestamp")) {
    if (!t->is_string()) throw SpecError("config.timestamp: expected a string");
    c.timestamp = t->get<std::string>();
  }
  return c;
}

std::string Report::dump() const { return doc.dump(2) + "\n"; }

void Report::write(const std::string& dir) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("report: cannot create directory '" + dir + "': " + ec.message());
  auto put = [&](const std::string& name, const std::string& content) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw IoError("report: cannot write '" + name + "' in '" + dir + "'");
    f << content;
  };
  put("report.json", dump());
  for (const auto& a : artifacts) put(a.name, a.content);
}

json to_json(const GrowthVerdict& g) {
  json checks = json::array();
  for (const auto& c : g.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  json slopes = json::array();
  for (const auto& s : g.slopes)
    slopes.push_back({{"name", s.name},
                      {"lhs", reals(s.lhs)},
                      {"rhs", reals(s.rhs)},
                      {"lhs_slope", real(s.lhs_slope)},
                      {"rhs_slope", real(s.rhs_slope)},
                      {"passed", s.passed}});
  return {{"verdict", to_string(g.verdict)},
          {"condition", g.condition},
          {"probes", g.probes},
          {"sizes", reals(g.sizes)},
          {"ratio_values", reals(g.ratio_values)},
          {"xi", reals(g.xi)},
          {"hypothesis_A", {{"holds", g.hypothesis_a.holds}, {"primitive", g.hypothesis_a.primitive}, {"rho", g.hypothesis_a.rho}}},
          {"hypothesis_B",
           {{"holds", g.hypothesis_b.holds},
            {"exact", g.hypothesis_b.exact},
            {"growth_exponent", real(g.hypothesis_b.growth_exponent)},
            {"ratios", reals(g.hypothesis_b.ratios)},
            {"reason", g.hypothesis_b.reason}}},
          {"checks", checks},
          {"slopes", slopes}};
}

Report run_suite(const ModelSpec& spec, const ExperimentConfig& cfg) {
  SuiteOutput out;
  if (cfg.suite == "moments") suite_moments(spec, cfg, out);
  else if (cfg.suite == "classify") suite_classify(spec, cfg, out);
  else if (cfg.suite == "gamma-limit") suite_gamma(spec, cfg, out);
  else if (cfg.suite == "normal-limit") suite_normal(spec, cfg, out);
  else if (cfg.suite == "l1-limit") suite_l1(spec, cfg, out);
  else if (cfg.suite == "feller") suite_feller(spec, cfg, out);
  else if (cfg.suite == "explosion") suite_explosion(spec, cfg, out);
  else throw ArgumentError("unknown suite '" + cfg.suite + "'");

  Report r;
  r.passed = out.assertions.all();
  json artifacts = json::array();
  for (const auto& a : out.artifacts) artifacts.push_back(a.name);
  r.doc = {{"header", {{"generated_at", cfg.timestamp.empty() ? now_utc() : cfg.timestamp},
                       {"tool", kToolName},
                       {"version", kVersion}}},
           {"suite", cfg.suite},
           {"seed", cfg.seed},
           {"spec_digest", spec_digest(spec)},
           {"spec", to_json(spec)},
           {"parameters", out.parameters},
           {"thresholds", out.thresholds},
           {"results", out.results},
           {"assertions", out.assertions.list()},
           {"passed", r.passed},
           {"artifacts", artifacts}};
  r.artifacts = std::move(out.artifacts);
  return r;
}

}  // namespace mbpm
