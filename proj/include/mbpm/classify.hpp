#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mbpm/model.hpp"

namespace mbpm {

struct CriteriaConfig {
  double delta = 1.0;        // moment-order exponent, in (0, 1]
  double alpha_log = 1.0;    // exponent on the log factor of the growth order conditions, > 0
  double alpha_tilde = 2.0;  // in (1, 2]
  double delta1 = 0.9;       // < 1
  double delta2 = 0.9;       // < 1
  std::vector<double> ray_points{1e3, 1e4, 1e5};
  Vector direction;          // empty: right Perron vector v (or all ones)
  double margin = 0.1;       // band around the threshold 1 left undecided
  double slope_gap = 0.05;   // required gap between fitted and target exponents
  double hyp_b_threshold = 1e-3;
  std::size_t xi_samples = 10000;
  std::uint64_t seed = 0;

  void validate() const;
};

// Probe states z = round(k · direction) for k in config.ray_points.
std::vector<State> probe_states(const ModelSpec& spec, const CriteriaConfig& config);

// True iff qᵢ(0) = 0 for every type, so an empty population stays empty.
bool is_absorbing_zero(const ModelSpec& spec);

struct HypothesisA {
  bool holds = false;
  bool primitive = false;
  double rho = 0.0;
};

HypothesisA check_hypothesis_A(const ModelSpec& spec, double tol = 1e-9);

struct HypothesisB {
  bool holds = false;
  bool exact = false;             // decided from the growth exponents alone
  double growth_exponent = 0.0;   // largest exponent of qᵢaᵢ and rᵢbᵢ
  std::vector<double> sizes;      // ‖z‖₁ at the probes
  std::vector<double> ratios;     // maxᵢ|hᵢ(z)| / ‖z‖₁ at the probes
  std::string reason;
};

HypothesisB check_hypothesis_B(const ModelSpec& spec, const CriteriaConfig& config = {});

struct HypothesisC {
  Vector a;
  Vector b;
  Vector q;
  Vector r;
};

// Limits of a(z), b(z), q(z), r(z) as ‖z‖ → ∞, when all exist and are finite.
std::optional<HypothesisC> check_hypothesis_C(const ModelSpec& spec);

// 2(uᵀz)(uᵀh(z)) / σ²(z). Throws NumericError when σ²(z) = 0.
double growth_ratio(const ModelSpec& spec, std::span<const double> u, std::span<const std::int64_t> z);

// Monte Carlo estimate of E|uᵀZ₁ − E[uᵀZ₁ | Z₀ = z]|^{2+δ} from n ≥ 10⁴ one-step draws.
double estimate_xi(const ModelSpec& spec, std::span<const double> u, std::span<const std::int64_t> z, double delta,
                   std::size_t n, Stream& rng);

// For every type present in z: qᵢ(z)·P(Iᵢ(z) > 0) > 0 and P(Xᵢ ≠ 0) > 0.
bool check_growth_support(const ModelSpec& spec, std::span<const std::int64_t> z);

enum class Verdict { no_growth, growth_possible, inconclusive };

const char* to_string(Verdict v);

struct ConditionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Log-log regression of a moment against uᵀz compared with a target order.
struct SlopeCheck {
  std::string name;
  std::vector<double> lhs;
  std::vector<double> rhs;
  double lhs_slope = 0.0;
  double rhs_slope = 0.0;
  bool passed = false;
};

struct GrowthVerdict {
  Verdict verdict = Verdict::inconclusive;
  std::string condition;  // the condition that decided the verdict, empty if inconclusive
  std::vector<State> probes;
  std::vector<double> sizes;         // uᵀz
  std::vector<double> ratio_values;  // growth_ratio at the probes
  std::vector<double> xi;            // ξ estimates at the probes
  HypothesisA hypothesis_a;
  HypothesisB hypothesis_b;
  std::vector<ConditionCheck> checks;
  std::vector<SlopeCheck> slopes;
};

GrowthVerdict classify_growth(const ModelSpec& spec, const CriteriaConfig& config = {});

// Least-squares slope of log y against log x over entries with y > 0; an
// empty value when fewer than two such points remain.
std::optional<double> log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace mbpm
