#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mbpm/model.hpp"

namespace mbpm {

// Parameters of the large-population regime: uᵀh(z) ≈ (uᵀc)(uᵀz)^α and
// σ²(z) ≈ ν(uᵀz)^β, with the derived limit-law constants.
struct LimitParams {
  double alpha = 0.0;
  double c_dot_u = 0.0;
  double beta = 0.0;
  double nu = 0.0;
  std::optional<double> gamma_shape;  // present when β = 1 + α and ν < 2uᵀc
  std::optional<double> gamma_scale;
  std::optional<double> l1_constant;  // present when uᵀc > 0 and α < 1
  std::string source;                 // "declared" or "fitted"
};

using ScalarFunction = std::function<double(double)>;

// a₀ = 1, a_{k+1} = a_k + h̄(a_k); returns a₀..a_n. Throws NumericError when
// h̄ is not positive and finite along the way.
std::vector<double> a_seq(const ScalarFunction& hbar, std::size_t n);

// h̄(x) = (uᵀc)·x^α
ScalarFunction hbar_power(double c_dot_u, double alpha);

// ((uᵀc)(1−α)n)^{1/(1−α)}
double a_asymptotic(double c_dot_u, double alpha, double n);

// Gaussian normalization Λ_n. Requires 0 ≤ α < 1 and 3α−1 ≤ β ≤ 1+α; the
// logarithmic form is used when β = 3α−1 (within 1e-12).
double lambda_n(const LimitParams& params, double n);

// (shape, scale) of Z^{1−α}: ((2uᵀc − να)/(ν(1−α)), ν(1−α)²/2). Throws
// InfeasibleError when ν ≥ 2uᵀc, where unlimited growth has probability 0.
std::pair<double, double> gamma_limit_params(double alpha, double nu, double c_dot_u);

// ((uᵀc)(1−α))^{1/(1−α)}
double l1_constant(double c_dot_u, double alpha);

// Fills the derived constants of params from alpha, c_dot_u, beta and nu.
LimitParams complete_limit_params(LimitParams params);

// Exponents and coefficients of uᵀh and σ² fitted along the probe ray at
// sizes 10⁶..10¹²; exponents within 1e-3 of a multiple of 0.01 are snapped.
LimitParams fit_limit_params(const ModelSpec& spec);

// The declared asymptotics of the model when present, otherwise the fit.
LimitParams resolve_limit_params(const ModelSpec& spec);

struct FellerParams {
  double drift = 0.0;      // uᵀ(a∘q − b∘r)
  double diffusion = 0.0;  // uᵀ(v⊙Σ)u
};

// Throws InfeasibleError when the migration limits do not exist or the mean
// matrix is not primitive.
FellerParams feller_params(const ModelSpec& spec);

// Euler–Maruyama for d𝒵 = drift dt + √(diffusion 𝒵⁺) dW on [0, T]; returns
// 𝒵 at the grid points 0, dt, 2dt, ... T (the last step is shortened to hit T).
std::vector<double> euler_maruyama(double drift, double diffusion, double T, double dt, Stream& rng,
                                   double z0 = 0.0);

struct ScaledPath {
  std::vector<double> t;
  std::vector<Vector> values;  // Z_{⌊nt⌋} / n
  std::size_t n = 0;
};

// Samples n⁻¹Z_{⌊nt⌋} on `points` uniform grid points of [0, T] (default:
// one per step). Throws ArgumentError when the trajectory is too short.
ScaledPath scaled_path(const Trajectory& traj, std::size_t n, double T, std::size_t points = 0);

}  // namespace mbpm
