#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mbpm/algebra.hpp"
#include "mbpm/rng.hpp"
#include "mbpm/state_function.hpp"

namespace mbpm {

using State = std::vector<std::int64_t>;

// Univariate offspring count law on ℤ₊.
class Marginal {
 public:
  enum class Kind { poisson, geometric, bernoulli, deterministic, table };

  static Marginal poisson(double mean);
  // Failures before the first success, parametrized by its mean.
  static Marginal geometric(double mean);
  static Marginal bernoulli(double prob);
  static Marginal deterministic(std::int64_t value);
  // pmf[k] = P(X = k), k = 0..K.
  static Marginal table(std::vector<double> pmf);

  Kind kind() const noexcept { return kind_; }
  double param() const noexcept { return param_; }
  std::int64_t value() const noexcept { return value_; }
  const std::vector<double>& pmf() const noexcept { return pmf_; }

  double mean() const;
  double variance() const;
  double prob_zero() const;

  // Total of n i.i.d. draws.
  std::int64_t sample_sum(std::int64_t n, Stream& rng) const;

 private:
  Kind kind_ = Kind::deterministic;
  double param_ = 0.0;
  std::int64_t value_ = 0;
  std::vector<double> pmf_;
};

// Law of the offspring vector of one individual of a given type: either p
// independent marginals or a joint pmf on finitely many atoms of ℤ₊ᵖ.
class OffspringLaw {
 public:
  struct Atom {
    State value;
    double prob = 0.0;
  };

  static OffspringLaw independent(std::vector<Marginal> marginals);
  static OffspringLaw joint(std::vector<Atom> atoms);

  std::size_t dim() const noexcept { return dim_; }
  bool is_joint() const noexcept { return !atoms_.empty(); }
  const std::vector<Marginal>& marginals() const noexcept { return marginals_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  Vector mean() const;
  Matrix covariance() const;
  double prob_nonzero() const;

  // Adds the offspring of n i.i.d. parents to out.
  void sample_sum(std::int64_t n, Stream& rng, std::span<std::int64_t> out) const;

 private:
  std::size_t dim_ = 0;
  std::vector<Marginal> marginals_;
  std::vector<Atom> atoms_;
};

using OffspringSpec = std::vector<OffspringLaw>;

// ℕ-valued immigration count Iᵢ(z); the shifted Poisson mean depends on the
// state through a StateFunction of s = uᵀz.
class ImmigrationLaw {
 public:
  enum class Kind { shifted_poisson, deterministic, table };

  // 1 + Poisson(a(s) − 1); requires a(s) ≥ 1.
  static ImmigrationLaw shifted_poisson(StateFunction mean);
  static ImmigrationLaw deterministic(std::int64_t value);
  static ImmigrationLaw table(std::vector<std::pair<std::int64_t, double>> pmf);

  Kind kind() const noexcept { return kind_; }
  const StateFunction& mean_function() const noexcept { return mean_; }
  std::int64_t value() const noexcept { return value_; }
  const std::vector<std::pair<std::int64_t, double>>& pmf() const noexcept { return pmf_; }

  double mean(double s) const;
  // E[I^k], k = 1..4.
  double raw_moment(int k, double s) const;
  std::int64_t sample(double s, Stream& rng) const;
  // Visits the support with probabilities; Poisson tails below 1e-17 dropped.
  void for_each_atom(double s, const std::function<void(std::int64_t, double)>& visit) const;

  double mean_limit() const;
  double mean_growth_exponent() const;

 private:
  double poisson_rate(double s) const;

  Kind kind_ = Kind::deterministic;
  StateFunction mean_;
  std::int64_t value_ = 1;
  std::vector<std::pair<std::int64_t, double>> pmf_;
};

// Emigration count Dᵢ(z) supported on 1..zᵢ.
class EmigrationLaw {
 public:
  enum class Kind { uniform, truncated_geometric, inverse_cube, deterministic };

  static EmigrationLaw uniform();
  // P(D = j) ∝ (1 − θ)^(j−1), j = 1..zᵢ.
  static EmigrationLaw truncated_geometric(double theta);
  // P(D = j) ∝ j⁻³, j = 1..zᵢ.
  static EmigrationLaw inverse_cube();
  // D = min(k, zᵢ).
  static EmigrationLaw deterministic(std::int64_t value);

  Kind kind() const noexcept { return kind_; }
  double theta() const noexcept { return theta_; }
  std::int64_t value() const noexcept { return value_; }

  double mean(std::int64_t zi) const { return raw_moment(1, zi); }
  // E[D^k], k = 1..4; zero when zᵢ = 0.
  double raw_moment(int k, std::int64_t zi) const;
  std::int64_t sample(std::int64_t zi, Stream& rng) const;
  void for_each_atom(std::int64_t zi, const std::function<void(std::int64_t, double)>& visit) const;

  // Limit of E[D] as zᵢ → ∞ (inf for the uniform law).
  double mean_limit() const;
  double mean_growth_exponent() const;

 private:
  Kind kind_ = Kind::deterministic;
  double theta_ = 0.0;
  std::int64_t value_ = 1;
};

struct TypeMigration {
  StateFunction q = StateFunction::constant(0.0);  // immigration probability
  StateFunction r = StateFunction::constant(0.0);  // emigration probability
  ImmigrationLaw immigration = ImmigrationLaw::deterministic(1);
  EmigrationLaw emigration = EmigrationLaw::deterministic(1);
};

struct MigrationProbabilities {
  double p = 1.0;
  double q = 0.0;
  double r = 0.0;
};

// Per-type migration components, sampled independently across types.
// No-migration probability is the remainder pᵢ = 1 − qᵢ − rᵢ, and rᵢ is
// forced to 0 when zᵢ = 0.
class MigrationSpec {
 public:
  MigrationSpec() = default;
  explicit MigrationSpec(std::vector<TypeMigration> types);

  static MigrationSpec none(std::size_t dim);

  std::size_t dim() const noexcept { return types_.size(); }
  const TypeMigration& type(std::size_t i) const { return types_.at(i); }
  const std::vector<TypeMigration>& types() const noexcept { return types_; }

  // Weights of the size functional s = uᵀz (uniform 1/p until set).
  void set_size_weights(Vector u);
  const Vector& size_weights() const noexcept { return weights_; }
  double size(std::span<const std::int64_t> z) const;

  // Throws SpecError naming the type when the probabilities are invalid.
  MigrationProbabilities probabilities(std::size_t i, std::span<const std::int64_t> z) const;

 private:
  std::vector<TypeMigration> types_;
  Vector weights_;
};

class InitialLaw {
 public:
  struct Atom {
    State value;
    double prob = 0.0;
  };

  static InitialLaw deterministic(State z);
  static InitialLaw table(std::vector<Atom> atoms);

  std::size_t dim() const;
  bool is_deterministic() const noexcept { return atoms_.size() == 1; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  Vector mean() const;
  State sample(Stream& rng) const;

 private:
  std::vector<Atom> atoms_;
};

// Parameters of the asymptotic regime declared in a model document, used by
// the limit-law experiments instead of the fitted values when present.
struct DeclaredAsymptotics {
  double alpha = 0.0;
  double c_dot_u = 0.0;
  double beta = 0.0;
  double nu = 0.0;
};

class ModelSpec {
 public:
  ModelSpec(OffspringSpec offspring, MigrationSpec migration, InitialLaw initial,
            std::optional<DeclaredAsymptotics> asymptotics = std::nullopt);

  std::size_t dim() const noexcept { return dim_; }
  const OffspringSpec& offspring() const noexcept { return offspring_; }
  const MigrationSpec& migration() const noexcept { return migration_; }
  const InitialLaw& initial() const noexcept { return initial_; }
  const std::optional<DeclaredAsymptotics>& asymptotics() const noexcept { return asymptotics_; }

  const NonnegMatrix& mean_matrix() const noexcept { return mean_; }
  const std::vector<Matrix>& offspring_covariances() const noexcept { return cov_; }
  // Present when the mean matrix is primitive.
  const std::optional<SpectralData>& spectral() const noexcept { return spectral_; }
  // u when primitive, otherwise uniform weights 1/p.
  const Vector& size_weights() const noexcept { return migration_.size_weights(); }
  double size(std::span<const std::int64_t> z) const { return migration_.size(z); }

 private:
  std::size_t dim_;
  OffspringSpec offspring_;
  MigrationSpec migration_;
  InitialLaw initial_;
  std::optional<DeclaredAsymptotics> asymptotics_;
  NonnegMatrix mean_;
  std::vector<Matrix> cov_;
  std::optional<SpectralData> spectral_;
};

struct Trajectory {
  std::vector<State> states;
  StreamKey key;
};

// Populations above this size abort the simulation with NumericError.
inline constexpr std::int64_t kPopulationCap = 1'000'000'000'000'000;

std::int64_t l1_norm(std::span<const std::int64_t> z);

std::vector<std::int64_t> sample_migration(const MigrationSpec& spec, std::span<const std::int64_t> z,
                                           Stream& rng);

State step(const ModelSpec& spec, std::span<const std::int64_t> z, Stream& rng);

Trajectory simulate_path(const ModelSpec& spec, std::size_t n, Stream& rng);
Trajectory simulate_path(const ModelSpec& spec, std::size_t n, StreamKey key);

}  // namespace mbpm
