#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mbpm/algebra.hpp"
#include "mbpm/model.hpp"

namespace mbpm {

struct OffspringMoments {
  Matrix mean;             // column i = mᵢ
  std::vector<Matrix> cov; // Σᵢ
};

OffspringMoments offspring_moments(const OffspringSpec& offspring);

// h(z) = a(z)∘q(z) − b(z)∘r(z)
Vector migration_mean(const MigrationSpec& spec, std::span<const std::int64_t> z);

// Var[M₀(z)], diagonal under independence across types.
Matrix migration_var(const MigrationSpec& spec, std::span<const std::int64_t> z);

// κᵢ(z) = E[(φ₀ᵢ(z) − E φ₀ᵢ(z))⁴] with φ₀ᵢ(z) = zᵢ + M₀ᵢ(z), expanded through
// the raw moments of I and D.
Vector migration_kappa(const MigrationSpec& spec, std::span<const std::int64_t> z);

// E[Z_{k+1} | Z_k = z] = m (z + h(z))
Vector cond_mean(const ModelSpec& spec, std::span<const std::int64_t> z);

// Var[Z_{k+1} | Z_k = z] = (z + h(z))⊙Σ + m Var[M₀(z)] mᵀ
Matrix cond_var(const ModelSpec& spec, std::span<const std::int64_t> z);

// σ²(z) = uᵀ((z + h(z))⊙Σ + Var[M₀(z)])u, valid when uᵀm = uᵀ.
double sigma2(const ModelSpec& spec, std::span<const double> u, std::span<const std::int64_t> z);

struct MomentReport {
  State z;
  Vector h;
  Vector cond_mean;
  Matrix cond_cov;
  Matrix var_m;
  double sigma2 = 0.0;
  Vector kappa;
};

// Uses the model's size weights as u.
MomentReport moment_report(const ModelSpec& spec, std::span<const std::int64_t> z);

// E[Mᵢ(z)^k], k = 1..4.
double migration_raw_moment(const MigrationSpec& spec, std::span<const std::int64_t> z, std::size_t i, int k);

// E|zᵢ + Mᵢ(z)|^s by summation over the migration law.
double phi_abs_moment(const MigrationSpec& spec, std::span<const std::int64_t> z, std::size_t i, double s);

// E|Mᵢ(z) − hᵢ(z)|^s by summation over the migration law.
double migration_abs_central_moment(const MigrationSpec& spec, std::span<const std::int64_t> z, std::size_t i,
                                    double s);

}  // namespace mbpm
