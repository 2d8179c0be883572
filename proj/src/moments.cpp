#include "mbpm/moments.hpp"

#include <cmath>

#include "mbpm/error.hpp"

namespace mbpm {

OffspringMoments offspring_moments(const OffspringSpec& offspring) {
  const std::size_t p = offspring.size();
  OffspringMoments out{Matrix(p, p), {}};
  out.cov.reserve(p);
  for (std::size_t i = 0; i < p; ++i) {
    if (offspring[i].dim() != p) throw DimensionError("offspring_moments: law has the wrong dimension");
    const Vector mi = offspring[i].mean();
    for (std::size_t j = 0; j < p; ++j) out.mean(j, i) = mi[j];
    out.cov.push_back(offspring[i].covariance());
  }
  return out;
}

double migration_raw_moment(const MigrationSpec& spec, std::span<const std::int64_t> z, std::size_t i, int k) {
  const auto pr = spec.probabilities(i, z);
  const auto& t = spec.type(i);
  double out = 0.0;
  if (pr.q > 0.0) out += pr.q * t.immigration.raw_moment(k, spec.size(z));
  if (pr.r > 0.0) out += pr.r * (k % 2 == 0 ? 1.0 : -1.0) * t.emigration.raw_moment(k, z[i]);
  return out;
}

Vector migration_mean(const MigrationSpec& spec, std::span<const std::int64_t> z) {
  Vector h(spec.dim());
  for (std::size_t i = 0; i < spec.dim(); ++i) h[i] = migration_raw_moment(spec, z, i, 1);
  return h;
}

Matrix migration_var(const MigrationSpec& spec, std::span<const std::int64_t> z) {
  Matrix var(spec.dim(), spec.dim());
  for (std::size_t i = 0; i < spec.dim(); ++i) {
    const double m1 = migration_raw_moment(spec, z, i, 1);
    const double m2 = migration_raw_moment(spec, z, i, 2);
    var(i, i) = std::max(0.0, m2 - m1 * m1);
  }
  return var;
}

Vector migration_kappa(const MigrationSpec& spec, std::span<const std::int64_t> z) {
  Vector kappa(spec.dim());
  for (std::size_t i = 0; i < spec.dim(); ++i) {
    const double m1 = migration_raw_moment(spec, z, i, 1);
    const double m2 = migration_raw_moment(spec, z, i, 2);
    const double m3 = migration_raw_moment(spec, z, i, 3);
    const double m4 = migration_raw_moment(spec, z, i, 4);
    const double k = m4 - 3.0 * m1 * m1 * m1 * m1 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2;
    kappa[i] = std::max(0.0, k);
  }
  return kappa;
}

namespace {

Vector parents_mean(const ModelSpec& spec, std::span<const std::int64_t> z) {
  if (z.size() != spec.dim()) throw DimensionError("moments: state has the wrong dimension");
  const Vector h = migration_mean(spec.migration(), z);
  Vector out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = static_cast<double>(z[i]) + h[i];
  return out;
}

}  // namespace

Vector cond_mean(const ModelSpec& spec, std::span<const std::int64_t> z) {
  return spec.mean_matrix().matrix() * parents_mean(spec, z);
}

Matrix cond_var(const ModelSpec& spec, std::span<const std::int64_t> z) {
  const Matrix& m = spec.mean_matrix().matrix();
  Matrix out = odot(parents_mean(spec, z), spec.offspring_covariances());
  out += m * migration_var(spec.migration(), z) * m.transpose();
  return out;
}

double sigma2(const ModelSpec& spec, std::span<const double> u, std::span<const std::int64_t> z) {
  Matrix inner = odot(parents_mean(spec, z), spec.offspring_covariances());
  inner += migration_var(spec.migration(), z);
  return quadratic_form(u, inner, u);
}

MomentReport moment_report(const ModelSpec& spec, std::span<const std::int64_t> z) {
  MomentReport out;
  out.z.assign(z.begin(), z.end());
  out.h = migration_mean(spec.migration(), z);
  out.cond_mean = cond_mean(spec, z);
  out.cond_cov = cond_var(spec, z);
  out.var_m = migration_var(spec.migration(), z);
  out.sigma2 = sigma2(spec, spec.size_weights(), z);
  out.kappa = migration_kappa(spec.migration(), z);
  return out;
}

namespace {

// Σ over the law of Mᵢ(z) of f(m).
template <typename F>
double expect_migration(const MigrationSpec& spec, std::span<const std::int64_t> z, std::size_t i, F&& f) {
  const auto pr = spec.probabilities(i, z);
  const auto& t = spec.type(i);
  double out = pr.p * f(0.0);
  if (pr.q > 0.0)
    t.immigration.for_each_atom(spec.size(z), [&](std::int64_t k, double w) {
      out += pr.q * w * f(static_cast<double>(k));
    });
  if (pr.r > 0.0)
    t.emigration.for_each_atom(z[i], [&](std::int64_t k, double w) {
      out += pr.r * w * f(-static_cast<double>(k));
    });
  return out;
}

}  // namespace

double phi_abs_moment(const MigrationSpec& spec, std::span<const std::int64_t> z, std::size_t i, double s) {
  const double zi = static_cast<double>(z[i]);
  return expect_migration(spec, z, i, [&](double m) { return std::pow(std::abs(zi + m), s); });
}

double migration_abs_central_moment(const MigrationSpec& spec, std::span<const std::int64_t> z, std::size_t i,
                                    double s) {
  const double h = migration_raw_moment(spec, z, i, 1);
  return expect_migration(spec, z, i, [&](double m) { return std::pow(std::abs(m - h), s); });
}

}  // namespace mbpm
