// Models shared by unit and acceptance tests.
#pragma once

#include <string>

#include "mbpm/model.hpp"
#include "mbpm/spec_io.hpp"
#include "oracles.hpp"

namespace fixtures {

inline std::string spec_path(const std::string& name) { return std::string(MBPM_SPEC_DIR) + "/" + name; }

inline mbpm::ModelSpec load(const std::string& name) { return mbpm::load_model_file(spec_path(name)); }

// Two types, finite offspring and migration supports, critical primitive
// mean matrix [[0.75, 0.25], [0.25, 0.75]].
inline mbpm::ModelSpec small_model(mbpm::State z0 = {3, 2}) {
  using namespace mbpm;
  OffspringSpec off{
      OffspringLaw::independent({Marginal::table({0.5, 0.25, 0.25}), Marginal::bernoulli(0.25)}),
      OffspringLaw::joint({{{0, 0}, 0.5}, {{1, 1}, 0.25}, {{0, 2}, 0.25}})};
  TypeMigration t0;
  t0.q = StateFunction::constant(0.3);
  t0.r = StateFunction::constant(0.2);
  t0.immigration = ImmigrationLaw::table({{1, 0.6}, {2, 0.4}});
  t0.emigration = EmigrationLaw::uniform();
  TypeMigration t1;
  t1.q = StateFunction::constant(0.25);
  t1.r = StateFunction::constant(0.25);
  t1.immigration = ImmigrationLaw::deterministic(1);
  t1.emigration = EmigrationLaw::truncated_geometric(0.5);
  return ModelSpec(std::move(off), MigrationSpec({t0, t1}), InitialLaw::deterministic(std::move(z0)));
}

// The same model written out for the enumeration oracle.
struct SmallOracle {
  std::vector<oracle::Pmf> offspring;
  std::vector<oracle::Pmf1> migration;
};

inline SmallOracle small_oracle(const oracle::State& z) {
  SmallOracle o;
  o.offspring.push_back(oracle::independent({{{0, 0.5}, {1, 0.25}, {2, 0.25}}, {{0, 0.75}, {1, 0.25}}}));
  o.offspring.push_back({{{0, 0}, 0.5}, {{1, 1}, 0.25}, {{0, 2}, 0.25}});
  const double r0 = z[0] > 0 ? 0.2 : 0.0, r1 = z[1] > 0 ? 0.25 : 0.0;
  o.migration.push_back(oracle::migration_pmf(0.3, {{1, 0.6}, {2, 0.4}}, r0, oracle::uniform_emigration(z[0])));
  o.migration.push_back(oracle::migration_pmf(0.25, {{1, 1.0}}, r1, oracle::geometric_emigration(z[1], 0.5)));
  return o;
}

}  // namespace fixtures
