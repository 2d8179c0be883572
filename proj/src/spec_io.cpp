#include "mbpm/spec_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "mbpm/error.hpp"

namespace mbpm {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw SpecError(path + ": " + what); }

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "required field missing");
  return *it;
}

const json* optional_field(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (std::floor(x) == x && std::abs(x) < 9e15) return static_cast<std::int64_t>(x);
  }
  fail(path, "expected an integer");
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

State state(const json& j, const std::string& path) {
  State z;
  const auto& arr = array(j, path);
  for (std::size_t i = 0; i < arr.size(); ++i) z.push_back(integer(arr[i], index(path, i)));
  return z;
}

std::string law_name(const json& obj, const std::string& path) {
  const auto& l = require(obj, path, "law");
  if (!l.is_string()) fail(join(path, "law"), "expected a string");
  return l.get<std::string>();
}

// Rewraps SpecErrors thrown by constructors so the message carries the path.
template <typename F>
auto at_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const SpecError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    fail(path, msg);
  }
}

Marginal parse_marginal(const json& j, const std::string& path) {
  const std::string law = law_name(j, path);
  return at_path(path, [&] {
    if (law == "poisson") return Marginal::poisson(number(require(j, path, "mean"), join(path, "mean")));
    if (law == "geometric") return Marginal::geometric(number(require(j, path, "mean"), join(path, "mean")));
    if (law == "bernoulli") return Marginal::bernoulli(number(require(j, path, "prob"), join(path, "prob")));
    if (law == "deterministic")
      return Marginal::deterministic(integer(require(j, path, "value"), join(path, "value")));
    if (law == "table") {
      const std::string pp = join(path, "probs");
      const auto& arr = array(require(j, path, "probs"), pp);
      std::vector<double> pmf;
      for (std::size_t k = 0; k < arr.size(); ++k) pmf.push_back(number(arr[k], index(pp, k)));
      return Marginal::table(std::move(pmf));
    }
    fail(join(path, "law"), "unknown marginal law '" + law + "'");
  });
}

OffspringLaw parse_offspring(const json& j, const std::string& path, std::size_t dim) {
  const auto* kind = optional_field(j, path, "type");
  const std::string type = kind ? kind->get<std::string>() : "marginals";
  return at_path(path, [&] {
    if (type == "marginals") {
      const std::string mp = join(path, "marginals");
      const auto& arr = array(require(j, path, "marginals"), mp);
      if (arr.size() != dim) fail(mp, "expected one marginal per type");
      std::vector<Marginal> ms;
      for (std::size_t k = 0; k < arr.size(); ++k) ms.push_back(parse_marginal(arr[k], index(mp, k)));
      return OffspringLaw::independent(std::move(ms));
    }
    if (type == "joint") {
      const std::string ap = join(path, "atoms");
      const auto& arr = array(require(j, path, "atoms"), ap);
      std::vector<OffspringLaw::Atom> atoms;
      for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string p = index(ap, k);
        State v = state(require(arr[k], p, "value"), join(p, "value"));
        if (v.size() != dim) fail(join(p, "value"), "expected one count per type");
        atoms.push_back({std::move(v), number(require(arr[k], p, "prob"), join(p, "prob"))});
      }
      return OffspringLaw::joint(std::move(atoms));
    }
    fail(join(path, "type"), "expected 'marginals' or 'joint'");
  });
}

ImmigrationLaw parse_immigration(const json& j, const std::string& path) {
  const std::string law = law_name(j, path);
  return at_path(path, [&] {
    if (law == "shifted_poisson")
      return ImmigrationLaw::shifted_poisson(parse_state_function(require(j, path, "mean"), join(path, "mean")));
    if (law == "deterministic")
      return ImmigrationLaw::deterministic(integer(require(j, path, "value"), join(path, "value")));
    if (law == "table") {
      const std::string tp = join(path, "pmf");
      const auto& arr = array(require(j, path, "pmf"), tp);
      std::vector<std::pair<std::int64_t, double>> pmf;
      for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string p = index(tp, k);
        pmf.emplace_back(integer(require(arr[k], p, "value"), join(p, "value")),
                         number(require(arr[k], p, "prob"), join(p, "prob")));
      }
      return ImmigrationLaw::table(std::move(pmf));
    }
    fail(join(path, "law"), "unknown immigration law '" + law + "'");
  });
}

EmigrationLaw parse_emigration(const json& j, const std::string& path) {
  const std::string law = law_name(j, path);
  return at_path(path, [&] {
    if (law == "uniform") return EmigrationLaw::uniform();
    if (law == "inverse_cube") return EmigrationLaw::inverse_cube();
    if (law == "truncated_geometric")
      return EmigrationLaw::truncated_geometric(number(require(j, path, "theta"), join(path, "theta")));
    if (law == "deterministic")
      return EmigrationLaw::deterministic(integer(require(j, path, "value"), join(path, "value")));
    fail(join(path, "law"), "unknown emigration law '" + law + "'");
  });
}

TypeMigration parse_type_migration(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  TypeMigration t;
  if (const auto* q = optional_field(j, path, "q")) t.q = parse_state_function(*q, join(path, "q"));
  if (const auto* r = optional_field(j, path, "r")) t.r = parse_state_function(*r, join(path, "r"));
  if (const auto* i = optional_field(j, path, "immigration")) t.immigration = parse_immigration(*i, join(path, "immigration"));
  if (const auto* d = optional_field(j, path, "emigration")) t.emigration = parse_emigration(*d, join(path, "emigration"));
  return t;
}

InitialLaw parse_initial(const json& j, const std::string& path, std::size_t dim) {
  return at_path(path, [&] {
    if (const auto* s = optional_field(j, path, "state")) {
      State z = state(*s, join(path, "state"));
      if (z.size() != dim) fail(join(path, "state"), "expected one count per type");
      return InitialLaw::deterministic(std::move(z));
    }
    if (const auto* t = optional_field(j, path, "table")) {
      const std::string tp = join(path, "table");
      const auto& arr = array(*t, tp);
      std::vector<InitialLaw::Atom> atoms;
      for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string p = index(tp, k);
        State v = state(require(arr[k], p, "value"), join(p, "value"));
        if (v.size() != dim) fail(join(p, "value"), "expected one count per type");
        atoms.push_back({std::move(v), number(require(arr[k], p, "prob"), join(p, "prob"))});
      }
      return InitialLaw::table(std::move(atoms));
    }
    fail(path, "expected 'state' or 'table'");
  });
}

json marginal_json(const Marginal& m) {
  switch (m.kind()) {
    case Marginal::Kind::poisson: return {{"law", "poisson"}, {"mean", m.param()}};
    case Marginal::Kind::geometric: return {{"law", "geometric"}, {"mean", m.param()}};
    case Marginal::Kind::bernoulli: return {{"law", "bernoulli"}, {"prob", m.param()}};
    case Marginal::Kind::deterministic: return {{"law", "deterministic"}, {"value", m.value()}};
    case Marginal::Kind::table: return {{"law", "table"}, {"probs", m.pmf()}};
  }
  return {};
}

json immigration_json(const ImmigrationLaw& l) {
  switch (l.kind()) {
    case ImmigrationLaw::Kind::shifted_poisson: return {{"law", "shifted_poisson"}, {"mean", to_json(l.mean_function())}};
    case ImmigrationLaw::Kind::deterministic: return {{"law", "deterministic"}, {"value", l.value()}};
    case ImmigrationLaw::Kind::table: {
      json pmf = json::array();
      for (const auto& [v, p] : l.pmf()) pmf.push_back({{"value", v}, {"prob", p}});
      return {{"law", "table"}, {"pmf", pmf}};
    }
  }
  return {};
}

json emigration_json(const EmigrationLaw& l) {
  switch (l.kind()) {
    case EmigrationLaw::Kind::uniform: return {{"law", "uniform"}};
    case EmigrationLaw::Kind::inverse_cube: return {{"law", "inverse_cube"}};
    case EmigrationLaw::Kind::truncated_geometric: return {{"law", "truncated_geometric"}, {"theta", l.theta()}};
    case EmigrationLaw::Kind::deterministic: return {{"law", "deterministic"}, {"value", l.value()}};
  }
  return {};
}

double bound(const json& j, const std::string& path, double fallback) {
  if (j.is_null()) return fallback;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  return number(j, path);
}

json bound_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

}  // namespace

StateFunction parse_state_function(const json& j, const std::string& path) {
  if (j.is_number()) return StateFunction::constant(j.get<double>());
  if (!j.is_object() || j.size() != 1) fail(path, "expected a number or one of {constant, power, table, clamp}");
  return at_path(path, [&] {
    if (const auto* c = optional_field(j, path, "constant")) return StateFunction::constant(number(*c, join(path, "constant")));
    if (const auto* p = optional_field(j, path, "power")) {
      const std::string pp = join(path, "power");
      return StateFunction::power(number(require(*p, pp, "coef"), join(pp, "coef")),
                                  number(require(*p, pp, "exponent"), join(pp, "exponent")));
    }
    if (const auto* t = optional_field(j, path, "table")) {
      const std::string tp = join(path, "table");
      const auto& arr = array(*t, tp);
      std::vector<std::pair<double, double>> pts;
      for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string p = index(tp, k);
        const auto& pair = array(arr[k], p);
        if (pair.size() != 2) fail(p, "expected [size, value]");
        pts.emplace_back(number(pair[0], index(p, 0)), number(pair[1], index(p, 1)));
      }
      return StateFunction::table(std::move(pts));
    }
    if (const auto* c = optional_field(j, path, "clamp")) {
      const std::string cp = join(path, "clamp");
      const double inf = std::numeric_limits<double>::infinity();
      const auto* lo = optional_field(*c, cp, "min");
      const auto* hi = optional_field(*c, cp, "max");
      return StateFunction::clamp(parse_state_function(require(*c, cp, "inner"), join(cp, "inner")),
                                  lo ? bound(*lo, join(cp, "min"), -inf) : -inf,
                                  hi ? bound(*hi, join(cp, "max"), inf) : inf);
    }
    fail(path, "unknown state function form");
  });
}

json to_json(const StateFunction& f) {
  switch (f.kind()) {
    case StateFunction::Kind::constant: return {{"constant", f.coef()}};
    case StateFunction::Kind::power: return {{"power", {{"coef", f.coef()}, {"exponent", f.exponent()}}}};
    case StateFunction::Kind::table: {
      json pts = json::array();
      for (const auto& [x, y] : f.points()) pts.push_back({x, y});
      return {{"table", pts}};
    }
    case StateFunction::Kind::clamp:
      return {{"clamp", {{"inner", to_json(f.inner())}, {"min", bound_json(f.lo())}, {"max", bound_json(f.hi())}}}};
  }
  return {};
}

ModelSpec parse_model(const json& doc) {
  if (!doc.is_object()) fail("document", "expected an object");
  const auto& offspring_doc = require(doc, "", "offspring");
  const auto& off = array(offspring_doc, "offspring");
  std::size_t dim = off.size();
  if (const auto* d = optional_field(doc, "", "dimension")) {
    const auto declared = integer(*d, "dimension");
    if (declared < 1) fail("dimension", "must be >= 1");
    if (static_cast<std::size_t>(declared) != dim) fail("offspring", "expected one law per type (dimension " + std::to_string(declared) + ")");
    dim = static_cast<std::size_t>(declared);
  }
  if (dim == 0) fail("offspring", "at least one type is required");

  OffspringSpec offspring;
  for (std::size_t i = 0; i < dim; ++i) offspring.push_back(parse_offspring(off[i], index("offspring", i), dim));

  MigrationSpec migration = MigrationSpec::none(dim);
  if (const auto* m = optional_field(doc, "", "migration")) {
    const auto& arr = array(*m, "migration");
    if (arr.size() != dim) fail("migration", "expected one entry per type");
    std::vector<TypeMigration> types;
    for (std::size_t i = 0; i < dim; ++i) types.push_back(parse_type_migration(arr[i], index("migration", i)));
    migration = MigrationSpec(std::move(types));
  }

  InitialLaw initial = parse_initial(require(doc, "", "initial"), "initial", dim);

  std::optional<DeclaredAsymptotics> asym;
  if (const auto* a = optional_field(doc, "", "asymptotics")) {
    DeclaredAsymptotics d;
    d.alpha = number(require(*a, "asymptotics", "alpha"), "asymptotics.alpha");
    d.c_dot_u = number(require(*a, "asymptotics", "c_dot_u"), "asymptotics.c_dot_u");
    d.beta = number(require(*a, "asymptotics", "beta"), "asymptotics.beta");
    d.nu = number(require(*a, "asymptotics", "nu"), "asymptotics.nu");
    asym = d;
  }
  return ModelSpec(std::move(offspring), std::move(migration), std::move(initial), asym);
}

ModelSpec parse_model_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("document: invalid JSON (") + e.what() + ")");
  }
  return parse_model(doc);
}

ModelSpec load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_text(buf.str());
}

json to_json(const ModelSpec& spec) {
  json doc;
  doc["dimension"] = spec.dim();
  json off = json::array();
  for (const auto& law : spec.offspring()) {
    if (law.is_joint()) {
      json atoms = json::array();
      for (const auto& a : law.atoms()) atoms.push_back({{"value", a.value}, {"prob", a.prob}});
      off.push_back({{"type", "joint"}, {"atoms", atoms}});
    } else {
      json ms = json::array();
      for (const auto& m : law.marginals()) ms.push_back(marginal_json(m));
      off.push_back({{"type", "marginals"}, {"marginals", ms}});
    }
  }
  doc["offspring"] = off;
  json mig = json::array();
  for (const auto& t : spec.migration().types())
    mig.push_back({{"q", to_json(t.q)},
                   {"r", to_json(t.r)},
                   {"immigration", immigration_json(t.immigration)},
                   {"emigration", emigration_json(t.emigration)}});
  doc["migration"] = mig;
  if (spec.initial().is_deterministic()) {
    doc["initial"] = {{"state", spec.initial().atoms().front().value}};
  } else {
    json atoms = json::array();
    for (const auto& a : spec.initial().atoms()) atoms.push_back({{"value", a.value}, {"prob", a.prob}});
    doc["initial"] = {{"table", atoms}};
  }
  if (const auto& a = spec.asymptotics())
    doc["asymptotics"] = {{"alpha", a->alpha}, {"c_dot_u", a->c_dot_u}, {"beta", a->beta}, {"nu", a->nu}};
  return doc;
}

std::string spec_digest(const ModelSpec& spec) {
  const std::string text = to_json(spec).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace mbpm
