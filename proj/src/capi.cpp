#include "mbpm/mbpm.h"

#include <cstring>
#include <new>
#include <string>

#include "mbpm/error.hpp"
#include "mbpm/experiments.hpp"
#include "mbpm/moments.hpp"
#include "mbpm/spec_io.hpp"

struct mbpm_model {
  mbpm::ModelSpec spec;
};

struct mbpm_report {
  mbpm::Report report;
  std::string json;
};

namespace {

thread_local std::string last_error;

template <typename F>
mbpm_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return MBPM_OK;
  } catch (const mbpm::SpecError& e) {
    last_error = e.what();
    return MBPM_E_SPEC;
  } catch (const mbpm::DimensionError& e) {
    last_error = e.what();
    return MBPM_E_DIMENSION;
  } catch (const mbpm::NotPrimitiveError& e) {
    last_error = e.what();
    return MBPM_E_NOT_PRIMITIVE;
  } catch (const mbpm::ConvergenceError& e) {
    last_error = e.what();
    return MBPM_E_CONVERGENCE;
  } catch (const mbpm::InfeasibleError& e) {
    last_error = e.what();
    return MBPM_E_INFEASIBLE;
  } catch (const mbpm::NumericError& e) {
    last_error = e.what();
    return MBPM_E_NUMERIC;
  } catch (const mbpm::ArgumentError& e) {
    last_error = e.what();
    return MBPM_E_ARGUMENT;
  } catch (const mbpm::IoError& e) {
    last_error = e.what();
    return MBPM_E_IO;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return MBPM_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return MBPM_E_INTERNAL;
  }
}

mbpm_status null_argument(const char* what) {
  last_error = std::string(what) + " is NULL";
  return MBPM_E_ARGUMENT;
}

}  // namespace

extern "C" {

const char* mbpm_version(void) { return mbpm::kVersion; }

const char* mbpm_last_error(void) { return last_error.c_str(); }

const char* mbpm_status_name(mbpm_status status) {
  switch (status) {
    case MBPM_OK: return "ok";
    case MBPM_E_SPEC: return "spec";
    case MBPM_E_DIMENSION: return "dimension";
    case MBPM_E_NOT_PRIMITIVE: return "not-primitive";
    case MBPM_E_CONVERGENCE: return "convergence";
    case MBPM_E_INFEASIBLE: return "infeasible";
    case MBPM_E_NUMERIC: return "numeric";
    case MBPM_E_ARGUMENT: return "argument";
    case MBPM_E_IO: return "io";
    case MBPM_E_INTERNAL: return "internal";
  }
  return "unknown";
}

mbpm_status mbpm_model_from_json(const char* json, mbpm_model** out) {
  if (!json) return null_argument("json");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new mbpm_model{mbpm::parse_model_text(json)}; });
}

mbpm_status mbpm_model_from_file(const char* path, mbpm_model** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] { *out = new mbpm_model{mbpm::load_model_file(path)}; });
}

void mbpm_model_free(mbpm_model* model) { delete model; }

size_t mbpm_model_dimension(const mbpm_model* model) { return model ? model->spec.dim() : 0; }

mbpm_status mbpm_model_digest(const mbpm_model* model, char out[17]) {
  if (!model) return null_argument("model");
  if (!out) return null_argument("out");
  return guarded([&] {
    const std::string d = mbpm::spec_digest(model->spec);
    std::memcpy(out, d.c_str(), 17);
  });
}

mbpm_status mbpm_model_perron(const mbpm_model* model, double* rho, double* u, double* v) {
  if (!model) return null_argument("model");
  return guarded([&] {
    const auto& sp = model->spec.spectral();
    if (!sp) throw mbpm::NotPrimitiveError("mean matrix is not primitive");
    if (rho) *rho = sp->rho;
    for (std::size_t i = 0; i < sp->u.size(); ++i) {
      if (u) u[i] = sp->u[i];
      if (v) v[i] = sp->v[i];
    }
  });
}

mbpm_status mbpm_model_moments(const mbpm_model* model, const int64_t* z, double* h, double* cond_mean,
                               double* cond_cov, double* sigma2) {
  if (!model) return null_argument("model");
  if (!z) return null_argument("z");
  return guarded([&] {
    const std::size_t p = model->spec.dim();
    const mbpm::State state(z, z + p);
    for (auto x : state)
      if (x < 0) throw mbpm::ArgumentError("z: counts must be nonnegative");
    const auto rep = mbpm::moment_report(model->spec, state);
    for (std::size_t i = 0; i < p; ++i) {
      if (h) h[i] = rep.h[i];
      if (cond_mean) cond_mean[i] = rep.cond_mean[i];
      for (std::size_t j = 0; j < p && cond_cov; ++j) cond_cov[i * p + j] = rep.cond_cov(i, j);
    }
    if (sigma2) *sigma2 = rep.sigma2;
  });
}

mbpm_status mbpm_simulate_path(const mbpm_model* model, size_t n, uint64_t seed, uint64_t index, int64_t* out) {
  if (!model) return null_argument("model");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto traj = mbpm::simulate_path(model->spec, n, mbpm::StreamKey{seed, index});
    std::size_t k = 0;
    for (const auto& z : traj.states)
      for (auto x : z) out[k++] = x;
  });
}

mbpm_status mbpm_run_suite(const mbpm_model* model, const char* config_json, mbpm_report** out) {
  if (!model) return null_argument("model");
  if (!config_json) return null_argument("config_json");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw mbpm::SpecError(std::string("config: invalid JSON (") + e.what() + ")");
    }
    const auto cfg = mbpm::parse_experiment_config(doc);
    auto r = new mbpm_report{mbpm::run_suite(model->spec, cfg), {}};
    r->json = r->report.dump();
    *out = r;
  });
}

const char* mbpm_report_json(const mbpm_report* report) { return report ? report->json.c_str() : ""; }

int mbpm_report_passed(const mbpm_report* report) { return report && report->report.passed ? 1 : 0; }

size_t mbpm_report_artifact_count(const mbpm_report* report) { return report ? report->report.artifacts.size() : 0; }

const char* mbpm_report_artifact_name(const mbpm_report* report, size_t i) {
  if (!report || i >= report->report.artifacts.size()) return nullptr;
  return report->report.artifacts[i].name.c_str();
}

const char* mbpm_report_artifact_data(const mbpm_report* report, size_t i) {
  if (!report || i >= report->report.artifacts.size()) return nullptr;
  return report->report.artifacts[i].content.c_str();
}

mbpm_status mbpm_report_write(const mbpm_report* report, const char* dir) {
  if (!report) return null_argument("report");
  if (!dir) return null_argument("dir");
  return guarded([&] { report->report.write(dir); });
}

void mbpm_report_free(mbpm_report* report) { delete report; }

}  // extern "C"
