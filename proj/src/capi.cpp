#include "admmass/admmass.h"

#include "admmass/experiment.hpp"
#include "admmass/parallel.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct adm_metric {
  admmass::MetricPtr metric;
};

namespace {

thread_local std::string last_error;

adm_status to_status(admmass::ErrorKind kind) {
  switch (kind) {
    case admmass::ErrorKind::invalid_argument: return ADM_E_INVALID_ARGUMENT;
    case admmass::ErrorKind::domain: return ADM_E_DOMAIN;
    case admmass::ErrorKind::numerical: return ADM_E_NUMERICAL;
    case admmass::ErrorKind::io: return ADM_E_IO;
  }
  return ADM_E_INTERNAL;
}

template <class F>
adm_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return ADM_OK;
  } catch (const admmass::Error& e) {
    last_error = e.what();
    return to_status(e.kind());
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("malformed JSON: ") + e.what();
    return ADM_E_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return ADM_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return ADM_E_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return ADM_E_INTERNAL;
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) admmass::fail(admmass::ErrorKind::invalid_argument, what);
}

admmass::Json parse_json(const char* text) {
  require(text != nullptr, "null JSON string");
  return admmass::Json::parse(text);
}

admmass::Point to_point(const adm_metric* m, const double* x) {
  const int n = m->metric->dim();
  admmass::Point p(n);
  for (int i = 0; i < n; ++i) p[i] = x[i];
  return p;
}

}  // namespace

extern "C" {

const char* adm_version(void) { return admmass::version(); }

const char* adm_last_error(void) { return last_error.c_str(); }

adm_status adm_set_workers(int workers) {
  return guarded([&] {
    require(workers >= 1 && workers <= 1024, "workers must lie in [1, 1024]");
    admmass::set_workers(workers);
  });
}

adm_status adm_metric_create(const char* spec_json, adm_metric** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = nullptr;
    const admmass::Json spec =
        admmass::merge_config(admmass::default_config().at("metric"), parse_json(spec_json));
    auto* handle = new adm_metric{admmass::make_metric(spec)};
    *out = handle;
  });
}

void adm_metric_free(adm_metric* metric) { delete metric; }

int adm_metric_dim(const adm_metric* metric) { return metric ? metric->metric->dim() : 0; }

adm_status adm_metric_id(const adm_metric* metric, char* buf, size_t size, size_t* needed) {
  return guarded([&] {
    require(metric != nullptr, "null metric handle");
    const std::string& id = metric->metric->id();
    if (needed) *needed = id.size() + 1;
    if (buf && size > id.size()) std::memcpy(buf, id.c_str(), id.size() + 1);
    else require(buf == nullptr, "buffer too small for metric id");
  });
}

adm_status adm_metric_eval(const adm_metric* metric, const double* x, double* g_out) {
  return guarded([&] {
    require(metric && x && g_out, "null argument");
    const admmass::Matrix g = metric->metric->eval(to_point(metric, x));
    const int n = metric->metric->dim();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g_out[i * n + j] = g(i, j);
  });
}

adm_status adm_scalar_curvature(const adm_metric* metric, const double* x, double* scal_out) {
  return guarded([&] {
    require(metric && x && scal_out, "null argument");
    *scal_out = admmass::curvature_point(*metric->metric, to_point(metric, x)).scal;
  });
}

adm_status adm_mass(const adm_metric* metric, const char* method, const char* cutoff, const double* scales,
                    size_t count, double* limit_out, double* stderr_out) {
  return guarded([&] {
    require(metric && method && scales && limit_out, "null argument");
    require(count >= 4, "≥4 scales required");
    const auto family = admmass::CutoffFamily::parse(cutoff ? cutoff : "ramp");
    const std::vector<double> s(scales, scales + count);
    const auto report =
        admmass::compute_mass(admmass::parse_method(method), *metric->metric, family, s, admmass::QuadratureScheme{});
    *limit_out = report.limit.limit;
    if (stderr_out) *stderr_out = report.limit.limit_stderr;
  });
}

adm_status adm_run(const char* command, const char* config_json, char** report_json, char** report_csv,
                   adm_outcome* outcome) {
  if (report_json) *report_json = nullptr;
  if (report_csv) *report_csv = nullptr;
  return guarded([&] {
    require(command != nullptr, "null command");
    const admmass::Json config = admmass::merge_config(admmass::default_config(), parse_json(config_json));
    const admmass::RunOutput run = admmass::run_command(command, config);
    char* json = report_json ? duplicate(run.report.dump(2) + "\n") : nullptr;
    char* csv = nullptr;
    try {
      csv = report_csv ? duplicate(run.csv) : nullptr;
    } catch (...) {
      std::free(json);
      throw;
    }
    if (report_json) *report_json = json;
    if (report_csv) *report_csv = csv;
    if (outcome) *outcome = static_cast<adm_outcome>(run.outcome);
  });
}

adm_status adm_default_config(char** config_json) {
  return guarded([&] {
    require(config_json != nullptr, "null output");
    *config_json = duplicate(admmass::default_config().dump(2) + "\n");
  });
}

void adm_string_free(char* s) { std::free(s); }

}  // extern "C"
