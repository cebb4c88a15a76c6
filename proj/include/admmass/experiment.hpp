#pragma once

#include "admmass/report.hpp"

#include <string>

namespace admmass {

/// Every accepted key with its default. User configs are merged onto this;
/// keys it does not list are rejected.
Json default_config();

/// Recursive merge: objects merge key by key, everything else in `overrides`
/// replaces the base value. Unknown keys fail with invalid_argument.
Json merge_config(const Json& base, const Json& overrides);

MetricPtr make_metric(const Json& metric_spec);
DiffeoSpec make_diffeo(const Json& diffeo_spec, int n);
QuadratureScheme make_scheme(const Json& config);

enum class Outcome { ok = 0, no_convergence = 2, breach = 3 };

struct RunOutput {
  Json report;
  std::string csv;
  Outcome outcome = Outcome::ok;
};

/// Runs one of mass, validate, invariance, convergence, norms on a merged
/// config. Input problems throw Error(invalid_argument).
RunOutput run_command(const std::string& command, const Json& config);

}  // namespace admmass
