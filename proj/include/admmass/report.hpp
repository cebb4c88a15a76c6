#pragma once

#include "admmass/mass.hpp"
#include "admmass/transforms.hpp"
#include "admmass/validation.hpp"
#include "admmass/weighted.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace admmass {

/// Key order follows insertion so reports read top-down.
using Json = nlohmann::ordered_json;

const char* version();

/// Finite doubles as numbers, the rest as the strings "inf", "-inf", "nan".
Json number(double v);
Json numbers(const std::vector<double>& v);

Json to_json(const LimitFit& fit);
Json to_json(const MassReport& report);
Json to_json(const ValidationReport& report);
Json to_json(const InvarianceResult& result);
Json to_json(const WeightedNormResult& result);
Json to_json(const FalloffReport& report);
Json to_json(const AeClassReport& report);

/// One row per (method, scale): method,metric_id,cutoff,scale,value,quad_error,limit,limit_stderr.
std::string mass_csv(const std::vector<MassReport>& reports);
/// One row per (method, scale) with before, after and delta.
std::string invariance_csv(const std::vector<InvarianceResult>& results);

/// FNV-1a 64 of the compact dump, as 16 hex digits.
std::string config_digest(const Json& config);

}  // namespace admmass
