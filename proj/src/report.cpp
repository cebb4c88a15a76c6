#include "admmass/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace admmass {

const char* version() { return ADMMASS_VERSION; }

Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json numbers(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

Json to_json(const LimitFit& fit) {
  Json j;
  j["limit"] = number(fit.limit);
  j["limit_stderr"] = number(fit.limit_stderr);
  j["q"] = number(fit.q);
  j["c"] = number(fit.c);
  j["model"] = fit.model;
  j["converged"] = fit.converged;
  return j;
}

Json to_json(const MassReport& r) {
  Json j;
  j["method"] = to_string(r.method);
  j["dim"] = r.dim;
  j["metric_id"] = r.metric_id;
  j["cutoff"] = r.cutoff;
  j["normalization"] = number(r.normalization);
  j["scales"] = numbers(r.scales);
  j["values"] = numbers(r.values);
  j["quad_errors"] = numbers(r.quad_errors);
  j["limit"] = number(r.limit.limit);
  j["limit_stderr"] = number(r.limit.limit_stderr);
  j["q"] = number(r.limit.q);
  j["c"] = number(r.limit.c);
  j["model"] = r.limit.model;
  j["converged"] = r.limit.converged;
  j["flags"] = r.flags;
  return j;
}

Json to_json(const ValidationReport& r) {
  Json j;
  j["metric_id"] = r.metric_id;
  j["passed"] = r.passed;
  j["offenders"] = r.offenders;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json x;
    x["name"] = row.name;
    x["value"] = number(row.value);
    x["threshold"] = number(row.threshold);
    x["points"] = row.points;
    x["enforced"] = row.enforced;
    x["passed"] = row.passed;
    x["note"] = row.note;
    rows.push_back(std::move(x));
  }
  j["rows"] = std::move(rows);
  return j;
}

Json to_json(const InvarianceResult& r) {
  Json j;
  j["method"] = to_string(r.method);
  j["before"] = to_json(r.before);
  j["after"] = to_json(r.after);
  j["deltas"] = numbers(r.deltas);
  j["delta_limit"] = to_json(r.delta_limit);
  return j;
}

Json to_json(const WeightedNormResult& r) {
  Json j;
  j["value"] = number(r.value);
  j["tail_estimate"] = number(r.tail_estimate);
  j["extrapolated"] = number(r.extrapolated);
  j["dyad_radii"] = numbers(r.dyad_radii);
  j["contributions"] = numbers(r.contributions);
  j["dyad_slope"] = number(r.dyad_slope);
  j["verdict"] = to_string(r.verdict);
  return j;
}

Json to_json(const FalloffReport& r) {
  Json j;
  j["radii"] = numbers(r.radii);
  j["magnitudes"] = numbers(r.magnitudes);
  j["fitted_sigma"] = number(r.fitted_sigma);
  j["fitted_C"] = number(r.fitted_C);
  j["residual"] = number(r.residual);
  Json q = Json::array();
  for (const auto& query : r.queries) {
    Json x;
    x["k"] = query.k;
    x["p"] = number(query.p);
    x["tau"] = number(query.tau);
    x["verdict"] = to_string(query.verdict);
    q.push_back(std::move(x));
  }
  j["queries"] = std::move(q);
  return j;
}

Json to_json(const AeClassReport& r) {
  Json j;
  j["lambda_min"] = number(r.lambda_min);
  j["lambda_max"] = number(r.lambda_max);
  j["comparability"] = number(r.comparability);
  j["bounded"] = r.bounded;
  j["comparable"] = r.comparable;
  j["error_norm"] = to_json(r.error_norm);
  j["verdict"] = to_string(r.verdict);
  return j;
}

namespace {

std::string fmt(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string mass_csv(const std::vector<MassReport>& reports) {
  std::ostringstream os;
  os << "method,metric_id,cutoff,scale,value,quad_error,limit,limit_stderr\n";
  for (const auto& r : reports)
    for (std::size_t i = 0; i < r.scales.size(); ++i)
      os << to_string(r.method) << ',' << quoted(r.metric_id) << ',' << r.cutoff << ',' << fmt(r.scales[i]) << ','
         << fmt(r.values[i]) << ',' << fmt(r.quad_errors[i]) << ',' << fmt(r.limit.limit) << ','
         << fmt(r.limit.limit_stderr) << '\n';
  return os.str();
}

std::string invariance_csv(const std::vector<InvarianceResult>& results) {
  std::ostringstream os;
  os << "method,scale,before,after,delta\n";
  for (const auto& r : results)
    for (std::size_t i = 0; i < r.deltas.size(); ++i)
      os << to_string(r.method) << ',' << fmt(r.before.scales[i]) << ',' << fmt(r.before.values[i]) << ','
         << fmt(r.after.values[i]) << ',' << fmt(r.deltas[i]) << '\n';
  return os.str();
}

std::string config_digest(const Json& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace admmass
