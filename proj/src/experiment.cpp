#include "admmass/experiment.hpp"

#include "admmass/grid.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

namespace admmass {

Json default_config() {
  return Json::parse(R"({
    "metric": {
      "family": "schwarzschild", "n": 3, "m": 1.0, "A": null, "power": null,
      "mean": 1.0, "jump": 0.5, "width": 1.0, "window": [0.0, null],
      "amplitude": 0.3, "frequency": 2.0, "inner_radius": null, "grid": null
    },
    "methods": ["all"],
    "cutoff": "ramp",
    "alphas": "8:256:x2",
    "seed": 0,
    "quadrature": {
      "radial_order": 16, "kink_panel_order": 8, "angular_order": 16,
      "qmc_points": 2048, "qmc_batches": 8
    },
    "validate": {
      "samples": 1000, "r_in": null, "r_out": 64.0, "scalar_flat": null, "inject_faults": [],
      "tolerances": {
        "df_identity": 1e-10, "decomposition": 1e-8, "bianchi": 1e-6,
        "killing": 1e-6, "symmetry": 1e-12, "scalar_flat": 1e-9
      }
    },
    "diffeo": {
      "kind": null, "matrix": null, "translation": null, "seed": 1, "max_shift": 1.0,
      "c": 0.05, "tau_prime": 0.8, "domain_radius": null
    },
    "invariance": { "max_delta": null },
    "norms": { "k": 1, "p": 2.0, "tau": null, "r_out": 256.0, "radii": "8:512:x2", "taus": null }
  })");
}

Json merge_config(const Json& base, const Json& overrides) {
  if (!overrides.is_object()) fail(ErrorKind::invalid_argument, "config must be a JSON object");
  Json out = base;
  for (auto it = overrides.begin(); it != overrides.end(); ++it) {
    if (!base.contains(it.key())) fail(ErrorKind::invalid_argument, "unknown config key '" + it.key() + "'");
    const Json& b = base[it.key()];
    if (b.is_object() && it.value().is_object()) out[it.key()] = merge_config(b, it.value());
    else out[it.key()] = it.value();
  }
  return out;
}

namespace {

double num(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return kInfinity;
    try {
      std::size_t used = 0;
      const double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
  }
  fail(ErrorKind::invalid_argument, std::string("config key '") + key + "' must be a number");
}

double num_or(const Json& j, const char* key, double fallback) { return j.at(key).is_null() ? fallback : num(j, key); }

int integer(const Json& j, const char* key) {
  const double v = num(j, key);
  if (v != std::floor(v) || std::abs(v) > 1e9) fail(ErrorKind::invalid_argument, std::string("config key '") + key + "' must be an integer");
  return static_cast<int>(v);
}

std::string str(const Json& j, const char* key) {
  if (!j.at(key).is_string()) fail(ErrorKind::invalid_argument, std::string("config key '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

std::vector<double> schedule(const Json& j, const char* key) {
  const Json& v = j.at(key);
  std::vector<double> out;
  if (v.is_string()) {
    out = parse_schedule(v.get<std::string>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) fail(ErrorKind::invalid_argument, std::string("config key '") + key + "' must hold numbers");
      out.push_back(x.get<double>());
    }
  } else if (v.is_number()) {
    out.push_back(v.get<double>());
  } else {
    fail(ErrorKind::invalid_argument, std::string("config key '") + key + "' must be a schedule");
  }
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out[i] > out[i - 1])) fail(ErrorKind::invalid_argument, "schedule must be strictly increasing");
  return out;
}

std::vector<double> mass_schedule(const Json& config) {
  const auto s = schedule(config, "alphas");
  if (s.size() < 4)
    fail(ErrorKind::invalid_argument, "≥4 scales required (got " + std::to_string(s.size()) + ")");
  return s;
}

std::vector<MassMethod> methods(const Json& config) {
  const Json& m = config.at("methods");
  std::vector<std::string> names;
  if (m.is_string()) names.push_back(m.get<std::string>());
  else if (m.is_array())
    for (const auto& x : m) names.push_back(x.get<std::string>());
  else fail(ErrorKind::invalid_argument, "config key 'methods' must be a list of names");
  std::vector<MassMethod> out;
  for (const auto& name : names) {
    if (name == "all") {
      for (MassMethod x : {MassMethod::adm_surface, MassMethod::weak, MassMethod::ricci_surface, MassMethod::ricci_weak})
        out.push_back(x);
    } else {
      out.push_back(parse_method(name));
    }
  }
  if (out.empty()) fail(ErrorKind::invalid_argument, "no mass methods requested");
  return out;
}

Json envelope(const std::string& command, const Json& config) {
  Json j;
  j["tool"] = "admmass";
  j["version"] = version();
  j["command"] = command;
  j["config_digest"] = config_digest(config);
  j["config"] = config;
  return j;
}

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::ok: return "ok";
    case Outcome::no_convergence: return "no_convergence";
    case Outcome::breach: return "threshold_breach";
  }
  return "unknown";
}

RunOutput run_mass(const Json& config) {
  const MetricPtr metric = make_metric(config.at("metric"));
  const auto scales = mass_schedule(config);
  const auto family = CutoffFamily::parse(str(config, "cutoff"));
  const auto scheme = make_scheme(config);
  RunOutput out;
  std::vector<MassReport> reports;
  Json results = Json::array();
  for (MassMethod m : methods(config)) {
    reports.push_back(compute_mass(m, *metric, family, scales, scheme));
    if (!reports.back().limit.converged) out.outcome = Outcome::no_convergence;
    results.push_back(to_json(reports.back()));
  }
  out.report = envelope("mass", config);
  out.report["status"] = outcome_name(out.outcome);
  out.report["results"] = std::move(results);
  out.csv = mass_csv(reports);
  return out;
}

RunOutput run_validate(const Json& config) {
  const Json& metric_spec = config.at("metric");
  const MetricPtr metric = make_metric(metric_spec);
  const Json& v = config.at("validate");
  const Json& tol = v.at("tolerances");
  ValidationOptions o;
  o.samples = integer(v, "samples");
  o.r_in = num_or(v, "r_in", 0.0);
  o.r_out = num(v, "r_out");
  o.seed = static_cast<std::uint64_t>(integer(config, "seed"));
  o.tol_df_identity = num(tol, "df_identity");
  o.tol_decomposition = num(tol, "decomposition");
  o.tol_bianchi = num(tol, "bianchi");
  o.tol_killing = num(tol, "killing");
  o.tol_symmetry = num(tol, "symmetry");
  o.tol_scalar_flat = num(tol, "scalar_flat");
  const std::string family = str(metric_spec, "family");
  o.scalar_flat = v.at("scalar_flat").is_null() ? (family == "flat" || family == "schwarzschild")
                                                 : v.at("scalar_flat").get<bool>();
  for (const auto& f : v.at("inject_faults")) o.inject_faults.push_back(f.get<std::string>());
  const ValidationReport rep = validate_metric(metric, o, make_scheme(config));
  RunOutput out;
  out.outcome = rep.passed ? Outcome::ok : Outcome::breach;
  out.report = envelope("validate", config);
  out.report["status"] = outcome_name(out.outcome);
  out.report["results"] = to_json(rep);
  out.csv = residual_table_csv(rep);
  return out;
}

bool strictly_decreasing(const std::vector<double>& deltas, const std::vector<double>& noise) {
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (!(std::abs(deltas[i]) < std::abs(deltas[i - 1]) + noise[i] + noise[i - 1])) return false;
  return true;
}

RunOutput run_invariance(const Json& config) {
  const MetricPtr metric = make_metric(config.at("metric"));
  const Json& dspec = config.at("diffeo");
  if (dspec.at("kind").is_null()) fail(ErrorKind::invalid_argument, "invariance needs diffeo.kind");
  const DiffeoSpec f = make_diffeo(dspec, metric->dim());
  const auto scales = mass_schedule(config);
  const auto family = CutoffFamily::parse(str(config, "cutoff"));
  const auto results = invariance_experiment(metric, f, methods(config), scales, family, make_scheme(config));
  const double max_delta = num_or(config.at("invariance"), "max_delta", f.kind == DiffeoKind::isometry ? 1e-6 : 1e-2);

  RunOutput out;
  Json rs = Json::array();
  for (const auto& r : results) {
    Json j = to_json(r);
    std::vector<double> noise;
    double quad = 0.0;
    for (std::size_t i = 0; i < r.deltas.size(); ++i) {
      noise.push_back(r.before.quad_errors[i] + r.after.quad_errors[i]);
      quad = std::max(quad, noise.back());
    }
    const bool within = std::abs(r.delta_limit.limit) <= max_delta + quad;
    j["max_delta"] = max_delta;
    j["quad_error"] = quad;
    j["within_threshold"] = within;
    j["deltas_decreasing"] = strictly_decreasing(r.deltas, noise);
    if (!within) out.outcome = Outcome::breach;
    else if ((!r.before.limit.converged || !r.after.limit.converged) && out.outcome == Outcome::ok)
      out.outcome = Outcome::no_convergence;
    rs.push_back(std::move(j));
  }
  out.report = envelope("invariance", config);
  out.report["status"] = outcome_name(out.outcome);
  out.report["diffeo"] = f.name;
  out.report["results"] = std::move(rs);
  out.csv = invariance_csv(results);
  return out;
}

RunOutput run_convergence(const Json& config) {
  const MetricPtr metric = make_metric(config.at("metric"));
  const auto scales = mass_schedule(config);
  const auto family = CutoffFamily::parse(str(config, "cutoff"));
  const QuadratureScheme base = make_scheme(config);
  QuadratureScheme fine = base;
  fine.radial_order *= 2;
  fine.kink_panel_order *= 2;
  fine.angular_order *= 2;
  fine.qmc_points *= 4;
  RunOutput out;
  std::vector<MassReport> reports;
  Json rs = Json::array();
  for (MassMethod m : methods(config)) {
    MassReport a = compute_mass(m, *metric, family, scales, base);
    const MassReport b = compute_mass(m, *metric, family, scales, fine);
    Json j = to_json(a);
    std::vector<double> refinement, steps, distance;
    for (std::size_t i = 0; i < scales.size(); ++i) {
      refinement.push_back(std::abs(b.values[i] - a.values[i]));
      distance.push_back(std::abs(a.values[i] - a.limit.limit));
      if (i) steps.push_back(std::abs(a.values[i] - a.values[i - 1]));
    }
    j["refined_values"] = numbers(b.values);
    j["refinement_differences"] = numbers(refinement);
    j["successive_differences"] = numbers(steps);
    j["distance_to_limit"] = numbers(distance);
    j["observed_rate"] = number(-log_log_slope(scales, distance));
    if (!a.limit.converged) out.outcome = Outcome::no_convergence;
    rs.push_back(std::move(j));
    reports.push_back(std::move(a));
  }
  out.report = envelope("convergence", config);
  out.report["status"] = outcome_name(out.outcome);
  out.report["results"] = std::move(rs);
  out.csv = mass_csv(reports);
  return out;
}

RunOutput run_norms(const Json& config) {
  const MetricPtr metric = make_metric(config.at("metric"));
  const Json& nj = config.at("norms");
  const int n = metric->dim();
  const int k = integer(nj, "k");
  const double p = num(nj, "p");
  const double tau = num_or(nj, "tau", 0.5 * (n - 2));
  const auto scheme = make_scheme(config);
  const AeClassReport ae = check_ae_class(metric, k, p, tau, num(nj, "r_out"), scheme);
  const auto radii = schedule(nj, "radii");
  std::vector<FalloffQuery> queries;
  if (nj.at("taus").is_null()) {
    for (double t : {0.25 * (n - 2), 0.5 * (n - 2), 1.0 * (n - 2), 1.5 * (n - 2)}) queries.push_back({0, p, t});
  } else {
    for (const auto& t : nj.at("taus")) queries.push_back({0, p, t.get<double>()});
  }
  const FalloffReport fo = classify_falloff(metric_error_field(metric), radii, queries, scheme);
  RunOutput out;
  out.report = envelope("norms", config);
  out.report["status"] = outcome_name(out.outcome);
  Json r;
  r["metric_id"] = metric->id();
  r["k"] = k;
  r["p"] = number(p);
  r["tau"] = tau;
  r["ae_class"] = to_json(ae);
  r["falloff"] = to_json(fo);
  out.report["results"] = std::move(r);
  std::ostringstream csv;
  csv.precision(17);
  csv << "dyad_inner_radius,contribution\n";
  for (std::size_t i = 0; i < ae.error_norm.dyad_radii.size(); ++i)
    csv << ae.error_norm.dyad_radii[i] << ',' << ae.error_norm.contributions[i] << '\n';
  out.csv = csv.str();
  return out;
}

}  // namespace

QuadratureScheme make_scheme(const Json& config) {
  const Json& q = config.at("quadrature");
  QuadratureScheme s;
  s.radial_order = integer(q, "radial_order");
  s.kink_panel_order = integer(q, "kink_panel_order");
  s.angular_order = integer(q, "angular_order");
  s.qmc_points = integer(q, "qmc_points");
  s.qmc_batches = integer(q, "qmc_batches");
  const double seed = num(config, "seed");
  if (seed < 0 || seed != std::floor(seed)) fail(ErrorKind::invalid_argument, "seed must be a non-negative integer");
  s.seed = static_cast<std::uint64_t>(seed);
  if (s.radial_order < 2 || s.kink_panel_order < 2 || s.angular_order < 2 || s.qmc_points < 16 || s.qmc_batches < 2)
    fail(ErrorKind::invalid_argument, "quadrature orders too small");
  return s;
}

MetricPtr make_metric(const Json& spec) {
  const std::string family = str(spec, "family");
  const int n = integer(spec, "n");
  if (n < 3 || n > kMaxDim) fail(ErrorKind::invalid_argument, "dimension must lie in [3, " + std::to_string(kMaxDim) + "]");
  // mean / r + jump w(r) / r^2 reaches 1 at r = 1 for the default mean.
  const double inner = num_or(spec, "inner_radius", family == "kinked" ? 2.0 : 1.0);
  const double power = num_or(spec, "power", n - 2.0);
  if (family == "flat") return make_flat(n);
  if (family == "schwarzschild") return make_schwarzschild_isotropic(n, num(spec, "m"), inner);
  if (family == "conformal") {
    if (spec.at("A").is_null()) fail(ErrorKind::invalid_argument, "conformal metric needs A");
    return make_conformally_flat(n, power_profile(num(spec, "A"), power), inner);
  }
  if (family == "radial") {
    if (spec.at("A").is_null()) fail(ErrorKind::invalid_argument, "radial metric needs A");
    return make_radial_perturbation(n, power_profile(num(spec, "A"), power), inner);
  }
  if (family == "log_oscillating") {
    if (spec.at("A").is_null()) fail(ErrorKind::invalid_argument, "log_oscillating metric needs A");
    return make_radial_perturbation(
        n, log_oscillating_profile(num(spec, "A"), power, num(spec, "amplitude"), num(spec, "frequency")), inner);
  }
  if (family == "kinked") {
    const Json& w = spec.at("window");
    if (!w.is_array() || w.size() != 2) fail(ErrorKind::invalid_argument, "kinked metric window must be [begin, end]");
    const double wb = w[0].is_null() ? 0.0 : w[0].get<double>();
    const double we = w[1].is_null() ? kInfinity : w[1].get<double>();
    return make_radial_perturbation(n, kinked_profile(num(spec, "mean"), num(spec, "jump"), num(spec, "width"), wb, we),
                                    inner);
  }
  if (family == "grid") {
    if (!spec.at("grid").is_string()) fail(ErrorKind::invalid_argument, "grid metric needs a file path");
    const std::string path = spec.at("grid").get<std::string>();
    if (!std::filesystem::exists(path)) fail(ErrorKind::invalid_argument, "grid file not found: " + path);
    auto grid = std::make_shared<const GridMetric>(GridMetric::load(path));
    if (grid->dim() != n) fail(ErrorKind::invalid_argument, "grid file dimension differs from n");
    return lift_grid(grid);
  }
  fail(ErrorKind::invalid_argument, "unknown metric family '" + family + "'");
}

DiffeoSpec make_diffeo(const Json& spec, int n) {
  const std::string kind = str(spec, "kind");
  if (kind == "isometry") {
    Matrix q = Matrix::Identity(n, n);
    Point b = Point::Zero(n);
    if (!spec.at("matrix").is_null()) {
      const Json& m = spec.at("matrix");
      if (!m.is_array() || static_cast<int>(m.size()) != n) fail(ErrorKind::invalid_argument, "isometry matrix must be n x n");
      for (int i = 0; i < n; ++i) {
        if (!m[i].is_array() || static_cast<int>(m[i].size()) != n) fail(ErrorKind::invalid_argument, "isometry matrix must be n x n");
        for (int j = 0; j < n; ++j) q(i, j) = m[i][j].get<double>();
      }
    }
    if (!spec.at("translation").is_null()) {
      const Json& t = spec.at("translation");
      if (!t.is_array() || static_cast<int>(t.size()) != n) fail(ErrorKind::invalid_argument, "translation must have n entries");
      for (int i = 0; i < n; ++i) b[i] = t[i].get<double>();
    }
    return make_isometry(q, b);
  }
  if (kind == "random_isometry")
    return random_isometry(n, static_cast<std::uint64_t>(integer(spec, "seed")), num(spec, "max_shift"));
  if (kind == "almost_identity")
    return make_almost_identity(n, num(spec, "c"), num(spec, "tau_prime"), num_or(spec, "domain_radius", 1.0));
  fail(ErrorKind::invalid_argument, "unknown diffeo kind '" + kind + "'");
}

RunOutput run_command(const std::string& command, const Json& config) {
  if (command == "mass") return run_mass(config);
  if (command == "validate") return run_validate(config);
  if (command == "invariance") return run_invariance(config);
  if (command == "convergence") return run_convergence(config);
  if (command == "norms") return run_norms(config);
  fail(ErrorKind::invalid_argument, "unknown command '" + command + "'");
}

}  // namespace admmass
