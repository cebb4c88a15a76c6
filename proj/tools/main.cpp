// admmass command-line driver. Links only the C API.
#include "admmass/admmass.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitInput = 1;

struct Options {
  std::string config_path;
  std::optional<std::string> metric;
  std::optional<int> n;
  std::optional<double> m, A, power;
  std::vector<std::string> methods;
  std::optional<std::string> cutoff, alphas;
  std::string out_dir;
  int workers = 1;
  std::optional<long long> seed;
  std::optional<std::string> grid, diffeo;
  std::optional<double> c, tau_prime, max_shift;
  std::optional<long long> diffeo_seed;
  std::vector<std::string> faults;
  std::optional<int> samples;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config")->envname("ADMMASS_CONFIG");
  cmd->add_option("--metric", o.metric, "flat, schwarzschild, conformal, radial, log_oscillating, kinked, grid")
      ->envname("ADMMASS_METRIC");
  cmd->add_option("--n", o.n, "spatial dimension")->envname("ADMMASS_N");
  cmd->add_option("--m", o.m, "Schwarzschild mass parameter")->envname("ADMMASS_M");
  cmd->add_option("--A", o.A, "profile amplitude")->envname("ADMMASS_A");
  cmd->add_option("--power", o.power, "profile decay power")->envname("ADMMASS_POWER");
  cmd->add_option("--grid", o.grid, "grid metric file")->envname("ADMMASS_GRID");
  cmd->add_option("--method", o.methods, "mass method(s) or 'all'")->delimiter(',')->envname("ADMMASS_METHOD");
  cmd->add_option("--cutoff", o.cutoff, "ramp, smooth_ramp, wide_ramp[:lambda]")->envname("ADMMASS_CUTOFF");
  cmd->add_option("--alphas", o.alphas, "scale schedule, e.g. 8:256:x2")->envname("ADMMASS_ALPHAS");
  cmd->add_option("--out", o.out_dir, "directory for report files")->envname("ADMMASS_OUT");
  cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::Range(1, 1024))->envname("ADMMASS_WORKERS");
  cmd->add_option("--seed", o.seed, "seed for quasi-random rules and samples")->envname("ADMMASS_SEED");
  cmd->add_option("--set", o.sets, "override a config entry: path.to.key=JSON")->take_all();
}

// Sets config[a][b]... = value for a dotted path.
void set_path(Json& config, const std::string& path, const Json& value) {
  Json* node = &config;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw CLI::ValidationError("--set", "empty key");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object()) (*node)[parts[i]] = Json::object();
    node = &(*node)[parts[i]];
  }
  (*node)[parts.back()] = value;
}

Json build_config(const Options& o) {
  Json config = Json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw std::runtime_error("cannot read config file " + o.config_path);
    config = Json::parse(in);
    if (!config.is_object()) throw std::runtime_error("config file must hold a JSON object");
  }
  // Flags win over the file.
  if (o.metric) set_path(config, "metric.family", *o.metric);
  if (o.n) set_path(config, "metric.n", *o.n);
  if (o.m) set_path(config, "metric.m", *o.m);
  if (o.A) set_path(config, "metric.A", *o.A);
  if (o.power) set_path(config, "metric.power", *o.power);
  if (o.grid) set_path(config, "metric.grid", *o.grid);
  if (!o.methods.empty()) config["methods"] = o.methods;
  if (o.cutoff) config["cutoff"] = *o.cutoff;
  if (o.alphas) config["alphas"] = *o.alphas;
  if (o.seed) config["seed"] = *o.seed;
  if (o.diffeo) set_path(config, "diffeo.kind", *o.diffeo);
  if (o.c) set_path(config, "diffeo.c", *o.c);
  if (o.tau_prime) set_path(config, "diffeo.tau_prime", *o.tau_prime);
  if (o.max_shift) set_path(config, "diffeo.max_shift", *o.max_shift);
  if (o.diffeo_seed) set_path(config, "diffeo.seed", *o.diffeo_seed);
  if (!o.faults.empty()) set_path(config, "validate.inject_faults", o.faults);
  if (o.samples) set_path(config, "validate.samples", *o.samples);
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw std::runtime_error("--set expects path=value, got '" + s + "'");
    const std::string text = s.substr(eq + 1);
    Json value;
    try {
      value = Json::parse(text);
    } catch (const Json::exception&) {
      value = text;  // bare strings need no quotes
    }
    set_path(config, s.substr(0, eq), value);
  }
  return config;
}

std::string fmt(const Json& v) {
  if (v.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v.get<double>());
    return buf;
  }
  return v.dump();
}

void summarize(const std::string& command, const Json& report) {
  const Json& results = report["results"];
  if (command == "mass" || command == "convergence") {
    for (const auto& r : results)
      std::cout << r["method"].get<std::string>() << ": limit " << fmt(r["limit"]) << " +- " << fmt(r["limit_stderr"])
                << " (" << r["model"].get<std::string>() << ", q = " << fmt(r["q"]) << ")\n";
  } else if (command == "invariance") {
    for (const auto& r : results)
      std::cout << r["method"].get<std::string>() << ": delta " << fmt(r["delta_limit"]["limit"]) << " +- "
                << fmt(r["delta_limit"]["limit_stderr"]) << (r["within_threshold"].get<bool>() ? "" : " (over threshold)")
                << '\n';
  } else if (command == "validate") {
    for (const auto& row : results["rows"])
      std::cout << row["name"].get<std::string>() << ": " << fmt(row["value"]) << " (threshold "
                << fmt(row["threshold"]) << ")" << (row["passed"].get<bool>() ? "" : " FAILED") << '\n';
  } else if (command == "norms") {
    std::cout << "ae class: " << results["ae_class"]["verdict"].get<std::string>() << ", fitted sigma "
              << fmt(results["falloff"]["fitted_sigma"]) << '\n';
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

int run(const std::string& command, const Options& o) {
  Json config;
  try {
    config = build_config(o);
  } catch (const std::exception& e) {
    std::cerr << "admmass: " << e.what() << '\n';
    return kExitInput;
  }
  if (adm_set_workers(o.workers) != ADM_OK) {
    std::cerr << "admmass: " << adm_last_error() << '\n';
    return kExitInput;
  }
  char* json = nullptr;
  char* csv = nullptr;
  adm_outcome outcome = ADM_OUTCOME_OK;
  const adm_status status = adm_run(command.c_str(), config.dump().c_str(), &json, &csv, &outcome);
  if (status != ADM_OK) {
    std::cerr << "admmass: " << adm_last_error() << '\n';
    return kExitInput;
  }
  const std::string report_text = json;
  const std::string csv_text = csv;
  adm_string_free(json);
  adm_string_free(csv);
  const Json report = Json::parse(report_text);

  if (o.out_dir.empty()) {
    std::cout << report_text;
  } else {
    try {
      std::filesystem::create_directories(o.out_dir);
      write_file(std::filesystem::path(o.out_dir) / (command + ".json"), report_text);
      write_file(std::filesystem::path(o.out_dir) / (command + ".csv"), csv_text);
    } catch (const std::exception& e) {
      std::cerr << "admmass: " << e.what() << '\n';
      return kExitInput;
    }
    summarize(command, report);
  }
  if (outcome == ADM_OUTCOME_THRESHOLD_BREACH) {
    std::cerr << "admmass: threshold breach:";
    if (command == "validate") {
      for (const auto& name : report["results"]["offenders"]) std::cerr << ' ' << name.get<std::string>();
    } else {
      for (const auto& r : report["results"])
        if (!r.value("within_threshold", true)) std::cerr << ' ' << r["method"].get<std::string>();
    }
    std::cerr << '\n';
  } else if (outcome == ADM_OUTCOME_NO_CONVERGENCE) {
    std::cerr << "admmass: no convergence flagged; see the report flags\n";
  }
  return static_cast<int>(outcome);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical ADM mass experiments"};
  app.set_version_flag("--version", adm_version());
  app.require_subcommand(1);
  Options o;

  auto* mass = app.add_subcommand("mass", "mass limits for one metric and several methods");
  auto* validate = app.add_subcommand("validate", "identity residual table for one metric");
  auto* invariance = app.add_subcommand("invariance", "masses before and after a change of chart");
  auto* convergence = app.add_subcommand("convergence", "mass sequences under base and refined quadrature");
  auto* norms = app.add_subcommand("norms", "weighted norms and fall-off of g - delta");
  for (auto* cmd : {mass, validate, invariance, convergence, norms}) add_common(cmd, o);

  validate->add_option("--fault", o.faults, "inject a named fault (scalar_decomposition)")
      ->envname("ADMMASS_FAULT");
  validate->add_option("--samples", o.samples, "sample points")->envname("ADMMASS_SAMPLES");
  invariance->add_option("--diffeo", o.diffeo, "isometry, random_isometry, almost_identity")->envname("ADMMASS_DIFFEO");
  invariance->add_option("--c", o.c, "almost-identity amplitude")->envname("ADMMASS_C");
  invariance->add_option("--tau-prime", o.tau_prime, "almost-identity decay exponent")->envname("ADMMASS_TAU_PRIME");
  invariance->add_option("--max-shift", o.max_shift, "random isometry translation bound")
      ->envname("ADMMASS_MAX_SHIFT");
  invariance->add_option("--diffeo-seed", o.diffeo_seed, "random isometry seed")->envname("ADMMASS_DIFFEO_SEED");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }
  for (auto* cmd : {mass, validate, invariance, convergence, norms})
    if (cmd->parsed()) return run(cmd->get_name(), o);
  return kExitInput;
}
