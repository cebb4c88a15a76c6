// Exercises the shared library through its C header only.
#include "admmass/admmass.h"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

TEST_CASE("version and defaults") {
  CHECK(std::strlen(adm_version()) > 0);
  char* config = nullptr;
  REQUIRE(adm_default_config(&config) == ADM_OK);
  CHECK(std::string(config).find("\"metric\"") != std::string::npos);
  adm_string_free(config);
}

TEST_CASE("metric handle lifecycle") {
  adm_metric* m = nullptr;
  REQUIRE(adm_metric_create(R"({"family": "schwarzschild", "n": 3, "m": 1})", &m) == ADM_OK);
  CHECK(adm_metric_dim(m) == 3);

  size_t needed = 0;
  REQUIRE(adm_metric_id(m, nullptr, 0, &needed) == ADM_OK);
  CHECK(needed > 1);
  std::string id(needed, '\0');
  REQUIRE(adm_metric_id(m, id.data(), id.size(), nullptr) == ADM_OK);
  CHECK(id.find("schwarzschild") != std::string::npos);
  char small[2];
  CHECK(adm_metric_id(m, small, sizeof small, nullptr) == ADM_E_INVALID_ARGUMENT);

  const double x[3] = {2.0, 0.0, 0.0};
  double g[9];
  REQUIRE(adm_metric_eval(m, x, g) == ADM_OK);
  CHECK(g[0] == doctest::Approx(2.44140625));
  CHECK(g[1] == 0.0);
  double scal = 1.0;
  REQUIRE(adm_scalar_curvature(m, x, &scal) == ADM_OK);
  CHECK(std::abs(scal) <= 1e-9);

  const double inside[3] = {0.5, 0.0, 0.0};
  CHECK(adm_metric_eval(m, inside, g) == ADM_E_DOMAIN);
  CHECK(std::string(adm_last_error()).find("outside") != std::string::npos);
  REQUIRE(adm_metric_eval(m, x, g) == ADM_OK);
  CHECK(std::string(adm_last_error()).empty());
  adm_metric_free(m);
  adm_metric_free(nullptr);
}

TEST_CASE("mass through the C interface") {
  adm_metric* m = nullptr;
  REQUIRE(adm_metric_create(R"({"family": "schwarzschild"})", &m) == ADM_OK);
  const double scales[] = {8, 16, 32, 64, 128, 256};
  double limit = 0.0, err = 0.0;
  REQUIRE(adm_mass(m, "weak", "ramp", scales, 6, &limit, &err) == ADM_OK);
  CHECK(std::abs(limit - 1.0) <= 1e-3);
  CHECK(adm_mass(m, "weak", "ramp", scales, 3, &limit, &err) == ADM_E_INVALID_ARGUMENT);
  CHECK(adm_mass(m, "komar", "ramp", scales, 6, &limit, &err) == ADM_E_INVALID_ARGUMENT);
  adm_metric_free(m);
}

TEST_CASE("input errors") {
  adm_metric* m = reinterpret_cast<adm_metric*>(0x1);
  CHECK(adm_metric_create("{not json", &m) == ADM_E_INVALID_ARGUMENT);
  CHECK(m == nullptr);
  CHECK(adm_metric_create(R"({"family": "flat", "colour": 1})", &m) == ADM_E_INVALID_ARGUMENT);
  CHECK(adm_metric_create(nullptr, &m) == ADM_E_INVALID_ARGUMENT);
  CHECK(adm_set_workers(0) == ADM_E_INVALID_ARGUMENT);
  CHECK(adm_metric_eval(nullptr, nullptr, nullptr) == ADM_E_INVALID_ARGUMENT);
}

TEST_CASE("run commands") {
  char* json = nullptr;
  char* csv = nullptr;
  adm_outcome outcome = ADM_OUTCOME_OK;
  REQUIRE(adm_run("validate", R"({"validate": {"samples": 100, "inject_faults": ["scalar_decomposition"]}})", &json,
                  &csv, &outcome) == ADM_OK);
  CHECK(outcome == ADM_OUTCOME_THRESHOLD_BREACH);
  CHECK(std::string(json).find("scalar_decomposition") != std::string::npos);
  adm_string_free(json);
  adm_string_free(csv);

  REQUIRE(adm_run("mass", R"({"methods": ["adm"], "metric": {"family": "flat"}})", &json, nullptr, &outcome) ==
          ADM_OK);
  CHECK(outcome == ADM_OUTCOME_OK);
  adm_string_free(json);

  CHECK(adm_run("mass", R"({"alphas": "8"})", &json, &csv, &outcome) == ADM_E_INVALID_ARGUMENT);
  CHECK(json == nullptr);
  CHECK(std::string(adm_last_error()).find("4 scales required") != std::string::npos);
}
