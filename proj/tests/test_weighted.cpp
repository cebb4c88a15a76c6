#include "admmass/weighted.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace admmass;

TEST_SUITE("weighted") {

TEST_CASE("norm of r^-2 against the radial closed form") {
  const auto t = radial_scalar_field(3, power_profile(1.0, 2.0));
  WeightedNormSpec spec;
  spec.k = 0;
  spec.p = 2.0;
  spec.tau = 0.5;
  spec.r_out = 256.0;
  const auto result = weighted_norm(t, spec);
  CHECK(std::abs(result.extrapolated - 2.0466534158929770) <= 1e-8);
  CHECK(result.value < result.extrapolated);
  CHECK(result.verdict == Verdict::member);
}

TEST_CASE("logarithmic divergence is detected") {
  const auto t = radial_scalar_field(3, power_profile(1.0, 2.0));
  WeightedNormSpec spec;
  spec.tau = 2.0;
  spec.r_out = 512.0;
  const auto result = weighted_norm(t, spec);
  CHECK(result.verdict == Verdict::non_member);
  // Equal contributions per dyad.
  const auto& c = result.contributions;
  CHECK(c[c.size() - 2] == doctest::Approx(c[c.size() - 3]).epsilon(1e-6));
}

TEST_CASE("sup norm") {
  const auto t = radial_scalar_field(3, power_profile(1.0, 2.0));
  WeightedNormSpec spec;
  spec.p = kInfinity;
  spec.tau = 1.0;
  CHECK(weighted_norm(t, spec).verdict == Verdict::member);
  spec.tau = 2.0;
  CHECK(weighted_norm(t, spec).verdict != Verdict::member);
}

TEST_CASE("fall-off of schwarzschild") {
  const auto e = metric_error_field(make_schwarzschild_isotropic(3, 1.0));
  const auto report = classify_falloff(e, {32, 64, 128, 256, 512, 1024, 2048},
                                       {{0, 2.0, 0.5, Verdict::member}, {0, 2.0, 1.0, Verdict::member}});
  CHECK(report.fitted_sigma == doctest::Approx(1.0).epsilon(0.02));
  CHECK(report.queries[0].verdict == Verdict::member);
  CHECK(report.queries[1].verdict != Verdict::member);
}

TEST_CASE("fall-off of an oscillating profile") {
  const auto t = radial_scalar_field(3, log_oscillating_profile(1.0, 0.5, 0.3, 2.0));
  std::vector<FalloffQuery> queries;
  for (double tau : {0.1, 0.2, 0.3, 0.4, 0.5}) queries.push_back({0, kInfinity, tau, Verdict::member});
  const auto report = classify_falloff(t, {8, 16, 32, 64, 128, 256, 512, 1024}, queries);
  CHECK(report.fitted_sigma == doctest::Approx(0.5).epsilon(0.06));
  for (std::size_t i = 0; i + 1 < queries.size(); ++i) CHECK(report.queries[i].verdict == Verdict::member);
  CHECK(report.queries.back().verdict == Verdict::non_member);
}

TEST_CASE("asymptotically euclidean class") {
  const auto schw = check_ae_class(make_schwarzschild_isotropic(3, 1.0), 1, 2.0, 0.5);
  CHECK(schw.verdict == Verdict::member);
  CHECK(schw.bounded);
  CHECK(schw.comparable);
  RadialProfile constant;
  constant.value = [](double) { return 0.5; };
  constant.d1 = [](double) { return 0.0; };
  constant.d2 = [](double) { return 0.0; };
  constant.inner_d1 = constant.d1;
  constant.kinks = [](double, double) { return std::vector<double>{}; };
  constant.decay_rate = 0.0;
  constant.name = "constant";
  const auto flat_offset = check_ae_class(make_radial_perturbation(3, constant), 1, 2.0, 0.1);
  CHECK(flat_offset.verdict == Verdict::non_member);
}

TEST_CASE("product rule for weighted norms") {
  const auto u = power_profile(1.0, 1.0);
  const auto h = holder_product_check(3, u, u, 0, 4.0, 4.0, 2.0, 0.5, 0.5, 1.0, 64.0);
  CHECK(h.ratio == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(h.ratio <= 1.0 + 1e-6);
  CHECK_THROWS_AS(holder_product_check(3, u, u, 0, 4.0, 4.0, 3.0, 0.5, 0.5, 1.0, 64.0), Error);
}

TEST_CASE("product rule on random radial profiles") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), power(0.6, 2.5), amp(0.0, 0.4), freq(0.5, 3.0);
  for (int i = 0; i < 20; ++i) {
    const auto u1 = log_oscillating_profile(coef(rng), power(rng), amp(rng), freq(rng));
    const auto u2 = power_profile(coef(rng), power(rng));
    const int k = i % 3;
    const auto near = holder_product_check(3, u1, u2, k, 4.0, 4.0, 2.0, 0.25, 0.25, 1.0, 64.0);
    const auto far = holder_product_check(3, u1, u2, k, 4.0, 4.0, 2.0, 0.25, 0.25, 1.0, 128.0);
    CAPTURE(i);
    CHECK(std::isfinite(near.ratio));
    CHECK(near.ratio <= near.constant);
    CHECK(far.ratio <= far.constant);
    CHECK(far.ratio == doctest::Approx(near.ratio).epsilon(0.05));
  }
}

TEST_CASE("scaled fields scale the norm") {
  const auto t = radial_scalar_field(4, power_profile(1.0, 3.0));
  WeightedNormSpec spec;
  spec.k = 2;
  spec.tau = 1.0;
  const double base = weighted_norm(t, spec).value;
  CHECK(weighted_norm(scaled_field(t, -3.0), spec).value == doctest::Approx(3.0 * base).epsilon(1e-13));
}

}  // TEST_SUITE
