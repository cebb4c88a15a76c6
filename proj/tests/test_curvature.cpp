#include "admmass/curvature.hpp"
#include "admmass/validation.hpp"

#include <doctest.h>

#include <cmath>

using namespace admmass;

namespace {

Point point(std::initializer_list<double> v) {
  Point p(static_cast<int>(v.size()));
  int i = 0;
  for (double c : v) p[i++] = c;
  return p;
}

}  // namespace

TEST_SUITE("curvature") {

// Reference values from tests/oracles/compute_oracles.py.
TEST_CASE("schwarzschild christoffel symbols and ricci") {
  const auto g = make_schwarzschild_isotropic(3, 1.0);
  const Point x = point({4, 0, 0});
  const auto c = curvature_point(*g, x);
  CHECK(c.gamma[0](0, 0) == doctest::Approx(-0.055555555555555556).epsilon(1e-12));
  CHECK(c.gamma[1](0, 1) == doctest::Approx(-0.055555555555555556).epsilon(1e-12));
  CHECK(c.gamma[0](1, 1) == doctest::Approx(0.055555555555555556).epsilon(1e-12));
  CHECK(c.gamma[2](0, 1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(c.ric(0, 0) == doctest::Approx(-0.024691358024691358).epsilon(1e-10));
  CHECK(c.ric(1, 1) == doctest::Approx(0.012345679012345679).epsilon(1e-10));
  CHECK(std::abs(c.scal) <= 1e-9);
  CHECK((c.einstein - c.ric).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("radial perturbation against the symbolic curvature") {
  const auto g = make_radial_perturbation(3, power_profile(0.1, 1.0));
  const Point x = point({3, 4, 0});
  const auto c = curvature_point(*g, x);
  CHECK(c.gamma[0](0, 0) == doctest::Approx(-0.0011764705882352941).epsilon(1e-12));
  CHECK(c.gamma[2](0, 2) == doctest::Approx(-0.0011764705882352941).epsilon(1e-12));
  CHECK(std::abs(c.ric(0, 0) - -0.000023375624759707805) <= 1e-9);
  CHECK(std::abs(c.ric(0, 1) - -0.00055916955017301038) <= 1e-9);
  CHECK(std::abs(c.ric(2, 2) - 0.00039600153787004998) <= 1e-9);
  CHECK(c.scal == doctest::Approx(0.000022615736029129068).epsilon(1e-9));
  const double v_radial = c.v_field.dot(x) / x.norm();
  CHECK(v_radial == doctest::Approx(0.0076893502499038831).epsilon(1e-9));
  // V is radial.
  CHECK((c.v_field - v_radial * x / x.norm()).norm() <= 1e-15);
}

TEST_CASE("christoffel closed form for radial e") {
  const auto a = log_oscillating_profile(0.3, 0.5, 0.3, 2.0);
  const auto g = make_radial_perturbation(3, a);
  const Point x = point({2, -3, 1.5});
  const double r = x.norm();
  const Point u = x / r;
  const auto gamma = difference_tensor(*g, x);
  const double s = a.d1(r) / (2 * (1 + a.value(r)));
  double worst = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double expected = s * (u[i] * (j == k) + u[j] * (i == k) - u[k] * (i == j));
        worst = std::max(worst, std::abs(gamma[k](i, j) - expected));
      }
  CHECK(worst <= 1e-14);
}

TEST_CASE("harmonic conformal factors are scalar flat") {
  // u = 1 + A r^{2-n} is harmonic for the flat Laplacian.
  for (int n : {3, 4, 5}) {
    const auto g = make_schwarzschild_isotropic(n, 1.0);
    for (const Point& x : sample_points(n, 2.0, 64.0, 200, 7)) REQUIRE(std::abs(curvature_point(*g, x).scal) <= 1e-9);
  }
  const auto g5 = make_conformally_flat(5, power_profile(0.2, 3.0));
  for (const Point& x : sample_points(5, 2.0, 64.0, 200, 8)) REQUIRE(std::abs(curvature_point(*g5, x).scal) <= 1e-9);
}

TEST_CASE("non-harmonic conformal factor") {
  // u = 1 + 0.1 exp(-r/50) / r, Scal = -8 Lap(u) / u^5 at (5, 0, 0).
  RadialProfile w;
  w.value = [](double r) { return 0.1 * std::exp(-r / 50) / r; };
  w.d1 = [](double r) { return -0.1 * std::exp(-r / 50) * (1 / (50 * r) + 1 / (r * r)); };
  w.d2 = [](double r) {
    return 0.1 * std::exp(-r / 50) * (1 / (2500 * r) + 2 / (50 * r * r) + 2 / (r * r * r));
  };
  w.inner_d1 = w.d1;
  w.kinks = [](double, double) { return std::vector<double>{}; };
  w.decay_rate = 1.0;
  w.name = "decaying";
  const auto g = make_conformally_flat(3, w);
  CHECK(curvature_point(*g, point({5, 0, 0})).scal == doctest::Approx(-0.000052942601010638685).epsilon(1e-9));
}

TEST_CASE("scalar decomposition holds at sampled points") {
  const auto g = make_schwarzschild_isotropic(3, 1.0);
  CHECK(curvature_point(*g, point({3, 0, 0})).decomposition_residual <= 1e-8);
  const auto g4 = make_conformally_flat(4, power_profile(0.3, 2.0));
  for (const Point& x : sample_points(4, 2.0, 64.0, 100, 3)) REQUIRE(curvature_point(*g4, x).decomposition_residual <= 1e-8);
}

TEST_CASE("flipping the sign of Q^S breaks the decomposition") {
  const auto g = make_schwarzschild_isotropic(3, 1.0);
  CurvatureOptions bad;
  bad.q_scalar_sign = -1.0;
  CHECK(curvature_point(*g, point({3, 0, 0}), Side::outer, bad).decomposition_residual > 1e-4);
}

TEST_CASE("df identity and product rule") {
  const auto g = make_schwarzschild_isotropic(4, 1.0);
  const Point x = point({1.5, 2.0, -0.5, 1.0});
  const auto t = error_tensors(*g, x);
  CHECK(t.product_rule_residual <= 1e-14);
  CHECK((t.f - (t.g_inv - Matrix::Identity(4, 4))).norm() == 0.0);
  // |f| <= C |e| with C the largest eigenvalue of g^{-1}.
  const double c = g->comparability();
  CHECK(t.f.norm() <= c * t.e.norm());
}

TEST_CASE("einstein contraction decays like r^-2") {
  const auto g = make_schwarzschild_isotropic(3, 1.0);
  std::vector<double> radii, values;
  for (double r : {4.0, 8.0, 16.0, 32.0, 64.0}) {
    // G(r d_r, x / r) with the radial entry of G in the (1, 0, 0) direction.
    radii.push_back(r);
    values.push_back(r * einstein(*g, point({r, 0, 0}))(0, 0));
  }
  const double slope = (std::log(std::abs(values.back())) - std::log(std::abs(values[3]))) / std::log(2.0);
  CHECK(slope == doctest::Approx(-2.0).epsilon(0.025));
}

TEST_CASE("bianchi identity") {
  const auto schw = make_schwarzschild_isotropic(3, 1.0);
  const auto conf = make_conformally_flat(4, power_profile(0.3, 2.0));
  CHECK(bianchi_residual(*schw, sample_points(3, 4.0, 16.0, 200, 11)).max_residual <= 1e-6);
  CHECK(bianchi_residual(*conf, sample_points(4, 2.0, 16.0, 200, 12)).max_residual <= 1e-6);
}

TEST_CASE("kink spheres are evaluated one-sided") {
  const auto g = make_radial_perturbation(3, kinked_profile(1.0, 0.5, 1.0), 2.0);
  const auto outer = curvature_point(*g, point({4, 0, 0}), Side::outer);
  const auto inner = curvature_point(*g, point({4, 0, 0}), Side::inner);
  CHECK(outer.one_sided);
  CHECK(inner.one_sided);
  CHECK(std::abs(outer.v_field[0] - inner.v_field[0]) > 1e-3);
}

}  // TEST_SUITE
