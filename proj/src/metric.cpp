#include "admmass/metric.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace admmass {

const char* to_string(Regularity r) {
  switch (r) {
    case Regularity::analytic: return "analytic";
    case Regularity::c2: return "C2";
    case Regularity::c1: return "C1";
    case Regularity::w12_only: return "W12_only";
    case Regularity::grid: return "grid";
  }
  return "unknown";
}

namespace {

std::vector<double> no_kinks(double, double) { return {}; }

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

RadialProfile zero_profile() {
  RadialProfile p;
  p.value = [](double) { return 0.0; };
  p.d1 = [](double) { return 0.0; };
  p.d2 = [](double) { return 0.0; };
  p.inner_d1 = p.d1;
  p.kinks = no_kinks;
  p.name = "zero";
  return p;
}

RadialProfile power_profile(double coefficient, double power) {
  if (!(power > 0.0)) fail(ErrorKind::invalid_argument, "power profile needs a positive decay power");
  RadialProfile p;
  p.value = [=](double r) { return coefficient * std::pow(r, -power); };
  p.d1 = [=](double r) { return -power * coefficient * std::pow(r, -power - 1.0); };
  p.d2 = [=](double r) { return power * (power + 1.0) * coefficient * std::pow(r, -power - 2.0); };
  p.inner_d1 = p.d1;
  p.kinks = no_kinks;
  p.decay_rate = power;
  p.name = "power(c=" + format_number(coefficient) + ",p=" + format_number(power) + ")";
  return p;
}

RadialProfile log_oscillating_profile(double coefficient, double power, double amplitude,
                                      double frequency) {
  if (!(power > 0.0)) fail(ErrorKind::invalid_argument, "oscillating profile needs a positive decay power");
  if (std::abs(amplitude) >= 1.0) fail(ErrorKind::invalid_argument, "oscillation amplitude must be below 1");
  RadialProfile p;
  const double c = coefficient, s = power, A = amplitude, f = frequency;
  p.value = [=](double r) { return c * std::pow(r, -s) * (1.0 + A * std::cos(f * std::log(r))); };
  p.d1 = [=](double r) {
    const double t = f * std::log(r);
    return c * std::pow(r, -s - 1.0) * (-s * (1.0 + A * std::cos(t)) - A * f * std::sin(t));
  };
  p.d2 = [=](double r) {
    const double t = f * std::log(r);
    const double co = std::cos(t), si = std::sin(t);
    return c * std::pow(r, -s - 2.0) *
           ((s + 1.0) * (s * (1.0 + A * co) + A * f * si) + s * A * f * si - A * f * f * co);
  };
  p.inner_d1 = p.d1;
  p.kinks = no_kinks;
  p.kind = ProfileKind::oscillatory;
  p.decay_rate = power;
  p.name = "log_oscillating(c=" + format_number(c) + ",p=" + format_number(s) + ")";
  return p;
}

RadialProfile kinked_profile(double mean, double jump, double width, double window_begin,
                             double window_end) {
  if (!(width > 0.0)) fail(ErrorKind::invalid_argument, "kink width must be positive");
  auto on_period = [&](double r) {
    const double k = r / (2.0 * width);
    return std::abs(k - std::round(k)) < 1e-12;
  };
  if (!on_period(window_begin) || (std::isfinite(window_end) && !on_period(window_end)))
    fail(ErrorKind::invalid_argument, "kink window ends must be multiples of twice the width");
  if (!(window_end > window_begin)) fail(ErrorKind::invalid_argument, "empty kink window");

  // Triangle wave value and outer slope. The slope is zero outside the window.
  struct Wave {
    double value;
    double slope;
  };
  auto wave = [=](double r) -> Wave {
    if (r < window_begin || r >= window_end) return {0.0, 0.0};
    const double period = 2.0 * width;
    double u = r - period * std::floor(r / period);
    if (u < 0.0) u = 0.0;
    if (u < width) return {u, 1.0};
    return {period - u, -1.0};
  };
  auto is_kink = [=](double r) {
    const double k = r / width;
    return std::abs(k - std::round(k)) < 1e-12 && r >= window_begin && r <= window_end;
  };

  RadialProfile p;
  p.value = [=](double r) { return mean / r + jump * wave(r).value / (r * r); };
  p.d1 = [=](double r) {
    const Wave w = wave(r);
    return -mean / (r * r) + jump * (w.slope / (r * r) - 2.0 * w.value / (r * r * r));
  };
  p.d2 = [=](double r) {
    const Wave w = wave(r);
    const double r3 = r * r * r;
    return 2.0 * mean / r3 + jump * (-4.0 * w.slope / r3 + 6.0 * w.value / (r3 * r));
  };
  p.inner_d1 = [=](double r) {
    if (!is_kink(r)) {
      const Wave w = wave(r);
      return -mean / (r * r) + jump * (w.slope / (r * r) - 2.0 * w.value / (r * r * r));
    }
    // Approach from below: the slope of the wave just inside the kink.
    const Wave w = wave(r - 0.5 * width);
    return -mean / (r * r) + jump * w.slope / (r * r);
  };
  p.kinks = [=](double a, double b) {
    std::vector<double> out;
    const double lo = std::max(a, window_begin);
    const double hi = std::min(b, window_end);
    if (!(hi >= lo)) return out;
    for (double k = std::ceil(lo / width - 1e-12); k * width <= hi * (1.0 + 1e-15); k += 1.0)
      out.push_back(k * width);
    return out;
  };
  p.kind = ProfileKind::kinked;
  p.decay_rate = 1.0;
  p.name = "kinked(mean=" + format_number(mean) + ",jump=" + format_number(jump) +
           ",width=" + format_number(width) + ")";
  return p;
}

MetricJet MetricField::jet(const Point& x, int order) const {
  if (x.size() != info_.dim) fail(ErrorKind::invalid_argument, "point dimension does not match metric");
  if (order < 0 || order > 2) fail(ErrorKind::invalid_argument, "derivative order must be 0, 1 or 2");
  if (!contains(x)) {
    std::ostringstream os;
    os << "point with |x| = " << x.norm() << " outside metric domain [" << info_.inner_radius << ", "
       << info_.outer_radius << "]";
    fail(ErrorKind::domain, os.str());
  }
  return compute_jet(x, order);
}

bool MetricField::contains(const Point& x) const {
  const double r = x.norm();
  return r >= info_.inner_radius * (1.0 - 1e-12) && r <= info_.outer_radius * (1.0 + 1e-12);
}

std::vector<double> MetricField::kinks_in(double, double) const { return {}; }

namespace {

class FlatMetric final : public MetricField {
 public:
  explicit FlatMetric(MetricInfo info) : MetricField(std::move(info)) {}

 protected:
  MetricJet compute_jet(const Point&, int order) const override {
    MetricJet jet = MetricJet::zero(dim(), order);
    jet.g.setIdentity();
    return jet;
  }
};

struct RadialScalar {
  double value, d1, d2;
};

// g = psi(r) delta for a radial scalar psi.
class IsotropicMetric final : public MetricField {
 public:
  IsotropicMetric(MetricInfo info, std::function<RadialScalar(double)> psi, RadialProfile profile)
      : MetricField(std::move(info)), psi_(std::move(psi)), profile_(std::move(profile)) {}

  std::vector<double> kinks_in(double a, double b) const override { return profile_.kinks(a, b); }

 protected:
  MetricJet compute_jet(const Point& x, int order) const override {
    const int n = dim();
    const double r = x.norm();
    const RadialScalar s = psi_(r);
    MetricJet jet;
    jet.n = n;
    jet.order = order;
    jet.g = s.value * Matrix::Identity(n, n);
    if (order >= 1) {
      for (int k = 0; k < n; ++k) jet.dg[k] = (s.d1 * x[k] / r) * Matrix::Identity(n, n);
    }
    if (order >= 2) {
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double xk = x[k] / r, xl = x[l] / r;
          const double c = s.d2 * xk * xl + s.d1 * ((k == l ? 1.0 : 0.0) - xk * xl) / r;
          jet.d2(k, l) = c * Matrix::Identity(n, n);
        }
    }
    return jet;
  }

 private:
  std::function<RadialScalar(double)> psi_;
  RadialProfile profile_;
};

void check_dimension(int n) {
  if (n < 3) fail(ErrorKind::invalid_argument, "dimension must be at least 3");
  if (n > kMaxDim) fail(ErrorKind::invalid_argument, "dimension exceeds supported maximum of 7");
}

// Samples psi on a geometric radius grid (plus kink spheres) and returns the
// comparability constant sup max(psi, 1/psi). Throws if psi <= 0 or if the
// optional validity predicate fails anywhere.
double scan_comparability(const std::function<RadialScalar(double)>& psi, const RadialProfile& profile,
                          double inner_radius, const std::function<void(double)>& check) {
  std::vector<double> radii;
  for (int k = 0; k <= 640; ++k) radii.push_back(inner_radius * std::pow(2.0, k / 16.0));
  for (double r : profile.kinks(inner_radius, inner_radius * 64.0)) radii.push_back(r);
  double c = 1.0;
  for (double r : radii) {
    check(r);
    const double v = psi(r).value;
    if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::invalid_argument, "metric is not positive definite on its domain");
    c = std::max({c, v, 1.0 / v});
  }
  return c;
}

std::function<RadialScalar(double)> conformal_psi(int n, const RadialProfile& w) {
  const double p = 4.0 / (n - 2.0);
  return [w, p](double r) -> RadialScalar {
    const double u = 1.0 + w.value(r), du = w.d1(r), ddu = w.d2(r);
    const double up = std::pow(u, p);
    return {up, p * up / u * du, p * (p - 1.0) * up / (u * u) * du * du + p * up / u * ddu};
  };
}

MetricPtr make_conformal(int n, const RadialProfile& w, double inner_radius, std::string id) {
  check_dimension(n);
  if (!(inner_radius > 0.0)) fail(ErrorKind::invalid_argument, "inner radius must be positive");
  auto psi = conformal_psi(n, w);
  MetricInfo info;
  info.dim = n;
  info.inner_radius = inner_radius;
  info.regularity = w.kind == ProfileKind::kinked ? Regularity::c1 : Regularity::analytic;
  info.falloff_tau = w.decay_rate;
  info.comparability = scan_comparability(psi, w, inner_radius, [&](double r) {
    if (!(1.0 + w.value(r) > 0.0)) fail(ErrorKind::invalid_argument, "conformal factor is not positive on the domain");
  });
  info.id = std::move(id);
  return std::make_shared<IsotropicMetric>(std::move(info), psi, w);
}

}  // namespace

MetricPtr make_flat(int n) {
  check_dimension(n);
  MetricInfo info;
  info.dim = n;
  info.inner_radius = 1.0;
  info.regularity = Regularity::analytic;
  info.falloff_tau = kInfinity;
  info.comparability = 1.0;
  info.id = "flat(n=" + std::to_string(n) + ")";
  return std::make_shared<FlatMetric>(std::move(info));
}

MetricPtr make_conformally_flat(int n, const RadialProfile& w, double inner_radius) {
  return make_conformal(n, w, inner_radius, "conformal(n=" + std::to_string(n) + "," + w.name + ")");
}

MetricPtr make_schwarzschild_isotropic(int n, double m, double inner_radius) {
  check_dimension(n);
  if (!(m >= 0.0)) fail(ErrorKind::invalid_argument, "mass parameter must be nonnegative");
  const std::string id = "schwarzschild(n=" + std::to_string(n) + ",m=" + format_number(m) + ")";
  if (m == 0.0) return make_conformal(n, zero_profile(), inner_radius, id);
  const double horizon = std::pow(m / 2.0, 1.0 / (n - 2.0));
  if (!(inner_radius > horizon))
    fail(ErrorKind::invalid_argument, "inner radius must lie outside the coordinate horizon (m/2)^{1/(n-2)}");
  return make_conformal(n, power_profile(m / 2.0, n - 2.0), inner_radius, id);
}

MetricPtr make_radial_perturbation(int n, const RadialProfile& a, double inner_radius) {
  check_dimension(n);
  if (!(inner_radius > 0.0)) fail(ErrorKind::invalid_argument, "inner radius must be positive");
  auto psi = [a](double r) -> RadialScalar { return {1.0 + a.value(r), a.d1(r), a.d2(r)}; };
  MetricInfo info;
  info.dim = n;
  info.inner_radius = inner_radius;
  info.regularity = a.kind == ProfileKind::kinked ? Regularity::c1 : Regularity::analytic;
  info.falloff_tau = a.decay_rate;
  info.comparability = scan_comparability(psi, a, inner_radius, [&](double r) {
    if (!(std::abs(a.value(r)) < 1.0)) fail(ErrorKind::invalid_argument, "radial perturbation needs |a| < 1 on the domain");
  });
  info.id = "radial(n=" + std::to_string(n) + "," + a.name + ")";
  return std::make_shared<IsotropicMetric>(std::move(info), psi, a);
}

double finite_difference_defect(const MetricField& metric, const Point& x) {
  const int n = metric.dim();
  const MetricJet jet = metric.jet(x, 1);
  const double h = std::max(1e-4 * x.norm(), 1e-4);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    Point xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const Matrix fd = (metric.eval(xp) - metric.eval(xm)) / (2.0 * h);
    worst = std::max(worst, (fd - jet.dg[k]).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::pair<double, double> eigenvalue_range(const MetricField& metric, const Point& x) {
  const Matrix g = metric.eval(x);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(g, Eigen::EigenvaluesOnly);
  return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
}

}  // namespace admmass
