#include "admmass/mass.hpp"

#include "admmass/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace admmass {

const char* to_string(MassMethod method) {
  switch (method) {
    case MassMethod::adm_surface: return "adm_surface";
    case MassMethod::weak: return "weak";
    case MassMethod::ricci_surface: return "ricci_surface";
    case MassMethod::ricci_weak: return "ricci_weak";
    case MassMethod::plateau_identity: return "plateau_identity";
  }
  return "unknown";
}

MassMethod parse_method(const std::string& name) {
  if (name == "adm_surface" || name == "adm") return MassMethod::adm_surface;
  if (name == "weak") return MassMethod::weak;
  if (name == "ricci_surface" || name == "ricci") return MassMethod::ricci_surface;
  if (name == "ricci_weak") return MassMethod::ricci_weak;
  if (name == "plateau_identity" || name == "identity") return MassMethod::plateau_identity;
  fail(ErrorKind::invalid_argument, "unknown mass method '" + name + "'");
}

double mass_normalization(MassMethod method, int n) {
  const double omega = sphere_area(n);
  switch (method) {
    case MassMethod::ricci_surface:
    case MassMethod::ricci_weak:
      return -1.0 / ((n - 1.0) * (n - 2.0) * omega);
    default:
      return 1.0 / (2.0 * (n - 1.0) * omega);
  }
}

namespace {

// U_i = D_k e_ik - D_i tr e, the flat-contracted flux vector.
Point flat_flux(const MetricJet& jet) {
  const int n = jet.n;
  Point u = Point::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) u[i] += jet.dg[k](i, k) - jet.dg[i](k, k);
  return u;
}

bool near_kink(const MetricField& metric, double r) {
  return !metric.kinks_in(r * (1.0 - 1e-10), r * (1.0 + 1e-10)).empty();
}

MassReport make_report(MassMethod method, const MetricField& metric, std::string cutoff) {
  MassReport report;
  report.method = method;
  report.dim = metric.dim();
  report.metric_id = metric.id();
  report.cutoff = std::move(cutoff);
  report.normalization = mass_normalization(method, metric.dim());
  return report;
}

void check_schedule(const MetricField& metric, const std::vector<double>& scales) {
  if (scales.empty()) fail(ErrorKind::invalid_argument, "empty scale schedule");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] >= metric.inner_radius())) fail(ErrorKind::domain, "scale lies inside the metric's inner radius");
    if (i && !(scales[i] > scales[i - 1])) fail(ErrorKind::invalid_argument, "scales must be strictly increasing");
  }
}

void finish(MassReport& report) {
  if (report.scales.size() >= 4) {
    report.limit = extrapolate_limit(report.scales, report.values, report.quad_errors);
    for (const auto& f : report.limit.flags) report.flags.push_back(f);
  } else {
    report.limit.scales = report.scales;
    report.limit.values = report.values;
    report.limit.limit = report.values.back();
    report.limit.model = "last_value";
    report.limit.converged = false;
    report.flags.push_back("too_few_scales: limit is the last value");
  }
}

using SphereIntegrand = std::function<double(const Point&)>;

MassReport surface_mass(MassMethod method, const MetricField& metric, const std::vector<double>& radii,
                        const QuadratureScheme& scheme,
                        const std::function<SphereIntegrand(double radius)>& make_integrand) {
  check_schedule(metric, radii);
  MassReport report = make_report(method, metric, "");
  const std::size_t m = radii.size();
  std::vector<double> scales(m);
  std::vector<Estimate> est(m);
  std::vector<char> snapped(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    scales[i] = radii[i];
    if (near_kink(metric, radii[i])) {
      scales[i] = radii[i] * (1.0 + 1e-12);
      snapped[i] = 1;
    }
  }
  parallel_for(m, [&](std::size_t i) {
    est[i] = integrate_sphere(make_integrand(scales[i]), metric.dim(), scales[i], scheme);
  });
  for (std::size_t i = 0; i < m; ++i) {
    report.scales.push_back(radii[i]);
    report.values.push_back(report.normalization * est[i].value);
    report.quad_errors.push_back(std::abs(report.normalization) * est[i].error);
    if (snapped[i]) report.flags.push_back("radius_snapped_off_kink: " + std::to_string(radii[i]));
  }
  finish(report);
  return report;
}

MassReport bulk_mass(MassMethod method, const MetricField& metric, const CutoffFamily& family,
                     const std::vector<double>& alphas, const QuadratureScheme& scheme,
                     const std::function<double(const Point&, const Point&)>& integrand) {
  check_schedule(metric, alphas);
  MassReport report = make_report(method, metric, family.name());
  for (double alpha : alphas) {
    const auto [a, b] = family.support(alpha);
    if (b > metric.outer_radius()) fail(ErrorKind::domain, "cutoff support leaves the metric domain");
    const auto kinks = metric.kinks_in(a, b);
    const Estimate e = integrate_annulus(
        [&](const Point& x) {
          const Point minus_grad = -family.gradient(alpha, x);
          return integrand(x, minus_grad);
        },
        metric.dim(), a, b, scheme, kinks);
    report.scales.push_back(alpha);
    report.values.push_back(report.normalization * e.value);
    report.quad_errors.push_back(std::abs(report.normalization) * e.error);
  }
  finish(report);
  return report;
}

bool smooth_enough_for_ricci(const MetricField& metric) {
  return metric.regularity() == Regularity::analytic || metric.regularity() == Regularity::c2 ||
         metric.regularity() == Regularity::grid;
}

// int_{S_r} (V_outer - V_inner) . x/r dA
double kink_flux(const MetricField& metric, double r, const QuadratureScheme& scheme) {
  const Estimate e = integrate_sphere(
      [&](const Point& x) {
        const Point xo = x * (1.0 + 1e-12), xi = x * (1.0 - 1e-12);
        const MetricJet jo = metric.jet(xo, 1), ji = metric.jet(xi, 1);
        const Matrix go = jo.g.inverse(), gi = ji.g.inverse();
        return (v_field(jo, go) - v_field(ji, gi)).dot(x) / x.norm();
      },
      metric.dim(), r, scheme);
  return e.value;
}

}  // namespace

MassReport adm_mass(const MetricField& metric, const std::vector<double>& radii, const QuadratureScheme& scheme) {
  return surface_mass(MassMethod::adm_surface, metric, radii, scheme, [&](double) {
    return [&](const Point& x) { return flat_flux(metric.jet(x, 1)).dot(x) / x.norm(); };
  });
}

MassReport weak_mass(const MetricField& metric, const CutoffFamily& family, const std::vector<double>& alphas,
                     const QuadratureScheme& scheme) {
  return bulk_mass(MassMethod::weak, metric, family, alphas, scheme, [&](const Point& x, const Point& mdchi) {
    return flat_flux(metric.jet(x, 1)).dot(mdchi);
  });
}

MassReport ricci_mass_surface(const MetricField& metric, const std::vector<double>& radii,
                              const QuadratureScheme& scheme) {
  MassReport report = surface_mass(MassMethod::ricci_surface, metric, radii, scheme, [&](double) {
    return [&](const Point& x) {
      const Matrix G = curvature_point(metric, x).einstein;
      return x.dot(G * x) / x.norm();
    };
  });
  if (!smooth_enough_for_ricci(metric)) report.flags.push_back("low_regularity: second derivatives are one-sided");
  return report;
}

MassReport ricci_weak_mass(const MetricField& metric, const CutoffFamily& family, const std::vector<double>& alphas,
                           const QuadratureScheme& scheme) {
  MassReport report =
      bulk_mass(MassMethod::ricci_weak, metric, family, alphas, scheme, [&](const Point& x, const Point& mdchi) {
        const Matrix G = curvature_point(metric, x).einstein;
        return x.dot(G * mdchi);
      });
  if (!smooth_enough_for_ricci(metric)) report.flags.push_back("low_regularity: second derivatives are one-sided");
  return report;
}

MassReport compute_mass(MassMethod method, const MetricField& metric, const CutoffFamily& family,
                        const std::vector<double>& scales, const QuadratureScheme& scheme) {
  switch (method) {
    case MassMethod::adm_surface: return adm_mass(metric, scales, scheme);
    case MassMethod::weak: return weak_mass(metric, family, scales, scheme);
    case MassMethod::ricci_surface: return ricci_mass_surface(metric, scales, scheme);
    case MassMethod::ricci_weak: return ricci_weak_mass(metric, family, scales, scheme);
    case MassMethod::plateau_identity: {
      if (scales.empty()) fail(ErrorKind::invalid_argument, "empty scale schedule");
      const double a = std::max(metric.inner_radius(), 0.25 * scales.front());
      if (!(2.0 * a < scales.front())) fail(ErrorKind::domain, "first truncation too close to the inner radius");
      return plateau_identity(metric, plateau_smooth(a, 2.0 * a), scales, scheme);
    }
  }
  fail(ErrorKind::invalid_argument, "unknown mass method");
}

PairingResult distributional_scalar(const MetricField& metric, const RadialTestFunction& phi,
                                    const QuadratureScheme& scheme) {
  if (!(phi.a >= metric.inner_radius())) fail(ErrorKind::domain, "test function support leaves the metric domain");
  if (!(std::abs(phi.value(phi.b * (1.0 + 1e-9))) < 1e-12))
    fail(ErrorKind::invalid_argument, "test function must vanish beyond its support");
  const int n = metric.dim();
  const auto kinks = metric.kinks_in(phi.a, phi.b);
  PairingResult out;
  out.kinks_in_support = !kinks.empty();
  const Estimate pairing = integrate_annulus(
      [&](const Point& x) {
        const double r = x.norm();
        const CurvaturePointData c = curvature_point(metric, x);
        const Point minus_dphi = -phi.d1(r) / r * x;
        return c.v_field.dot(minus_dphi) + phi.value(r) * c.q_scalar;
      },
      n, phi.a, phi.b, scheme, kinks);
  const Estimate smooth = integrate_annulus(
      [&](const Point& x) { return phi.value(x.norm()) * curvature_point(metric, x).scal; }, n, phi.a, phi.b,
      scheme, kinks);
  double kink_terms = 0.0;
  for (double rk : kinks) kink_terms += phi.value(rk) * kink_flux(metric, rk, scheme);
  out.pairing = pairing.value;
  out.smooth_integral = smooth.value + kink_terms;
  out.quad_error = pairing.error + smooth.error;
  return out;
}

MassReport plateau_identity(const MetricField& metric, const RadialTestFunction& phi,
                          const std::vector<double>& truncations, const QuadratureScheme& scheme) {
  check_schedule(metric, truncations);
  if (!(phi.a >= metric.inner_radius())) fail(ErrorKind::domain, "test function support leaves the metric domain");
  if (!(truncations.front() > phi.b)) fail(ErrorKind::invalid_argument, "truncation radii must exceed the plateau start");
  const int n = metric.dim();
  MassReport report = make_report(MassMethod::plateau_identity, metric, phi.name);
  const double norm = report.normalization;

  auto bulk = [&](double lo, double hi) {
    return integrate_annulus(
        [&](const Point& x) {
          const CurvaturePointData c = curvature_point(metric, x);
          return phi.value(x.norm()) * (c.scal - c.q_scalar);
        },
        n, lo, hi, scheme, metric.kinks_in(lo, hi));
  };
  const Estimate transition = integrate_annulus(
      [&](const Point& x) {
        const double r = x.norm();
        const Point v = v_field(metric.jet(x, 1), metric.eval(x).inverse());
        return -v.dot(-phi.d1(r) / r * x);
      },
      n, phi.a, phi.b, scheme, metric.kinks_in(phi.a, phi.b));

  Estimate running = bulk(phi.a, phi.b);
  running.value += transition.value;
  running.error += transition.error;
  // Kinks in [a, b); the one on b, if any, is picked up by the first truncation.
  for (double rk : metric.kinks_in(phi.a, phi.b)) {
    if (rk >= phi.b * (1.0 - 1e-12) || phi.value(rk) == 0.0) continue;
    running.value += phi.value(rk) * kink_flux(metric, rk, scheme);
  }
  double lo = phi.b;
  for (double R : truncations) {
    const Estimate piece = bulk(lo, R);
    running.value += piece.value;
    running.error += piece.error;
    for (double rk : metric.kinks_in(lo, R)) {
      if (rk >= R * (1.0 - 1e-12)) continue;
      running.value += phi.value(rk) * kink_flux(metric, rk, scheme);
    }
    lo = R;
    report.scales.push_back(R);
    report.values.push_back(norm * running.value);
    report.quad_errors.push_back(std::abs(norm) * running.error);
  }
  if (!metric.kinks_in(phi.a, truncations.back()).empty())
    report.flags.push_back("kink_flux_terms_included");
  finish(report);
  return report;
}

KillingResidual conformal_killing_residual(const MetricField& metric, const RadialTestFunction& phi,
                                           const QuadratureScheme& scheme, int panels) {
  if (!(phi.a >= metric.inner_radius())) fail(ErrorKind::domain, "test function support leaves the metric domain");
  const int n = metric.dim();
  KillingResidual out;
  std::vector<double> breaks = metric.kinks_in(phi.a, phi.b);
  out.kinks_in_support = !breaks.empty();
  for (int p = 1; p < panels; ++p) breaks.push_back(phi.a + (phi.b - phi.a) * p / panels);

  const Estimate lhs = integrate_annulus(
      [&](const Point& x) {
        const double r = x.norm();
        const CurvaturePointData c = curvature_point(metric, x);
        const Point grad = c.g_inv * (phi.d1(r) / r * x);
        return (c.einstein * x).dot(grad) * std::sqrt(c.g.determinant());
      },
      n, phi.a, phi.b, scheme, breaks);
  const Estimate rhs = integrate_annulus(
      [&](const Point& x) {
        const double r = x.norm();
        const CurvaturePointData c = curvature_point(metric, x);
        const MetricJet jet = metric.jet(x, 1);
        const Matrix M = c.g_inv * c.einstein * c.g_inv;
        Matrix sym = c.g;
        for (int u = 0; u < n; ++u) sym += 0.5 * x[u] * jet.dg[u];
        return -phi.value(r) * M.cwiseProduct(sym).sum() * std::sqrt(c.g.determinant());
      },
      n, phi.a, phi.b, scheme, breaks);
  const Estimate printed = integrate_annulus(
      [&](const Point& x) {
        const double r = x.norm();
        const CurvaturePointData c = curvature_point(metric, x);
        const Matrix M = c.g_inv * c.einstein * c.g_inv;
        const Point y = c.g * x;
        double s = M.trace();
        for (int u = 0; u < n; ++u) s += y[u] * M.cwiseProduct(c.gamma[u]).sum();
        return -phi.value(r) * s * std::sqrt(c.g.determinant());
      },
      n, phi.a, phi.b, scheme, breaks);
  out.rhs_printed_form = printed.value;
  out.lhs = lhs.value;
  out.rhs = rhs.value;
  out.residual = std::abs(lhs.value - rhs.value);
  out.quad_error = lhs.error + rhs.error;
  return out;
}

double log_log_slope(const std::vector<double>& s, const std::vector<double>& v) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (v[i] == 0.0 || !std::isfinite(v[i])) continue;
    const double x = std::log(s[i]), y = std::log(std::abs(v[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return -kInfinity;
  const double den = m * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (m * sxy - sx * sy) / den;
}

DecayReport correction_decay(const MetricField& metric, const CutoffFamily& family,
                             const std::vector<double>& alphas, const QuadratureScheme& scheme) {
  check_schedule(metric, alphas);
  const double norm = mass_normalization(MassMethod::weak, metric.dim());
  DecayReport out;
  for (double alpha : alphas) {
    const auto [a, b] = family.support(alpha);
    const Estimate e = integrate_annulus(
        [&](const Point& x) {
          const MetricJet jet = metric.jet(x, 1);
          const Point mdchi = -family.gradient(alpha, x);
          return (v_field(jet, jet.g.inverse()) - flat_flux(jet)).dot(mdchi);
        },
        metric.dim(), a, b, scheme, metric.kinks_in(a, b));
    out.scales.push_back(alpha);
    out.values.push_back(norm * e.value);
  }
  out.slope = log_log_slope(out.scales, out.values);
  bool all_zero = true;
  for (double v : out.values) all_zero = all_zero && std::abs(v) < 1e-15;
  out.decaying = all_zero || out.slope < 0.0;
  return out;
}

}  // namespace admmass
