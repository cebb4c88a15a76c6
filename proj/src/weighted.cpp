#include "admmass/weighted.hpp"

#include "admmass/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace admmass {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::member: return "member";
    case Verdict::borderline: return "borderline";
    case Verdict::non_member: return "non-member";
  }
  return "unknown";
}

namespace {

struct RadialJet {
  double v, d1, d2;
};

double radial_magnitude(int n, double r, const RadialJet& j, int order) {
  switch (order) {
    case 0: return std::abs(j.v);
    case 1: return std::abs(j.d1);
    default: return std::sqrt(j.d2 * j.d2 + (n - 1.0) * (j.d1 / r) * (j.d1 / r));
  }
}

std::function<std::vector<double>(double, double)> no_kinks() {
  return [](double, double) { return std::vector<double>{}; };
}

double halton(std::uint64_t index, int base) {
  double result = 0.0, f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

// Deterministic points in the annulus a <= |x| <= b: radius from base 2,
// directions from Box-Muller on the next bases. The first direction set is
// also placed on both boundary spheres.
std::vector<Point> annulus_samples(int n, double a, double b, int count) {
  constexpr int bases[8] = {3, 5, 7, 11, 13, 17, 19, 23};
  std::vector<Point> out;
  out.reserve(count);
  for (int i = 1; i <= count; ++i) {
    Point dir(n);
    for (int d = 0; d < n; d += 2) {
      const double u1 = halton(i, bases[d]), u2 = halton(i, bases[d + 1]);
      const double rad = std::sqrt(-2.0 * std::log(1.0 - u1));
      dir[d] = rad * std::cos(2.0 * std::numbers::pi * u2);
      if (d + 1 < n) dir[d + 1] = rad * std::sin(2.0 * std::numbers::pi * u2);
    }
    const double norm = dir.norm();
    if (!(norm > 0.0)) continue;
    dir /= norm;
    double r;
    if (i <= 16) r = a;
    else if (i <= 32) r = b;
    else r = a * std::pow(b / a, halton(i, 2));
    out.push_back(r * dir);
  }
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = m * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (m * sxy - sx * sy) / den;
}

}  // namespace

TensorField radial_scalar_field(int n, const RadialProfile& a) {
  TensorField t;
  t.dim = n;
  t.max_order = 2;
  t.magnitude = [n, a](const Point& x, int l) {
    const double r = x.norm();
    return radial_magnitude(n, r, {a.value(r), a.d1(r), a.d2(r)}, l);
  };
  t.kinks = a.kinks ? a.kinks : no_kinks();
  t.name = a.name;
  return t;
}

TensorField radial_product_field(int n, const RadialProfile& a, const RadialProfile& b) {
  TensorField t;
  t.dim = n;
  t.max_order = 2;
  t.magnitude = [n, a, b](const Point& x, int l) {
    const double r = x.norm();
    const double av = a.value(r), a1 = a.d1(r), a2 = a.d2(r);
    const double bv = b.value(r), b1 = b.d1(r), b2 = b.d2(r);
    return radial_magnitude(n, r, {av * bv, a1 * bv + av * b1, a2 * bv + 2.0 * a1 * b1 + av * b2}, l);
  };
  auto ka = a.kinks ? a.kinks : no_kinks();
  auto kb = b.kinks ? b.kinks : no_kinks();
  t.kinks = [ka, kb](double lo, double hi) {
    auto out = ka(lo, hi);
    auto more = kb(lo, hi);
    out.insert(out.end(), more.begin(), more.end());
    std::sort(out.begin(), out.end());
    return out;
  };
  t.name = a.name + "*" + b.name;
  return t;
}

TensorField scaled_field(const TensorField& field, double lambda) {
  TensorField t = field;
  auto inner = field.magnitude;
  t.magnitude = [inner, lambda](const Point& x, int l) { return std::abs(lambda) * inner(x, l); };
  return t;
}

TensorField metric_error_field(MetricPtr metric) {
  TensorField t;
  t.dim = metric->dim();
  t.max_order = 2;
  t.magnitude = [metric](const Point& x, int l) {
    const MetricJet jet = metric->jet(x, l);
    const int n = jet.n;
    if (l == 0) return (jet.g - Matrix::Identity(n, n)).norm();
    double s = 0.0;
    if (l == 1)
      for (int k = 0; k < n; ++k) s += jet.dg[k].squaredNorm();
    else
      for (int k = 0; k < n * n; ++k) s += jet.ddg[k].squaredNorm();
    return std::sqrt(s);
  };
  t.kinks = [metric](double a, double b) { return metric->kinks_in(a, b); };
  t.name = "e[" + metric->id() + "]";
  return t;
}

WeightedNormResult weighted_norm(const TensorField& field, const WeightedNormSpec& spec,
                                 const QuadratureScheme& scheme) {
  if (!(spec.r_out > spec.r_in) || !(spec.r_in > 0.0)) fail(ErrorKind::invalid_argument, "weighted norm needs 0 < R_in < R_out");
  if (spec.k < 0 || spec.k > field.max_order) fail(ErrorKind::invalid_argument, "derivative order not available for this field");
  if (!(spec.p >= 1.0)) fail(ErrorKind::invalid_argument, "integrability exponent must be at least 1");
  const int n = field.dim;
  const bool sup = std::isinf(spec.p);

  std::vector<std::pair<double, double>> dyads;
  for (double a = spec.r_in; a < spec.r_out * (1.0 - 1e-12); a *= 2.0) dyads.push_back({a, std::min(2.0 * a, spec.r_out)});
  const std::size_t nd = dyads.size();
  const int levels = spec.k + 1;

  // per_level[l][j]: integral (or sup) over dyad j.
  std::vector<std::vector<double>> per_level(levels, std::vector<double>(nd, 0.0));
  for (std::size_t j = 0; j < nd; ++j) {
    const auto [a, b] = dyads[j];
    const auto kinks = field.kinks ? field.kinks(a, b) : std::vector<double>{};
    for (int l = 0; l < levels; ++l) {
      const double wexp = sup ? spec.tau + l : spec.p * (spec.tau + l) - n;
      if (sup) {
        const auto pts = annulus_samples(n, a, b, spec.sup_samples);
        std::vector<double> vals(pts.size());
        parallel_for(pts.size(), [&](std::size_t i) {
          vals[i] = std::pow(pts[i].norm(), wexp) * field.magnitude(pts[i], l);
        });
        double m = 0.0;
        for (double v : vals) {
          if (!std::isfinite(v)) fail(ErrorKind::numerical, "non-finite field value");
          m = std::max(m, v);
        }
        per_level[l][j] = m;
      } else {
        const Estimate e = integrate_annulus(
            [&](const Point& x) { return std::pow(x.norm(), wexp) * std::pow(field.magnitude(x, l), spec.p); }, n,
            a, b, scheme, kinks);
        per_level[l][j] = e.value;
      }
    }
  }

  WeightedNormResult out;
  for (std::size_t j = 0; j < nd; ++j) {
    out.dyad_radii.push_back(dyads[j].first);
    double c = 0.0;
    for (int l = 0; l < levels; ++l) c = sup ? std::max(c, per_level[l][j]) : c + per_level[l][j];
    out.contributions.push_back(c);
  }

  // Full dyads only enter the trend.
  std::size_t full = nd;
  if (nd && dyads.back().second < 2.0 * dyads.back().first * (1.0 - 1e-12)) --full;
  const std::size_t first = full > 4 ? full - 4 : 0;

  auto level_slope = [&](const std::vector<double>& c) {
    std::vector<double> xs, ys;
    for (std::size_t j = first; j < full; ++j)
      if (c[j] > 0.0) {
        xs.push_back(static_cast<double>(j));
        ys.push_back(std::log2(c[j]));
      }
    if (xs.size() < 2) return -kInfinity;
    return fit_slope(xs, ys);
  };

  double worst_slope = -kInfinity;
  for (int l = 0; l < levels; ++l) {
    const double slope = level_slope(per_level[l]);
    worst_slope = std::max(worst_slope, sup ? slope : slope / spec.p);
    if (sup) {
      const double m = *std::max_element(per_level[l].begin(), per_level[l].end());
      out.value += m;
      if (slope > 1e-6) out.tail_estimate = kInfinity;
    } else {
      double total = 0.0;
      std::vector<double> c = per_level[l];
      total = pairwise_sum(c);
      out.value += std::pow(total, 1.0 / spec.p);
      if (std::isinf(slope) || full == 0) continue;
      const double rho = std::exp2(slope);
      if (rho >= 1.0) {
        out.tail_estimate = kInfinity;
        continue;
      }
      const double T = std::log2(spec.r_out / spec.r_in);
      const double c_last = per_level[l][full - 1];
      const double tail = c_last * std::pow(rho, T - static_cast<double>(full - 1)) / (1.0 - rho);
      out.tail_estimate += std::pow(total + tail, 1.0 / spec.p) - std::pow(total, 1.0 / spec.p);
    }
  }
  out.dyad_slope = worst_slope;
  out.extrapolated = out.value + out.tail_estimate;
  if (std::isinf(worst_slope) && worst_slope < 0) {
    out.verdict = Verdict::member;
  } else if (sup) {
    out.verdict = worst_slope < -0.05 ? Verdict::member : worst_slope > 0.05 ? Verdict::non_member : Verdict::borderline;
  } else {
    out.verdict = worst_slope < -0.05 ? Verdict::member : worst_slope >= -1e-6 ? Verdict::non_member : Verdict::borderline;
  }
  return out;
}

FalloffReport classify_falloff(const TensorField& field, const std::vector<double>& radii,
                               std::vector<FalloffQuery> queries, const QuadratureScheme& scheme) {
  if (radii.size() < 4) fail(ErrorKind::invalid_argument, "fall-off classification needs at least 4 radii");
  FalloffReport out;
  out.radii = radii;
  const SphereRule rule = sphere_rule(field.dim, scheme, true);
  out.magnitudes.resize(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) {
    double m = 0.0;
    for (const Point& u : rule.nodes) m = std::max(m, field.magnitude(radii[i] * u, 0));
    out.magnitudes[i] = m;
  });
  const double top = *std::max_element(out.magnitudes.begin(), out.magnitudes.end());
  if (top <= 1e-13) {
    out.fitted_sigma = kInfinity;
    out.fitted_C = top;
  } else {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < radii.size(); ++i)
      if (out.magnitudes[i] > 0.0) {
        xs.push_back(std::log(radii[i]));
        ys.push_back(std::log(out.magnitudes[i]));
      }
    const double slope = fit_slope(xs, ys);
    double my = 0, mx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    const double intercept = my - slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) rss += std::pow(ys[i] - intercept - slope * xs[i], 2);
    out.fitted_sigma = -slope;
    out.fitted_C = std::exp(intercept);
    out.residual = std::sqrt(rss / static_cast<double>(xs.size()));
  }
  for (auto& q : queries) {
    if (q.tau < out.fitted_sigma - 0.05) {
      q.verdict = Verdict::member;
    } else if (q.tau > out.fitted_sigma + 0.05) {
      q.verdict = Verdict::non_member;
    } else {
      // Inside the margin only the side of sigma is known.
      q.verdict = q.tau >= out.fitted_sigma ? Verdict::non_member : Verdict::borderline;
    }
  }
  out.queries = std::move(queries);
  return out;
}

AeClassReport check_ae_class(MetricPtr metric, int k, double p, double tau, double r_out,
                             const QuadratureScheme& scheme) {
  AeClassReport out;
  const int n = metric->dim();
  const SphereRule rule = sphere_rule(n, scheme, true);
  double lmin = kInfinity, lmax = 0.0;
  for (double r = metric->inner_radius(); r <= r_out * (1.0 + 1e-12); r *= std::sqrt(2.0)) {
    for (const Point& u : rule.nodes) {
      const auto [lo, hi] = eigenvalue_range(*metric, r * u);
      lmin = std::min(lmin, lo);
      lmax = std::max(lmax, hi);
    }
  }
  out.lambda_min = lmin;
  out.lambda_max = lmax;
  out.comparability = std::max(lmax, 1.0 / lmin);
  out.bounded = std::isfinite(lmax) && lmin > 0.0;
  out.comparable = out.comparability <= metric->comparability() * (1.0 + 1e-9);
  WeightedNormSpec spec;
  spec.k = k;
  spec.p = p;
  spec.tau = tau;
  spec.r_in = metric->inner_radius();
  spec.r_out = r_out;
  out.error_norm = weighted_norm(metric_error_field(metric), spec, scheme);
  if (!out.bounded || out.error_norm.verdict == Verdict::non_member) out.verdict = Verdict::non_member;
  else if (!out.comparable || out.error_norm.verdict == Verdict::borderline) out.verdict = Verdict::borderline;
  else out.verdict = Verdict::member;
  return out;
}

HolderCheck holder_product_check(int n, const RadialProfile& u1, const RadialProfile& u2, int k, double p1,
                                 double p2, double q, double tau1, double tau2, double r_in, double r_out,
                                 const QuadratureScheme& scheme) {
  if (k < 0 || k > 2) fail(ErrorKind::invalid_argument, "Hoelder check supports k <= 2");
  if (!(p1 >= 1.0 && p2 >= 1.0 && q >= 1.0)) fail(ErrorKind::invalid_argument, "exponents must be at least 1");
  const auto inv = [](double p) { return std::isinf(p) ? 0.0 : 1.0 / p; };
  if (std::abs(inv(p1) + inv(p2) - inv(q)) > 1e-12) fail(ErrorKind::invalid_argument, "inadmissible exponents: need 1/p1 + 1/p2 = 1/q");
  WeightedNormSpec spec;
  spec.k = k;
  spec.r_in = r_in;
  spec.r_out = r_out;
  HolderCheck out;
  spec.p = q;
  spec.tau = tau1 + tau2;
  out.lhs = weighted_norm(radial_product_field(n, u1, u2), spec, scheme).value;
  spec.p = p1;
  spec.tau = tau1;
  const double a = weighted_norm(radial_scalar_field(n, u1), spec, scheme).value;
  spec.p = p2;
  spec.tau = tau2;
  const double b = weighted_norm(radial_scalar_field(n, u2), spec, scheme).value;
  out.rhs = a * b;
  out.ratio = out.lhs == 0.0 ? 0.0 : out.lhs / out.rhs;
  out.constant = k <= 1 ? 1.0 : 2.0;
  return out;
}

}  // namespace admmass
