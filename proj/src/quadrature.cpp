#include "admmass/quadrature.hpp"

#include "admmass/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace admmass {

double sphere_area(int n) {
  if (n < 1) fail(ErrorKind::invalid_argument, "sphere dimension must be positive");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) fail(ErrorKind::invalid_argument, "quadrature order must be positive");
  static std::mutex cache_mutex;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  {
    std::lock_guard lock(cache_mutex);
    auto it = cache.find(order);
    if (it != cache.end()) {
      nodes = it->second.first;
      weights = it->second.second;
      return;
    }
  }
  std::vector<double> x(order), w(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order == 1 ? 1.0 : order * (z * p1 - p0) / (z * z - 1.0);
    x[i] = -z;
    x[order - 1 - i] = z;
    w[i] = w[order - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (order % 2 == 1) x[order / 2] = 0.0;
  std::lock_guard lock(cache_mutex);
  cache.emplace(order, std::make_pair(x, w));
  nodes = std::move(x);
  weights = std::move(w);
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0, f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

constexpr int kPrimes[8] = {2, 3, 5, 7, 11, 13, 17, 19};

void s2_rule(int order, std::vector<Point>& nodes, std::vector<double>& weights) {
  std::vector<double> t, w;
  gauss_legendre(order, t, w);
  const int nphi = 2 * order;
  for (int i = 0; i < order; ++i) {
    const double s = std::sqrt(std::max(0.0, 1.0 - t[i] * t[i]));
    for (int j = 0; j < nphi; ++j) {
      const double phi = 2.0 * std::numbers::pi * (j + 0.5) / nphi;
      Point p(3);
      p << s * std::cos(phi), s * std::sin(phi), t[i];
      nodes.push_back(p);
      weights.push_back(w[i] * 2.0 * std::numbers::pi / nphi);
    }
  }
}

void s3_rule(int order, std::vector<Point>& nodes, std::vector<double>& weights) {
  std::vector<Point> base;
  std::vector<double> base_w;
  s2_rule(order, base, base_w);
  for (int i = 1; i <= order; ++i) {
    const double theta = std::numbers::pi * i / (order + 1.0);
    const double t = std::cos(theta), s = std::sin(theta);
    const double wt = std::numbers::pi / (order + 1.0) * s * s;
    for (std::size_t j = 0; j < base.size(); ++j) {
      Point p(4);
      p << s * base[j][0], s * base[j][1], s * base[j][2], t;
      nodes.push_back(p);
      weights.push_back(wt * base_w[j]);
    }
  }
}

void qmc_rule(int n, const QuadratureScheme& scheme, SphereRule& rule) {
  const int batches = std::max(2, scheme.qmc_batches);
  const int per_batch = std::max(2, scheme.qmc_points / batches / 2 * 2);
  const int dims = 2 * ((n + 1) / 2);
  const double w = sphere_area(n) / (static_cast<double>(per_batch) * batches);
  std::uint64_t state = scheme.seed ^ (0xadd5eedull * static_cast<std::uint64_t>(n));
  rule.batches = batches;
  for (int b = 0; b < batches; ++b) {
    double shift[8];
    for (int d = 0; d < dims; ++d) shift[d] = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    for (int k = 0; k < per_batch / 2; ++k) {
      const std::uint64_t index = static_cast<std::uint64_t>(b) * (per_batch / 2) + k + 1;
      Point p(n);
      for (int d = 0; d < dims; d += 2) {
        double u1 = radical_inverse(index, kPrimes[d]) + shift[d];
        double u2 = radical_inverse(index, kPrimes[d + 1]) + shift[d + 1];
        u1 -= std::floor(u1);
        u2 -= std::floor(u2);
        const double rad = std::sqrt(-2.0 * std::log(1.0 - u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        p[d] = rad * std::cos(ang);
        if (d + 1 < n) p[d + 1] = rad * std::sin(ang);
      }
      const double norm = p.norm();
      if (!(norm > 0.0)) continue;
      p /= norm;
      rule.nodes.push_back(p);
      rule.weights.push_back(w);
      rule.batch.push_back(b);
      rule.nodes.push_back(-p);
      rule.weights.push_back(w);
      rule.batch.push_back(b);
    }
  }
}

}  // namespace

SphereRule sphere_rule(int n, const QuadratureScheme& scheme, bool coarse) {
  if (n < 2 || n > kMaxDim) fail(ErrorKind::invalid_argument, "sphere rule dimension out of range");
  SphereRule rule;
  rule.n = n;
  const int order = coarse ? std::max(2, scheme.angular_order / 2) : std::max(2, scheme.angular_order);
  if (n == 2) {
    const int m = 2 * order;
    for (int j = 0; j < m; ++j) {
      const double phi = 2.0 * std::numbers::pi * (j + 0.5) / m;
      Point p(2);
      p << std::cos(phi), std::sin(phi);
      rule.nodes.push_back(p);
      rule.weights.push_back(2.0 * std::numbers::pi / m);
    }
  } else if (n == 3) {
    s2_rule(order, rule.nodes, rule.weights);
  } else if (n == 4) {
    s3_rule(order, rule.nodes, rule.weights);
  } else {
    qmc_rule(n, scheme, rule);
  }
  return rule;
}

namespace {

// Per-batch sums of w_i f(R x_i) R^{n-1}; one entry for tensor rules.
std::vector<double> sphere_batches(const Integrand& f, const SphereRule& rule, double radius) {
  const int nb = std::max(1, rule.batches);
  std::vector<std::vector<double>> terms(nb);
  const double scale = std::pow(radius, rule.n - 1);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = f(radius * rule.nodes[i]);
    if (!std::isfinite(v)) fail(ErrorKind::numerical, "non-finite integrand sample");
    terms[rule.batch.empty() ? 0 : rule.batch[i]].push_back(rule.weights[i] * v * scale);
  }
  std::vector<double> sums(nb);
  for (int b = 0; b < nb; ++b) sums[b] = pairwise_sum(terms[b]) * nb;
  return sums;
}

Estimate combine_batches(const std::vector<double>& sums) {
  Estimate e;
  e.value = pairwise_sum(sums) / static_cast<double>(sums.size());
  if (sums.size() > 1) {
    double var = 0.0;
    for (double s : sums) var += (s - e.value) * (s - e.value);
    var /= static_cast<double>(sums.size() - 1);
    e.error = std::sqrt(var / static_cast<double>(sums.size()));
  }
  return e;
}

std::vector<double> panel_breaks(double a, double b, const std::vector<double>& kinks) {
  std::vector<double> br{a};
  for (double k : kinks)
    if (k > a * (1.0 + 1e-13) && k < b * (1.0 - 1e-13)) br.push_back(k);
  std::sort(br.begin() + 1, br.end());
  br.push_back(b);
  return br;
}

std::vector<double> annulus_batches(const Integrand& f, int n, const std::vector<double>& breaks, int order,
                                    const SphereRule& rule) {
  std::vector<double> t, w;
  gauss_legendre(order, t, w);
  struct Node {
    double r, weight;
  };
  std::vector<Node> radial;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double lo = breaks[p], hi = breaks[p + 1];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int i = 0; i < order; ++i) radial.push_back({mid + half * t[i], half * w[i]});
  }
  const int nb = std::max(1, rule.batches);
  std::vector<double> slots(radial.size() * nb);
  parallel_for(radial.size(), [&](std::size_t i) {
    const auto sums = sphere_batches(f, rule, radial[i].r);
    for (int b = 0; b < nb; ++b) slots[b * radial.size() + i] = radial[i].weight * sums[b];
  });
  (void)n;
  std::vector<double> totals(nb);
  for (int b = 0; b < nb; ++b)
    totals[b] = pairwise_sum(std::span<const double>(slots.data() + b * radial.size(), radial.size()));
  return totals;
}

}  // namespace

Estimate integrate_sphere(const Integrand& f, int n, double radius, const QuadratureScheme& scheme) {
  if (!(radius > 0.0)) fail(ErrorKind::invalid_argument, "sphere radius must be positive");
  const SphereRule fine = sphere_rule(n, scheme);
  Estimate e = combine_batches(sphere_batches(f, fine, radius));
  if (fine.batches == 0) {
    const SphereRule coarse = sphere_rule(n, scheme, true);
    e.error = std::abs(e.value - combine_batches(sphere_batches(f, coarse, radius)).value);
  }
  return e;
}

Estimate integrate_annulus(const Integrand& f, int n, double a, double b, const QuadratureScheme& scheme,
                           const std::vector<double>& kinks) {
  if (!(b > a) || !(a > 0.0)) fail(ErrorKind::invalid_argument, "annulus needs 0 < a < b");
  const auto breaks = panel_breaks(a, b, kinks);
  const bool many = breaks.size() > 5;
  const int order = many ? scheme.kink_panel_order : scheme.radial_order;
  const SphereRule fine = sphere_rule(n, scheme);
  Estimate e = combine_batches(annulus_batches(f, n, breaks, order, fine));
  const bool tensor = fine.batches == 0;
  const SphereRule coarse_rule = tensor ? sphere_rule(n, scheme, true) : fine;
  const double coarse = combine_batches(annulus_batches(f, n, breaks, std::max(2, order / 2), coarse_rule)).value;
  e.error += std::abs(e.value - coarse);
  return e;
}

double integrate_interval(const std::function<double(double)>& f, double a, double b, int order,
                          const std::vector<double>& breaks) {
  std::vector<double> t, w;
  gauss_legendre(order, t, w);
  const auto br = panel_breaks(a, b, breaks);
  std::vector<double> terms;
  for (std::size_t p = 0; p + 1 < br.size(); ++p) {
    const double half = 0.5 * (br[p + 1] - br[p]), mid = 0.5 * (br[p + 1] + br[p]);
    for (int i = 0; i < order; ++i) terms.push_back(half * w[i] * f(mid + half * t[i]));
  }
  return pairwise_sum(terms);
}

CutoffFamily::CutoffFamily(CutoffKind kind, std::string name, double lambda, Shape shape, Shape shape_d1)
    : kind_(kind), name_(std::move(name)), lambda_(lambda), shape_(std::move(shape)), shape_d1_(std::move(shape_d1)) {
  if (!(lambda > 1.0)) fail(ErrorKind::invalid_argument, "cutoff needs lambda > 1");
  switch (kind) {
    case CutoffKind::ramp:
    case CutoffKind::wide_ramp:
      uniform_bound_ = 1.0 + lambda / (lambda - 1.0);
      break;
    case CutoffKind::smooth_ramp:
      uniform_bound_ = 1.0 + 4.0 / std::sqrt(3.0);
      break;
    case CutoffKind::custom: {
      // sup_t (1 + (lambda - 1) t) S'(t) / (lambda - 1) on a fine grid.
      double best = 0.0;
      for (int i = 0; i <= 100000; ++i) {
        const double t = i / 100000.0;
        best = std::max(best, (1.0 + (lambda - 1.0) * t) * std::abs(shape_d1_(t)) / (lambda - 1.0));
      }
      uniform_bound_ = 1.0 + best;
      break;
    }
  }
}

CutoffFamily CutoffFamily::ramp() {
  return CutoffFamily(CutoffKind::ramp, "ramp", 2.0, [](double t) { return t; }, [](double) { return 1.0; });
}

CutoffFamily CutoffFamily::smooth_ramp() {
  return CutoffFamily(
      CutoffKind::smooth_ramp, "smooth_ramp", 2.0, [](double t) { return t * t * (3.0 - 2.0 * t); },
      [](double t) { return 6.0 * t * (1.0 - t); });
}

CutoffFamily CutoffFamily::wide_ramp(double lambda) {
  std::ostringstream os;
  os << "wide_ramp:" << lambda;
  return CutoffFamily(CutoffKind::wide_ramp, os.str(), lambda, [](double t) { return t; },
                      [](double) { return 1.0; });
}

CutoffFamily CutoffFamily::custom(std::string name, double lambda, Shape shape, Shape shape_d1) {
  if (!shape || !shape_d1) fail(ErrorKind::invalid_argument, "custom cutoff needs a shape and its derivative");
  return CutoffFamily(CutoffKind::custom, std::move(name), lambda, std::move(shape), std::move(shape_d1));
}

CutoffFamily CutoffFamily::parse(const std::string& spec) {
  if (spec == "ramp") return ramp();
  if (spec == "smooth_ramp") return smooth_ramp();
  if (spec == "wide_ramp") return wide_ramp(3.0);
  if (spec.rfind("wide_ramp:", 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string tail = spec.substr(10);
      const double lambda = std::stod(tail, &used);
      if (used == tail.size()) return wide_ramp(lambda);
    } catch (const std::logic_error&) {
    }
  }
  fail(ErrorKind::invalid_argument, "unknown cutoff '" + spec + "' (ramp, smooth_ramp, wide_ramp[:lambda])");
}

double CutoffFamily::value(double alpha, double r) const {
  if (r <= alpha) return 1.0;
  if (r >= lambda_ * alpha) return 0.0;
  return 1.0 - shape_((r - alpha) / ((lambda_ - 1.0) * alpha));
}

double CutoffFamily::radial_derivative(double alpha, double r) const {
  if (r <= alpha || r >= lambda_ * alpha) return 0.0;
  const double width = (lambda_ - 1.0) * alpha;
  return -shape_d1_((r - alpha) / width) / width;
}

Point CutoffFamily::gradient(double alpha, const Point& x) const {
  const double r = x.norm();
  return radial_derivative(alpha, r) / r * x;
}

RadialTestFunction plateau_linear(double a, double b) {
  if (!(b > a)) fail(ErrorKind::invalid_argument, "test function needs a < b");
  RadialTestFunction phi;
  phi.value = [=](double r) { return r <= a ? 0.0 : r >= b ? 1.0 : (r - a) / (b - a); };
  phi.d1 = [=](double r) { return (r <= a || r >= b) ? 0.0 : 1.0 / (b - a); };
  phi.a = a;
  phi.b = b;
  phi.name = "plateau_linear";
  return phi;
}

RadialTestFunction plateau_smooth(double a, double b) {
  if (!(b > a)) fail(ErrorKind::invalid_argument, "test function needs a < b");
  RadialTestFunction phi;
  phi.value = [=](double r) {
    if (r <= a) return 0.0;
    if (r >= b) return 1.0;
    const double s = (r - a) / (b - a);
    return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
  };
  phi.d1 = [=](double r) {
    if (r <= a || r >= b) return 0.0;
    const double s = (r - a) / (b - a);
    return 30.0 * s * s * (1.0 - s) * (1.0 - s) / (b - a);
  };
  phi.a = a;
  phi.b = b;
  phi.name = "plateau_smooth";
  return phi;
}

RadialTestFunction bump(double a, double b) {
  if (!(b > a)) fail(ErrorKind::invalid_argument, "test function needs a < b");
  RadialTestFunction phi;
  phi.value = [=](double r) {
    if (r <= a || r >= b) return 0.0;
    const double s = (r - a) / (b - a);
    const double q = 4.0 * s * (1.0 - s);
    return q * q * q;
  };
  phi.d1 = [=](double r) {
    if (r <= a || r >= b) return 0.0;
    const double s = (r - a) / (b - a);
    const double q = 4.0 * s * (1.0 - s);
    return 3.0 * q * q * 4.0 * (1.0 - 2.0 * s) / (b - a);
  };
  phi.a = a;
  phi.b = b;
  phi.name = "bump";
  return phi;
}

std::vector<double> parse_schedule(const std::string& spec) {
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::logic_error&) {
      fail(ErrorKind::invalid_argument, "bad number '" + s + "' in schedule '" + spec + "'");
    }
  };
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3 || parts[2].size() < 2)
      fail(ErrorKind::invalid_argument, "schedule '" + spec + "' must look like start:stop:x2 or start:stop:+step");
    const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2].substr(1));
    if (parts[2][0] == 'x') {
      if (!(step > 1.0)) fail(ErrorKind::invalid_argument, "geometric schedule ratio must exceed 1");
      for (double s = start; s <= stop * (1.0 + 1e-12); s *= step) out.push_back(s);
    } else if (parts[2][0] == '+') {
      if (!(step > 0.0)) fail(ErrorKind::invalid_argument, "arithmetic schedule step must be positive");
      for (int i = 0; start + i * step <= stop * (1.0 + 1e-12); ++i) out.push_back(start + i * step);
    } else {
      fail(ErrorKind::invalid_argument, "schedule step must start with 'x' or '+'");
    }
  } else {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(number(item));
  }
  if (out.empty()) fail(ErrorKind::invalid_argument, "empty schedule");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0)) fail(ErrorKind::invalid_argument, "schedule entries must be positive");
    if (i && !(out[i] > out[i - 1])) fail(ErrorKind::invalid_argument, "schedule must be strictly increasing");
  }
  return out;
}

}  // namespace admmass
