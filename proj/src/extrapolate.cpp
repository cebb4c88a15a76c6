#include "admmass/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace admmass {

namespace {

constexpr double kQMin = 0.05;
constexpr double kQMax = 6.0;
constexpr std::size_t kTailWindow = 4;

struct LinearFit {
  double L = 0.0, c = 0.0, ssr = 0.0;
};

LinearFit fit_fixed_q(const std::vector<double>& s, const std::vector<double>& v, double q) {
  const int m = static_cast<int>(s.size());
  Eigen::MatrixXd A(m, 2);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = std::pow(s[i], -q);
    b[i] = v[i];
  }
  const Eigen::Vector2d x = A.colPivHouseholderQr().solve(b);
  LinearFit f;
  f.L = x[0];
  f.c = x[1];
  f.ssr = (A * x - b).squaredNorm();
  return f;
}

double golden_min(const std::vector<double>& s, const std::vector<double>& v, double lo, double hi) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = fit_fixed_q(s, v, x1).ssr, f2 = fit_fixed_q(s, v, x2).ssr;
  for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = fit_fixed_q(s, v, x1).ssr;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = fit_fixed_q(s, v, x2).ssr;
    }
  }
  return 0.5 * (a + b);
}

struct PowerFit {
  double L = 0.0, c = 0.0, q = 0.0, stderr_L = 0.0;
  std::string model;
  std::string flag;
};

PowerFit power_fit(const std::vector<double>& scales, const std::vector<double>& values,
                   const std::vector<double>& noise, double fallback_q) {
  const std::size_t m = values.size();
  PowerFit out;
  double best_q = kQMin, best_ssr = kInfinity;
  for (double q = kQMin; q <= kQMax + 1e-12; q += 0.01) {
    const double ssr = fit_fixed_q(scales, values, q).ssr;
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best_q = q;
    }
  }
  const bool at_boundary = best_q < kQMin + 0.005 || best_q > kQMax - 0.005;
  if (at_boundary) {
    const double q = best_q > kQMax - 0.005 ? kQMax : fallback_q;
    const double s1 = std::pow(scales[m - 2], q), s2 = std::pow(scales[m - 1], q);
    out.L = (s2 * values[m - 1] - s1 * values[m - 2]) / (s2 - s1);
    out.q = q;
    out.c = (values[m - 1] - out.L) * s2;
    out.model = "richardson";
    out.stderr_L = std::abs(out.L - values[m - 1]) + noise[m - 1];
    out.flag = best_q < kQMin + 0.005 ? "slow_convergence: decay exponent below fit range"
                                      : "fast_convergence: decay exponent above fit range";
    return out;
  }
  best_q = golden_min(scales, values, std::max(kQMin, best_q - 0.01), std::min(kQMax, best_q + 0.01));
  const LinearFit lf = fit_fixed_q(scales, values, best_q);
  out.L = lf.L;
  out.c = lf.c;
  out.q = best_q;
  out.model = "power_fit";

  // Covariance of (L, c, q) from the Jacobian.
  double noise2 = 0.0;
  for (double e : noise) noise2 += e * e;
  noise2 /= static_cast<double>(m);
  const double sigma2 = std::max(m > 3 ? lf.ssr / static_cast<double>(m - 3) : 0.0, noise2);
  Eigen::MatrixXd J(m, 3);
  for (std::size_t i = 0; i < m; ++i) {
    const double sq = std::pow(scales[i], -best_q);
    J(i, 0) = 1.0;
    J(i, 1) = sq;
    J(i, 2) = -lf.c * sq * std::log(scales[i]);
  }
  const Eigen::Matrix3d jtj = J.transpose() * J;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(jtj);
  double var_L;
  if (lu.rank() == 3) {
    var_L = sigma2 * lu.inverse()(0, 0);
  } else {
    const Eigen::Matrix2d jtj2 = jtj.topLeftCorner<2, 2>();
    var_L = sigma2 * jtj2.inverse()(0, 0);
  }
  out.stderr_L = std::sqrt(std::max(0.0, var_L));
  return out;
}

bool oscillating_tail(const std::vector<double>& v, const std::vector<double>& noise) {
  const std::size_t m = v.size();
  std::vector<double> d;
  const std::size_t first = m > 5 ? m - 5 : 0;
  for (std::size_t i = first; i + 1 < m; ++i) {
    const double diff = v[i + 1] - v[i];
    if (std::abs(diff) > 2.0 * (noise[i] + noise[i + 1])) d.push_back(diff);
  }
  for (std::size_t i = 0; i + 1 < d.size(); ++i)
    if (d[i] * d[i + 1] < 0.0 && std::abs(d[i + 1]) >= 0.5 * std::abs(d[i])) return true;
  return false;
}

}  // namespace

LimitFit extrapolate_limit(const std::vector<double>& scales, const std::vector<double>& values,
                           const std::vector<double>& noise, double fallback_q) {
  if (scales.size() != values.size()) fail(ErrorKind::invalid_argument, "scales and values differ in length");
  if (scales.size() < 4) fail(ErrorKind::invalid_argument, "at least 4 scales are required for a limit fit");
  if (!noise.empty() && noise.size() != values.size())
    fail(ErrorKind::invalid_argument, "noise and values differ in length");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!std::isfinite(values[i]) || !(scales[i] > 0.0)) fail(ErrorKind::invalid_argument, "non-finite value or scale");
    if (i && !(scales[i] > scales[i - 1])) fail(ErrorKind::invalid_argument, "scales must be strictly increasing");
  }

  LimitFit fit;
  fit.scales = scales;
  fit.values = values;
  const std::size_t m = values.size();
  fit.noise.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    fit.noise[i] = std::max(noise.empty() ? 0.0 : noise[i], 1e-13 * (1.0 + std::abs(values[i])));

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double spread = *hi_it - *lo_it;
  const double noise_max = *std::max_element(fit.noise.begin(), fit.noise.end());
  if (spread <= 2.0 * noise_max) {
    double sum = 0.0;
    for (double v : values) sum += v;
    fit.limit = sum / static_cast<double>(m);
    fit.c = 0.0;
    fit.q = 0.0;
    fit.limit_stderr = std::max(0.5 * spread, noise_max);
    fit.model = "constant";
    return fit;
  }

  if (oscillating_tail(values, fit.noise)) {
    fit.converged = false;
    fit.flags.push_back("no_convergence: tail changes direction beyond noise");
  }

  const PowerFit full = power_fit(scales, values, fit.noise, fallback_q);
  PowerFit chosen = full;
  if (m > kTailWindow) {
    // The model ignores higher-order corrections, which weigh most at the
    // smallest scales; the trailing window is less biased and the spread
    // between the two fits enters the error bar.
    const std::vector<double> ts(scales.end() - kTailWindow, scales.end());
    const std::vector<double> tv(values.end() - kTailWindow, values.end());
    const std::vector<double> tn(fit.noise.end() - kTailWindow, fit.noise.end());
    const PowerFit tail = power_fit(ts, tv, tn, fallback_q);
    if (tail.model == full.model) {
      chosen = tail;
      chosen.stderr_L = std::hypot(tail.stderr_L, tail.L - full.L);
    }
  }
  fit.limit = chosen.L;
  fit.c = chosen.c;
  fit.q = chosen.q;
  fit.model = chosen.model;
  fit.limit_stderr = chosen.stderr_L;
  if (!chosen.flag.empty()) fit.flags.push_back(chosen.flag);
  if (!std::isfinite(fit.limit) || !std::isfinite(fit.limit_stderr)) {
    fit.converged = false;
    fit.flags.push_back("no_convergence: fit produced a non-finite limit");
  }
  return fit;
}

}  // namespace admmass
