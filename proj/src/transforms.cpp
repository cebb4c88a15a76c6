#include "admmass/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace admmass {

namespace {

std::array<Matrix, kMaxDim> zero_hessian(int n) {
  std::array<Matrix, kMaxDim> h;
  for (int i = 0; i < n; ++i) h[i] = Matrix::Zero(n, n);
  return h;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

DiffeoSpec make_isometry(const Matrix& q, const Point& b) {
  const int n = static_cast<int>(q.rows());
  if (q.cols() != n || b.size() != n) fail(ErrorKind::invalid_argument, "isometry dimensions do not match");
  if ((q.transpose() * q - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
    fail(ErrorKind::invalid_argument, "isometry matrix is not orthogonal");
  DiffeoSpec f;
  f.kind = DiffeoKind::isometry;
  f.dim = n;
  f.q = q;
  f.b = b;
  f.domain_radius = 0.0;
  f.forward = [q, b](const Point& x) -> Point { return q * x + b; };
  f.inverse = [q, b](const Point& y) -> Point { return q.transpose() * (y - b); };
  f.jacobian = [q](const Point&) -> Matrix { return q; };
  f.hessian = [n](const Point&) { return zero_hessian(n); };
  const double shift = b.norm();
  f.image_radius = [shift](double r) { return r + shift; };
  if (shift == 0.0) f.radial_image = [](double r) { return r; };
  f.name = shift == 0.0 ? "rotation" : "isometry(|b|=" + fmt(shift) + ")";
  return f;
}

DiffeoSpec random_isometry(int n, std::uint64_t seed, double max_shift) {
  if (n < 2 || n > kMaxDim) fail(ErrorKind::invalid_argument, "dimension out of range");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  // Fix the column signs so that the distribution is uniform.
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  Point dir(n);
  for (int i = 0; i < n; ++i) dir[i] = gauss(rng);
  dir *= max_shift * unit(rng) / dir.norm();
  DiffeoSpec f = make_isometry(q, dir);
  f.name += "#" + std::to_string(seed);
  return f;
}

DiffeoSpec make_almost_identity(int n, double c, double tau_prime, double domain_radius) {
  if (n < 3 || n > kMaxDim) fail(ErrorKind::invalid_argument, "dimension out of range");
  if (!(tau_prime > 0.5 * (n - 2)))
    fail(ErrorKind::invalid_argument, "hypothesis violated: tau_prime must exceed (n-2)/2 = " + fmt(0.5 * (n - 2)));
  if (!(domain_radius > 0.0)) fail(ErrorKind::invalid_argument, "domain radius must be positive");
  // phi(r) = s(r) / r = 1 + c r^{-tau'}; s'(r) = 1 + c (1 - tau') r^{-tau'}.
  // The correction decays, so s' is extremal at the inner radius.
  const double sprime_min = 1.0 + c * (1.0 - tau_prime) * std::pow(domain_radius, -tau_prime);
  const double phi_min = 1.0 + c * std::pow(domain_radius, -tau_prime);
  if (!(sprime_min > 0.0) || !(phi_min > 0.0))
    fail(ErrorKind::invalid_argument, "non-monotone radial map: amplitude too large for the domain");

  auto phi = [c, tau_prime](double r) { return 1.0 + c * std::pow(r, -tau_prime); };
  auto phi1 = [c, tau_prime](double r) { return -c * tau_prime * std::pow(r, -tau_prime - 1.0); };
  auto phi2 = [c, tau_prime](double r) { return c * tau_prime * (tau_prime + 1.0) * std::pow(r, -tau_prime - 2.0); };
  auto s = [phi](double r) { return r * phi(r); };
  auto s1 = [c, tau_prime](double r) { return 1.0 + c * (1.0 - tau_prime) * std::pow(r, -tau_prime); };

  // Safeguarded Newton for s(rho) = t.
  auto radial_inverse = [s, s1, domain_radius](double t) {
    if (t < s(domain_radius) * (1.0 - 1e-12)) fail(ErrorKind::domain, "point outside the image of the diffeomorphism");
    double lo = domain_radius, hi = std::max(t, domain_radius);
    while (s(hi) < t) hi *= 2.0;
    double rho = std::clamp(t, lo, hi);
    for (int it = 0; it < 200; ++it) {
      const double val = s(rho) - t;
      if (val > 0.0) hi = rho;
      else lo = rho;
      double next = rho - val / s1(rho);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - rho) <= 1e-14 * rho || hi - lo <= 1e-15 * hi) return next;
      rho = next;
    }
    fail(ErrorKind::numerical, "Newton inversion of the radial map did not converge");
  };

  DiffeoSpec f;
  f.kind = DiffeoKind::almost_identity;
  f.dim = n;
  f.c = c;
  f.tau_prime = tau_prime;
  f.domain_radius = domain_radius;
  f.forward = [phi](const Point& x) -> Point { return phi(x.norm()) * x; };
  f.inverse = [radial_inverse](const Point& y) -> Point {
    const double t = y.norm();
    return (radial_inverse(t) / t) * y;
  };
  f.jacobian = [n, phi, phi1](const Point& x) -> Matrix {
    const double r = x.norm();
    Matrix j = phi(r) * Matrix::Identity(n, n);
    j += (phi1(r) / r) * x * x.transpose();
    return j;
  };
  f.hessian = [n, phi1, phi2](const Point& x) {
    const double r = x.norm();
    const double p1 = phi1(r), p2 = phi2(r);
    std::array<Matrix, kMaxDim> h;
    for (int i = 0; i < n; ++i) {
      h[i].resize(n, n);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double dkl = k == l ? 1.0 : 0.0;
          double v = p2 * x[k] * x[l] / (r * r) * x[i] + p1 * (dkl - x[k] * x[l] / (r * r)) / r * x[i];
          if (i == l) v += p1 * x[k] / r;
          if (i == k) v += p1 * x[l] / r;
          h[i](k, l) = v;
        }
    }
    return h;
  };
  f.image_radius = s;
  f.radial_image = s;
  f.name = "almost_identity(c=" + fmt(c) + ",tau'=" + fmt(tau_prime) + ")";
  return f;
}

DiffeoSpec invert(const DiffeoSpec& f) {
  if (f.kind == DiffeoKind::isometry) {
    DiffeoSpec g = make_isometry(f.q.transpose(), -(f.q.transpose() * f.b));
    g.name = "inverse(" + f.name + ")";
    return g;
  }
  const int n = f.dim;
  DiffeoSpec g;
  g.kind = DiffeoKind::custom;
  g.dim = n;
  g.forward = f.inverse;
  g.inverse = f.forward;
  g.jacobian = [f](const Point& y) -> Matrix { return f.jacobian(f.inverse(y)).inverse(); };
  g.hessian = [f, n](const Point& y) {
    const Point x = f.inverse(y);
    const Matrix a = f.jacobian(x).inverse();
    const auto h = f.hessian(x);
    // d^2 x^i / dy^k dy^l = -A^i_a H^a_{bp} A^b_k A^p_l
    std::array<Matrix, kMaxDim> out;
    for (int i = 0; i < n; ++i) out[i] = Matrix::Zero(n, n);
    for (int a_idx = 0; a_idx < n; ++a_idx) {
      const Matrix t = a.transpose() * h[a_idx] * a;
      for (int i = 0; i < n; ++i) out[i] -= a(i, a_idx) * t;
    }
    return out;
  };
  if (f.radial_image) {
    auto finv = f.inverse;
    auto radial = [finv, n](double t) {
      Point e = Point::Zero(n);
      e[0] = t;
      return finv(e).norm();
    };
    g.radial_image = radial;
    g.image_radius = radial;
    g.domain_radius = f.radial_image(f.domain_radius);
  } else {
    g.image_radius = [](double r) { return r; };
    g.domain_radius = f.image_radius(f.domain_radius);
  }
  g.name = "inverse(" + f.name + ")";
  return g;
}

JacobianDecay jacobian_decay(const DiffeoSpec& f, const std::vector<double>& radii, const QuadratureScheme& scheme) {
  JacobianDecay out;
  out.radii = radii;
  const SphereRule rule = sphere_rule(f.dim, scheme, true);
  for (double r : radii) {
    double m = 0.0;
    for (const Point& u : rule.nodes)
      m = std::max(m, (f.jacobian(r * u) - Matrix::Identity(f.dim, f.dim)).norm());
    out.deviations.push_back(m);
  }
  out.fitted_rate = -log_log_slope(radii, out.deviations);
  return out;
}

namespace {

class PushforwardMetric final : public MetricField {
 public:
  PushforwardMetric(MetricInfo info, MetricPtr base, DiffeoSpec f)
      : MetricField(std::move(info)), base_(std::move(base)), f_(std::move(f)) {}

  std::vector<double> kinks_in(double a, double b) const override {
    if (!f_.radial_image) return {};
    const int n = dim();
    auto preimage = [&](double t) {
      Point e = Point::Zero(n);
      e[0] = t;
      return f_.inverse(e).norm();
    };
    const double lo = std::max(preimage(std::max(a, info_.inner_radius)), base_->inner_radius());
    std::vector<double> out;
    for (double rk : base_->kinks_in(lo, preimage(b))) out.push_back(f_.radial_image(rk));
    return out;
  }

 protected:
  MetricJet compute_jet(const Point& y, int order) const override {
    MetricJet out = first_order(y, std::min(order, 1));
    if (order < 2) return out;
    const int n = dim();
    const double h = 1e-4 * std::max(y.norm(), 1.0);
    std::array<std::array<Matrix, kMaxDim>, kMaxDim> d;  // d[k][l] = d_k (d_l h)
    for (int k = 0; k < n; ++k) {
      Point yp = y, ym = y;
      yp[k] += h;
      ym[k] -= h;
      if (contains(ym)) {
        const MetricJet jp = first_order(yp, 1), jm = first_order(ym, 1);
        for (int l = 0; l < n; ++l) d[k][l] = (jp.dg[l] - jm.dg[l]) / (2.0 * h);
      } else {
        Point yp2 = y;
        yp2[k] += 2.0 * h;
        const MetricJet jp = first_order(yp, 1), jp2 = first_order(yp2, 1);
        for (int l = 0; l < n; ++l) d[k][l] = (-3.0 * out.dg[l] + 4.0 * jp.dg[l] - jp2.dg[l]) / (2.0 * h);
      }
    }
    out.order = 2;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) out.d2(k, l) = 0.5 * (d[k][l] + d[l][k]);
    return out;
  }

 private:
  MetricJet first_order(const Point& y, int order) const {
    const int n = dim();
    const Point x = f_.inverse(y);
    const MetricJet g = base_->jet(x, order);
    const Matrix a = f_.jacobian(x).inverse();  // dx/dy
    MetricJet out = MetricJet::zero(n, order);
    out.g = a.transpose() * g.g * a;
    out.g = 0.5 * (out.g + out.g.transpose()).eval();
    if (order < 1) return out;
    const auto hess = f_.hessian(x);
    for (int m = 0; m < n; ++m) {
      // d_{y^m} of dF^i/dx^k along the curve, then d_{y^m} A = -A (dJ) A.
      Matrix dj(n, n);
      for (int i = 0; i < n; ++i) dj.row(i) = (hess[i] * a.col(m)).transpose();
      const Matrix da = -a * dj * a;
      Matrix dgy = Matrix::Zero(n, n);
      for (int p = 0; p < n; ++p) dgy += g.dg[p] * a(p, m);
      out.dg[m] = a.transpose() * dgy * a + da.transpose() * g.g * a + a.transpose() * g.g * da;
    }
    return out;
  }

  MetricPtr base_;
  DiffeoSpec f_;
};

}  // namespace

MetricPtr pushforward_metric(MetricPtr metric, const DiffeoSpec& f) {
  if (f.dim != metric->dim()) fail(ErrorKind::invalid_argument, "diffeomorphism and metric dimensions differ");
  if (!f.forward || !f.inverse || !f.jacobian || !f.hessian || !f.image_radius)
    fail(ErrorKind::invalid_argument, "incomplete diffeomorphism description");
  MetricInfo info = metric->info();
  const double inner = std::max(metric->inner_radius(), f.domain_radius);
  info.inner_radius = f.image_radius(inner);
  if (std::isfinite(metric->outer_radius())) {
    if (!f.radial_image) fail(ErrorKind::invalid_argument, "bounded domains need a radial diffeomorphism");
    info.outer_radius = f.radial_image(metric->outer_radius());
  }
  if (f.kind != DiffeoKind::isometry) {
    // Bound the singular values of dF^{-1} at the inner sphere, where the
    // deviation from the identity is largest for the built-in families.
    Point e = Point::Zero(f.dim);
    e[0] = inner;
    const Eigen::JacobiSVD<Matrix> svd(f.jacobian(e));
    const double smax = svd.singularValues().maxCoeff(), smin = svd.singularValues().minCoeff();
    info.comparability *= std::max(smax * smax, 1.0 / (smin * smin));
    if (info.regularity == Regularity::analytic) info.regularity = Regularity::c2;
  }
  info.id = "push[" + f.name + "](" + metric->id() + ")";
  return std::make_shared<PushforwardMetric>(std::move(info), std::move(metric), f);
}

std::vector<InvarianceResult> invariance_experiment(MetricPtr metric, const DiffeoSpec& f,
                                                    const std::vector<MassMethod>& methods,
                                                    const std::vector<double>& scales, const CutoffFamily& family,
                                                    const QuadratureScheme& scheme) {
  if (methods.empty()) fail(ErrorKind::invalid_argument, "no mass methods requested");
  const MetricPtr pushed = pushforward_metric(metric, f);
  std::vector<InvarianceResult> out;
  for (MassMethod m : methods) {
    InvarianceResult r;
    r.method = m;
    r.before = compute_mass(m, *metric, family, scales, scheme);
    r.after = compute_mass(m, *pushed, family, scales, scheme);
    std::vector<double> noise;
    for (std::size_t i = 0; i < scales.size(); ++i) {
      r.deltas.push_back(r.after.values[i] - r.before.values[i]);
      noise.push_back(std::hypot(r.after.quad_errors[i], r.before.quad_errors[i]));
    }
    if (scales.size() >= 4) {
      r.delta_limit = extrapolate_limit(r.after.scales, r.deltas, noise);
    } else {
      r.delta_limit.limit = r.deltas.back();
      r.delta_limit.model = "last_value";
      r.delta_limit.converged = false;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace admmass
