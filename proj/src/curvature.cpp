#include "admmass/curvature.hpp"

#include <cmath>

namespace admmass {

namespace {

Matrix checked_inverse(const Matrix& g) {
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) fail(ErrorKind::numerical, "metric is singular or indefinite at the query point");
  const int n = static_cast<int>(g.rows());
  Matrix inv = llt.solve(Matrix::Identity(n, n));
  return 0.5 * (inv + inv.transpose());
}

// D_k g^{ab} = -g^{ap} g^{bq} D_k g_pq
std::array<Matrix, kMaxDim> inverse_derivatives(const MetricJet& jet, const Matrix& g_inv) {
  std::array<Matrix, kMaxDim> d;
  for (int k = 0; k < jet.n; ++k) d[k] = -g_inv * jet.dg[k] * g_inv;
  return d;
}

bool on_kink(const MetricField& metric, double r) {
  return !metric.kinks_in(r * (1.0 - 1e-10), r * (1.0 + 1e-10)).empty();
}

}  // namespace

double norm3(const std::array<Matrix, kMaxDim>& t, int n) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += t[k].squaredNorm();
  return std::sqrt(s);
}

ErrorTensors error_tensors(const MetricJet& jet) {
  if (jet.order < 1) fail(ErrorKind::invalid_argument, "error tensors need first derivatives");
  const int n = jet.n;
  ErrorTensors out;
  out.n = n;
  out.g_inv = checked_inverse(jet.g);
  out.e = jet.g - Matrix::Identity(n, n);
  out.f = out.g_inv - Matrix::Identity(n, n);
  for (int k = 0; k < n; ++k) {
    out.de[k] = jet.dg[k];
    out.df[k] = -out.g_inv * jet.dg[k] * out.g_inv;
  }
  // D(g g^{-1}) = De g^{-1} + g Df must vanish.
  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    worst = std::max(worst, (out.de[k] * out.g_inv + jet.g * out.df[k]).cwiseAbs().maxCoeff());
  out.product_rule_residual = worst;
  return out;
}

ErrorTensors error_tensors(const MetricField& metric, const Point& x) { return error_tensors(metric.jet(x, 1)); }

Christoffel difference_tensor(const MetricJet& jet, const Matrix& g_inv) {
  const int n = jet.n;
  // lowered(l)(i, j) = (D_i e_jl + D_j e_il - D_l e_ij) / 2
  std::array<Matrix, kMaxDim> lowered;
  for (int l = 0; l < n; ++l) {
    lowered[l] = Matrix(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        lowered[l](i, j) = 0.5 * (jet.dg[i](j, l) + jet.dg[j](i, l) - jet.dg[l](i, j));
  }
  Christoffel gamma;
  for (int k = 0; k < n; ++k) {
    gamma[k] = Matrix::Zero(n, n);
    for (int l = 0; l < n; ++l) gamma[k] += g_inv(k, l) * lowered[l];
  }
  return gamma;
}

Christoffel difference_tensor(const MetricField& metric, const Point& x) {
  const MetricJet jet = metric.jet(x, 1);
  return difference_tensor(jet, checked_inverse(jet.g));
}

Point v_field(const MetricJet& jet, const Matrix& g_inv) {
  const int n = jet.n;
  Point w1 = Point::Zero(n), w2 = Point::Zero(n);
  for (int k = 0; k < n; ++k) {
    const Matrix m = jet.dg[k] * g_inv;  // m(j, k') = sum_l D_k g_jl g^{lk'}
    for (int j = 0; j < n; ++j) w1[j] += m(j, k);
    w2[k] = m.trace();
  }
  return g_inv * (w1 - w2);
}

CurvaturePointData curvature_point(const MetricJet& jet, const CurvatureOptions& options) {
  if (jet.order < 2) fail(ErrorKind::invalid_argument, "curvature needs second derivatives");
  const int n = jet.n;
  CurvaturePointData out;
  out.n = n;
  out.g = jet.g;
  out.g_inv = checked_inverse(jet.g);
  const Matrix& gi = out.g_inv;
  out.e = jet.g - Matrix::Identity(n, n);
  out.f = gi - Matrix::Identity(n, n);
  out.gamma = difference_tensor(jet, gi);
  const auto dgi = inverse_derivatives(jet, gi);
  const Christoffel& G = out.gamma;

  // trace_gamma[u] = Gamma^v_vu
  Point trace_gamma = Point::Zero(n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) trace_gamma[u] += G[v](v, u);

  out.ric_leading = Matrix::Zero(n, n);
  out.q_ricci = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double lead = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          lead += gi(k, l) * (jet.d2(k, i)(l, j) + jet.d2(k, j)(l, i) - jet.d2(k, l)(i, j) - jet.d2(i, j)(k, l));
      double q = 0.0;
      for (int u = 0; u < n; ++u) {
        q += G[u](i, j) * trace_gamma[u];
        for (int v = 0; v < n; ++v) q -= G[u](i, v) * G[v](j, u);
        for (int l = 0; l < n; ++l) {
          q += 0.5 * dgi[u](u, l) * (jet.dg[i](l, j) + jet.dg[j](l, i) - jet.dg[l](i, j));
          q -= 0.5 * dgi[i](u, l) * (jet.dg[u](l, j) + jet.dg[j](l, u) - jet.dg[l](u, j));
        }
      }
      out.ric_leading(i, j) = out.ric_leading(j, i) = 0.5 * lead;
      out.q_ricci(i, j) = out.q_ricci(j, i) = q;
    }
  out.ric = out.ric_leading + out.q_ricci;
  out.scal = (gi.cwiseProduct(out.ric)).sum();
  out.einstein = out.ric - 0.5 * out.scal * jet.g;

  out.v_field = v_field(jet, gi);

  // div V = D_i[(g^{ij} g^{kl} - g^{ik} g^{jl})] D_k g_jl + (g^{ij} g^{kl} - g^{ik} g^{jl}) D_iD_k g_jl
  double div_v = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double c = gi(i, j) * gi(k, l) - gi(i, k) * gi(j, l);
          const double dc = dgi[i](i, j) * gi(k, l) + gi(i, j) * dgi[i](k, l) - dgi[i](i, k) * gi(j, l) -
                            gi(i, k) * dgi[i](j, l);
          div_v += dc * jet.dg[k](j, l) + c * jet.d2(i, k)(j, l);
        }
  out.div_v = div_v;

  double qs = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double inner = 0.0;
      for (int u = 0; u < n; ++u) {
        inner += G[u](i, j) * trace_gamma[u];
        for (int v = 0; v < n; ++v) inner -= G[u](v, i) * G[v](j, u);
      }
      qs += gi(i, j) * inner;
      for (int v = 0; v < n; ++v) qs -= dgi[v](i, j) * G[v](i, j);
      qs += dgi[i](i, j) * trace_gamma[j];
    }
  out.q_scalar = options.q_scalar_sign * qs;
  out.decomposition_residual = std::abs(out.scal - out.div_v - out.q_scalar);
  return out;
}

CurvaturePointData curvature_point(const MetricField& metric, const Point& x, Side side,
                                   const CurvatureOptions& options) {
  if (on_kink(metric, x.norm())) {
    const Point y = x * (side == Side::outer ? 1.0 + 1e-12 : 1.0 - 1e-12);
    CurvaturePointData data = curvature_point(metric.jet(y, 2), options);
    data.one_sided = true;
    return data;
  }
  return curvature_point(metric.jet(x, 2), options);
}

Matrix einstein(const MetricField& metric, const Point& x) { return curvature_point(metric, x).einstein; }

BianchiResult bianchi_residual(const MetricField& metric, const std::vector<Point>& sample, double step) {
  BianchiResult result;
  double total = 0.0;
  for (const Point& x : sample) {
    const int n = metric.dim();
    const double r = x.norm();
    if (!metric.kinks_in(r - 2.0 * step, r + 2.0 * step).empty()) result.near_kink = true;
    const CurvaturePointData c = curvature_point(metric, x);
    std::array<Matrix, kMaxDim> dG;
    for (int k = 0; k < n; ++k) {
      auto at = [&](double t) {
        Point y = x;
        y[k] += t;
        return einstein(metric, y);
      };
      dG[k] = (at(-2.0 * step) - 8.0 * at(-step) + 8.0 * at(step) - at(2.0 * step)) / (12.0 * step);
    }
    // (div_g G)_j = g^{ik} (D_k G_ij - Gamma^m_ki G_mj - Gamma^m_kj G_im)
    double norm2 = 0.0;
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
          double term = dG[k](i, j);
          for (int m = 0; m < n; ++m)
            term -= c.gamma[m](k, i) * c.einstein(m, j) + c.gamma[m](k, j) * c.einstein(i, m);
          s += c.g_inv(i, k) * term;
        }
      norm2 += s * s;
    }
    const double res = std::sqrt(norm2);
    result.max_residual = std::max(result.max_residual, res);
    total += res;
    ++result.points;
  }
  if (result.points) result.mean_residual = total / static_cast<double>(result.points);
  return result;
}

}  // namespace admmass
