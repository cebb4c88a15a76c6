#pragma once

#include "admmass/metric.hpp"

#include <vector>

namespace admmass {

/// gamma[k](i, j) holds Gamma^k_ij.
using Christoffel = std::array<Matrix, kMaxDim>;

/// e = g - delta, f = g^{-1} - delta and their first derivatives.
/// `df` comes from df^{jk} = -g^{jp} g^{kq} de_pq, not from differencing the
/// inverse. `product_rule_residual` is the max entry of D(g g^{-1}) computed
/// from (de, df), which vanishes exactly when the identity is consistent.
struct ErrorTensors {
  int n = 0;
  Matrix g_inv;
  Matrix e, f;
  std::array<Matrix, kMaxDim> de, df;
  double product_rule_residual = 0.0;
};

ErrorTensors error_tensors(const MetricJet& jet);
ErrorTensors error_tensors(const MetricField& metric, const Point& x);

/// Gamma^k_ij = g^{kl} (D_i e_jl + D_j e_il - D_l e_ij) / 2.
Christoffel difference_tensor(const MetricJet& jet, const Matrix& g_inv);
Christoffel difference_tensor(const MetricField& metric, const Point& x);

/// Frobenius norm of a rank-3 array stored as n matrices.
double norm3(const std::array<Matrix, kMaxDim>& t, int n);

struct CurvatureOptions {
  /// Multiplies Q^S. Anything other than +1 is a deliberate corruption used to
  /// exercise the residual checks.
  double q_scalar_sign = 1.0;
};

struct CurvaturePointData {
  int n = 0;
  Matrix g, g_inv;
  Matrix e, f;
  Christoffel gamma;
  Matrix ric_leading;  // g^{kl}(D_kD_i g_lj + D_kD_j g_li - D_kD_l g_ij - D_iD_j g_kl)/2
  Matrix q_ricci;
  Matrix ric;
  double scal = 0.0;  // g^{ij} Ric_ij
  Matrix einstein;
  Point v_field;
  double div_v = 0.0;
  double q_scalar = 0.0;
  double decomposition_residual = 0.0;  // |Scal - div V - Q^S|
  bool one_sided = false;               // evaluated just off a kink sphere
};

CurvaturePointData curvature_point(const MetricJet& jet, const CurvatureOptions& options = {});

enum class Side { outer, inner };

/// Curvature at x. On a kink sphere of the metric the point is nudged by a
/// relative 1e-12 to the requested side and the result is flagged one_sided.
CurvaturePointData curvature_point(const MetricField& metric, const Point& x, Side side = Side::outer,
                                   const CurvatureOptions& options = {});

/// V^i = (g^{ij} g^{kl} - g^{ik} g^{jl}) D_k e_jl from a first-order jet.
Point v_field(const MetricJet& jet, const Matrix& g_inv);

Matrix einstein(const MetricField& metric, const Point& x);

struct BianchiResult {
  double max_residual = 0.0;
  double mean_residual = 0.0;
  std::size_t points = 0;
  bool near_kink = false;
};

/// |div_g G| with DG from five-point central differences of the Einstein tensor.
BianchiResult bianchi_residual(const MetricField& metric, const std::vector<Point>& sample,
                               double step = 1e-3);

}  // namespace admmass
