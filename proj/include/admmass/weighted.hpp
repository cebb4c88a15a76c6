#pragma once

#include "admmass/metric.hpp"
#include "admmass/quadrature.hpp"

#include <functional>
#include <string>
#include <vector>

namespace admmass {

/// A tensor field on the exterior region, seen through the flat norms of its
/// derivatives: magnitude(x, l) = |D^l T|_delta(x) for l <= max_order.
struct TensorField {
  int dim = 3;
  int max_order = 0;
  std::function<double(const Point&, int)> magnitude;
  std::function<std::vector<double>(double, double)> kinks;  // may be empty
  std::string name;
};

/// The scalar a(|x|). |Da| = |a'|, |D^2 a| = sqrt(a''^2 + (n-1)(a'/r)^2).
TensorField radial_scalar_field(int n, const RadialProfile& a);
/// The product of two radial scalars, with exact derivatives.
TensorField radial_product_field(int n, const RadialProfile& a, const RadialProfile& b);
/// T = lambda * field.
TensorField scaled_field(const TensorField& field, double lambda);
/// e = g - delta of a metric, up to second derivatives.
TensorField metric_error_field(MetricPtr metric);

enum class Verdict { member, borderline, non_member };
const char* to_string(Verdict v);

struct WeightedNormSpec {
  int k = 0;
  double p = 2.0;  // kInfinity for the sup norm
  double tau = 0.0;
  double r_in = 1.0;
  double r_out = 64.0;
  int sup_samples = 4096;  // per dyadic annulus when p is infinite
};

struct WeightedNormResult {
  double value = 0.0;           // truncated norm, sum over l <= k
  double tail_estimate = 0.0;   // estimated contribution of r > r_out (infinite when diverging)
  double extrapolated = 0.0;    // value + tail_estimate
  std::vector<double> dyad_radii;     // inner radius of each dyadic annulus
  std::vector<double> contributions;  // per dyad: sum_l of int r^{p(tau+l)-n}|D^l T|^p, or the sup for p infinite
  double dyad_slope = 0.0;  // log2 growth per dyad over the last four dyads, divided by p (or raw for p infinite)
  Verdict verdict = Verdict::member;
};

/// Norm of Def. W^{k,p}_{-tau} on r_in <= |x| <= r_out by dyadic annulus
/// quadrature, with a geometric tail fit over the outer dyads.
WeightedNormResult weighted_norm(const TensorField& field, const WeightedNormSpec& spec,
                                 const QuadratureScheme& scheme = {});

struct FalloffQuery {
  int k = 0;
  double p = 2.0;
  double tau = 0.0;
  Verdict verdict = Verdict::member;
};

struct FalloffReport {
  std::vector<double> radii;
  std::vector<double> magnitudes;  // sup of |T| over the sphere of each radius
  double fitted_sigma = 0.0;       // kInfinity when the field vanishes to rounding
  double fitted_C = 0.0;
  double residual = 0.0;  // rms of the log-log fit
  std::vector<FalloffQuery> queries;
};

/// Fits sup_{|x|=r} |T| = C r^{-sigma} over at least 4 radii and decides each
/// query by the strict inequality tau < sigma with a 0.05 margin: member below
/// sigma - 0.05, non-member at or above sigma, borderline in between.
FalloffReport classify_falloff(const TensorField& field, const std::vector<double>& radii,
                               std::vector<FalloffQuery> queries = {}, const QuadratureScheme& scheme = {});

struct AeClassReport {
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  double comparability = 1.0;   // max(lambda_max, 1/lambda_min) over samples
  bool bounded = true;          // g and g^{-1} bounded on the samples
  bool comparable = true;       // within the metric's declared constant
  WeightedNormResult error_norm;  // e in W^{k,p}_{-tau}
  Verdict verdict = Verdict::member;
};

AeClassReport check_ae_class(MetricPtr metric, int k, double p, double tau, double r_out = 256.0,
                             const QuadratureScheme& scheme = {});

struct HolderCheck {
  double lhs = 0.0;    // ||u1 u2||_{W^{k,q}_{-tau1-tau2}}
  double rhs = 0.0;    // ||u1||_{W^{k,p1}_{-tau1}} ||u2||_{W^{k,p2}_{-tau2}}
  double ratio = 0.0;  // lhs / rhs (0 when lhs vanishes)
  double constant = 1.0;  // C(k) for which the inequality holds with this norm: 1 for k <= 1, 2 for k = 2
};

/// Both sides of the weighted Hoelder inequality for radial scalars on a
/// truncation [r_in, r_out]. Requires 1/p1 + 1/p2 = 1/q.
HolderCheck holder_product_check(int n, const RadialProfile& u1, const RadialProfile& u2, int k, double p1,
                                 double p2, double q, double tau1, double tau2, double r_in, double r_out,
                                 const QuadratureScheme& scheme = {});

}  // namespace admmass
