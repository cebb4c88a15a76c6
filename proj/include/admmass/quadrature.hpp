#pragma once

#include "admmass/types.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace admmass {

/// Volume of the unit sphere S^{n-1} in R^n, 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

struct QuadratureScheme {
  int radial_order = 16;   // Gauss-Legendre nodes per radial panel
  int kink_panel_order = 8;  // per panel once kinks split an annulus into many panels
  int angular_order = 16;  // tensor rules: Gauss nodes in the polar variable
  int qmc_points = 2048;   // n >= 5: points over all randomized batches
  int qmc_batches = 8;
  std::uint64_t seed = 0;
};

/// Quadrature on the unit sphere S^{n-1}. Weights sum to the sphere area.
///
/// n = 3: Gauss-Legendre in cos(theta) times the trapezoid rule in phi.
/// n = 4: Gauss-Chebyshev (second kind) in the last coordinate times the n = 3
/// rule. n >= 5: randomly shifted Halton points pushed to the sphere through
/// Box-Muller, in antipodal pairs; `batch` tags each node with its batch.
struct SphereRule {
  int n = 0;
  std::vector<Point> nodes;
  std::vector<double> weights;
  std::vector<int> batch;  // empty for tensor rules
  int batches = 0;
};

SphereRule sphere_rule(int n, const QuadratureScheme& scheme, bool coarse = false);

using Integrand = std::function<double(const Point&)>;

/// Integral over the sphere of radius R (area element of the flat metric).
/// Error estimate: |fine - coarse| for tensor rules, standard error of the
/// batch means for the randomized rule.
Estimate integrate_sphere(const Integrand& f, int n, double radius, const QuadratureScheme& scheme);

/// Integral over a < |x| < b. Radial panels break at every radius in `kinks`.
/// Parallel over radial nodes; the reduction order does not depend on the
/// worker count.
Estimate integrate_annulus(const Integrand& f, int n, double a, double b, const QuadratureScheme& scheme,
                           const std::vector<double>& kinks = {});

/// One-dimensional Gauss-Legendre integral of a smooth function on [a, b],
/// split at the given breakpoints.
double integrate_interval(const std::function<double(double)>& f, double a, double b, int order,
                          const std::vector<double>& breaks = {});

enum class CutoffKind { ramp, smooth_ramp, wide_ramp, custom };

/// Radial cutoffs chi_alpha(x) = 1 - S(t), t = (|x| - alpha) / ((lambda - 1) alpha),
/// equal to 1 for |x| <= alpha and 0 for |x| >= lambda alpha.
class CutoffFamily {
 public:
  using Shape = std::function<double(double)>;

  static CutoffFamily ramp();
  static CutoffFamily smooth_ramp();
  static CutoffFamily wide_ramp(double lambda);
  /// `shape` must increase from S(0) = 0 to S(1) = 1; `shape_d1` is its derivative.
  static CutoffFamily custom(std::string name, double lambda, Shape shape, Shape shape_d1);
  /// "ramp", "smooth_ramp", "wide_ramp" (lambda 3) or "wide_ramp:<lambda>".
  static CutoffFamily parse(const std::string& spec);

  CutoffKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double lambda() const { return lambda_; }

  double value(double alpha, double r) const;
  /// d chi / dr; the gradient is this times x / |x|.
  double radial_derivative(double alpha, double r) const;
  Point gradient(double alpha, const Point& x) const;
  /// Annulus carrying the gradient.
  std::pair<double, double> support(double alpha) const { return {alpha, lambda_ * alpha}; }
  /// sup over alpha and x of |chi| + r |D chi|.
  double uniform_bound() const { return uniform_bound_; }

 private:
  CutoffFamily(CutoffKind kind, std::string name, double lambda, Shape shape, Shape shape_d1);

  CutoffKind kind_;
  std::string name_;
  double lambda_;
  Shape shape_, shape_d1_;
  double uniform_bound_;
};

/// A radial test function phi(|x|) with gradient supported in [a, b].
struct RadialTestFunction {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  double a = 0.0;
  double b = 0.0;
  std::string name;
};

/// 0 for r <= a, 1 for r >= b, linear in between (Lipschitz).
RadialTestFunction plateau_linear(double a, double b);
/// 0 for r <= a, 1 for r >= b, C^2 quintic smoothstep in between.
RadialTestFunction plateau_smooth(double a, double b);
/// (4 s (1 - s))^3 on [a, b] with s = (r - a)/(b - a), zero elsewhere. C^2.
RadialTestFunction bump(double a, double b);

struct LimitFit {
  std::vector<double> scales;
  std::vector<double> values;
  std::vector<double> noise;
  double limit = 0.0;
  double c = 0.0;
  double q = 0.0;
  double limit_stderr = 0.0;
  std::string model;  // "constant", "power_fit" or "richardson"
  bool converged = true;
  std::vector<std::string> flags;
};

/// Fits values(s) = L + c s^{-q} with q in [0.05, 6]. Falls back to two-point
/// Richardson with q = fallback_q when the fit is ill-conditioned. A tail that
/// keeps changing direction by more than the noise sets converged = false.
LimitFit extrapolate_limit(const std::vector<double>& scales, const std::vector<double>& values,
                           const std::vector<double>& noise = {}, double fallback_q = 1.0);

/// "8:256:x2" (geometric), "8:64:+8" (arithmetic) or "8,16,32".
std::vector<double> parse_schedule(const std::string& spec);

}  // namespace admmass
