#pragma once

#include "admmass/mass.hpp"
#include "admmass/metric.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace admmass {

enum class DiffeoKind { isometry, almost_identity, custom };

/// A diffeomorphism F of exterior regions, y = F(x).
///
/// `jacobian(x)(i, k)` is dF^i/dx^k and `hessian(x)[i](k, l)` is
/// d^2 F^i / dx^k dx^l. `inverse` maps y back to x.
struct DiffeoSpec {
  DiffeoKind kind = DiffeoKind::custom;
  int dim = 3;
  Matrix q;             // isometry: orthogonal part
  Point b;              // isometry: translation
  double c = 0.0;       // almost identity: amplitude
  double tau_prime = 0.0;
  double domain_radius = 1.0;  // F is defined on |x| >= domain_radius
  std::function<Point(const Point&)> forward;
  std::function<Point(const Point&)> inverse;
  std::function<Matrix(const Point&)> jacobian;
  std::function<std::array<Matrix, kMaxDim>(const Point&)> hessian;
  /// Radius beyond which the image of {|x| >= r} contains every point.
  std::function<double(double)> image_radius;
  /// Radial maps send spheres about the origin to spheres; this gives the
  /// image radius of a sphere, or is empty when F does not preserve them.
  std::function<double(double)> radial_image;
  std::string name;
};

/// y = Q x + b. Q must be orthogonal to 1e-12.
DiffeoSpec make_isometry(const Matrix& q, const Point& b);
/// Rotation drawn from a QR factorisation of a Gaussian matrix, with a
/// translation of length at most `max_shift`. Deterministic in `seed`.
DiffeoSpec random_isometry(int n, std::uint64_t seed, double max_shift);
/// F(x) = s(|x|) x / |x| with s(r) = r + c r^{1 - tau_prime}, on |x| >= domain_radius.
/// Requires tau_prime > (n - 2) / 2 and s' > 0 on the domain.
DiffeoSpec make_almost_identity(int n, double c, double tau_prime, double domain_radius = 1.0);
/// The inverse map, with derivatives from the inverse function theorem.
DiffeoSpec invert(const DiffeoSpec& f);

/// Frobenius norm of dF - I sampled on spheres, and the fitted exponent
/// sigma of |dF - I| ~ C r^{-sigma}.
struct JacobianDecay {
  std::vector<double> radii;
  std::vector<double> deviations;
  double fitted_rate = 0.0;
};
JacobianDecay jacobian_decay(const DiffeoSpec& f, const std::vector<double>& radii, const QuadratureScheme& scheme = {});

/// (F_* g)_kl(y) = g_ij(x) dx^i/dy^k dx^j/dy^l at x = F^{-1}(y). First
/// derivatives by the chain rule, second derivatives by central differences
/// of the first.
MetricPtr pushforward_metric(MetricPtr metric, const DiffeoSpec& f);

struct InvarianceResult {
  MassMethod method = MassMethod::weak;
  MassReport before;
  MassReport after;
  std::vector<double> deltas;  // after - before, per scale
  LimitFit delta_limit;        // extrapolated delta
};

/// Masses of g and F_* g on a shared schedule, for each method.
std::vector<InvarianceResult> invariance_experiment(MetricPtr metric, const DiffeoSpec& f,
                                                    const std::vector<MassMethod>& methods,
                                                    const std::vector<double>& scales, const CutoffFamily& family,
                                                    const QuadratureScheme& scheme = {});

}  // namespace admmass
