#pragma once

#include "admmass/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace admmass {

enum class Regularity { analytic, c2, c1, w12_only, grid };

const char* to_string(Regularity r);

enum class ProfileKind { smooth, kinked, oscillatory };

/// A scalar function of the radius with two derivatives.
///
/// For kinked profiles `d1` and `d2` return the outer (r+) one-sided values on
/// a kink sphere, and `kinks(a, b)` lists the kink radii inside [a, b] in
/// increasing order. `inner_d1` gives the r- one-sided derivative, which only
/// differs from `d1` on a kink.
struct RadialProfile {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  std::function<double(double)> inner_d1;
  std::function<std::vector<double>(double, double)> kinks;
  ProfileKind kind = ProfileKind::smooth;
  double decay_rate = kInfinity;  // |a(r)| <= C r^{-decay_rate}
  std::string name;
};

RadialProfile zero_profile();
/// coefficient * r^{-power}
RadialProfile power_profile(double coefficient, double power);
/// coefficient * r^{-power} * (1 + amplitude * cos(frequency * ln r))
RadialProfile log_oscillating_profile(double coefficient, double power, double amplitude,
                                      double frequency);
/// mean / r + jump * w(r) / r^2, with w a triangle wave of slope +-1 and
/// period 2 * width (kinks at integer multiples of width). The wave is only
/// switched on for window_begin <= r <= window_end; both ends must be
/// multiples of 2 * width so that the profile stays Lipschitz continuous.
///
/// The classical surface integrand -a'(r) r^2 / 2 (n = 3) alternates between
/// (mean - jump) / 2 and (mean + jump) / 2 on adjacent shells, while its shell
/// average tends to mean / 2.
RadialProfile kinked_profile(double mean, double jump, double width, double window_begin = 0.0,
                             double window_end = kInfinity);

struct MetricInfo {
  int dim = 3;
  double inner_radius = 1.0;
  double outer_radius = kInfinity;
  Regularity regularity = Regularity::analytic;
  double falloff_tau = kInfinity;
  double comparability = 1.0;
  std::string id;
};

/// An asymptotically Euclidean metric on the exterior region {|x| >= R} of a
/// chart at infinity. Implementations are immutable after construction and
/// safe to evaluate concurrently.
class MetricField {
 public:
  explicit MetricField(MetricInfo info) : info_(std::move(info)) {}
  virtual ~MetricField() = default;

  int dim() const { return info_.dim; }
  double inner_radius() const { return info_.inner_radius; }
  double outer_radius() const { return info_.outer_radius; }
  Regularity regularity() const { return info_.regularity; }
  double falloff_tau() const { return info_.falloff_tau; }
  double comparability() const { return info_.comparability; }
  const std::string& id() const { return info_.id; }
  const MetricInfo& info() const { return info_; }

  /// Metric and derivatives up to `order` (0, 1 or 2) at x.
  /// Throws Error(domain) outside [inner_radius, outer_radius].
  MetricJet jet(const Point& x, int order) const;

  Matrix eval(const Point& x) const { return jet(x, 0).g; }
  std::array<Matrix, kMaxDim> eval_d1(const Point& x) const { return jet(x, 1).dg; }
  MetricJet eval_d2(const Point& x) const { return jet(x, 2); }

  /// Radii of spheres across which the first derivatives jump.
  virtual std::vector<double> kinks_in(double a, double b) const;

  bool contains(const Point& x) const;

 protected:
  virtual MetricJet compute_jet(const Point& x, int order) const = 0;
  MetricInfo info_;
};

using MetricPtr = std::shared_ptr<const MetricField>;

MetricPtr make_flat(int n);

/// g = (1 + w(r))^{4/(n-2)} delta.
MetricPtr make_conformally_flat(int n, const RadialProfile& w, double inner_radius = 1.0);

/// Isotropic Schwarzschild data, u = 1 + m / (2 r^{n-2}).
MetricPtr make_schwarzschild_isotropic(int n, double m, double inner_radius = 1.0);

/// g = (1 + a(r)) delta, so that e = a delta exactly.
MetricPtr make_radial_perturbation(int n, const RadialProfile& a, double inner_radius = 1.0);

/// Central-difference check of first derivatives against eval, step
/// max(1e-4 r, 1e-4). Returns the largest absolute deviation.
double finite_difference_defect(const MetricField& metric, const Point& x);

/// Smallest and largest eigenvalue of g(x).
std::pair<double, double> eigenvalue_range(const MetricField& metric, const Point& x);

}  // namespace admmass
