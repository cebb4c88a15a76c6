#pragma once

#include "admmass/curvature.hpp"
#include "admmass/metric.hpp"
#include "admmass/quadrature.hpp"

#include <string>
#include <vector>

namespace admmass {

enum class MassMethod { adm_surface, weak, ricci_surface, ricci_weak, plateau_identity };

const char* to_string(MassMethod method);
/// Accepts the to_string names plus the short forms adm, ricci, ricci_weak.
MassMethod parse_method(const std::string& name);

/// 1 / (2 (n-1) omega_{n-1}) for the flux masses, -1 / ((n-1)(n-2) omega_{n-1})
/// for the Einstein-tensor masses.
double mass_normalization(MassMethod method, int n);

struct MassReport {
  MassMethod method = MassMethod::adm_surface;
  int dim = 0;
  std::string metric_id;
  std::string cutoff;  // family name for bulk methods
  double normalization = 0.0;
  std::vector<double> scales;
  std::vector<double> values;  // normalized, one per scale
  std::vector<double> quad_errors;
  LimitFit limit;
  std::vector<std::string> flags;
};

/// Classical flux mass on the spheres |x| = R for each R in `radii`.
MassReport adm_mass(const MetricField& metric, const std::vector<double>& radii, const QuadratureScheme& scheme);

/// Bulk mass against -D chi_alpha for each alpha.
MassReport weak_mass(const MetricField& metric, const CutoffFamily& family, const std::vector<double>& alphas,
                     const QuadratureScheme& scheme);

/// Einstein-tensor flux with X = x^i d_i, G(X, nu) = r G(x/r, x/r).
MassReport ricci_mass_surface(const MetricField& metric, const std::vector<double>& radii,
                              const QuadratureScheme& scheme);

MassReport ricci_weak_mass(const MetricField& metric, const CutoffFamily& family, const std::vector<double>& alphas,
                           const QuadratureScheme& scheme);

/// Runs one method on a schedule. Surface methods read the scales as radii,
/// bulk methods as cutoff parameters. The identity method uses a smooth plateau
/// on [s_0 / 4, s_0 / 2] and the scales as truncation radii.
MassReport compute_mass(MassMethod method, const MetricField& metric, const CutoffFamily& family,
                        const std::vector<double>& scales, const QuadratureScheme& scheme);

struct PairingResult {
  double pairing = 0.0;         // int V (-D phi) + phi Q^S
  double smooth_integral = 0.0;  // int phi Scal (pointwise), plus kink flux terms if any
  double quad_error = 0.0;
  bool kinks_in_support = false;
};

/// Distributional scalar curvature tested against a compactly supported
/// radial phi, together with the pointwise integral it must agree with for
/// regular metrics. Kink spheres contribute phi(r_k) int_{S_k} [V . nu] to
/// the pointwise side.
PairingResult distributional_scalar(const MetricField& metric, const RadialTestFunction& phi,
                                    const QuadratureScheme& scheme);

/// For a plateau phi (0 inside phi.a, 1 outside phi.b) and truncation radii
/// R_j > phi.b, the per-scale values
///   [ <Scal, phi>_{R_j} - int_{r<R_j} phi Q^S - int V (-D phi) ] / (2 (n-1) omega)
/// with <Scal, phi>_{R} the pointwise integral of phi Scal over r < R plus
/// kink flux terms. Their limit is the weak mass.
MassReport plateau_identity(const MetricField& metric, const RadialTestFunction& phi,
                          const std::vector<double>& truncations, const QuadratureScheme& scheme);

struct KillingResidual {
  double lhs = 0.0;
  double rhs = 0.0;
  /// Right side with delta_jl + Gamma^u_jl g_uv X^v in place of the
  /// symmetrized g-covariant derivative of X. Reported, not checked.
  double rhs_printed_form = 0.0;
  double residual = 0.0;
  double quad_error = 0.0;
  bool kinks_in_support = false;
};

/// Both sides of int G(X, grad phi) dmu_g = -int phi g^{ij} g^{kl} G_ik S_jl dmu_g for a
/// radial bump phi and X = x^i d_i, where S_jl = (nabla_j X_l + nabla_l X_j) / 2
/// = g_jl + x^u D_u g_jl / 2 is the symmetrized g-covariant derivative.
KillingResidual conformal_killing_residual(const MetricField& metric, const RadialTestFunction& phi,
                                           const QuadratureScheme& scheme, int panels = 4);

struct DecayReport {
  std::vector<double> scales;
  std::vector<double> values;
  double slope = 0.0;  // least-squares slope of log|value| against log scale
  bool decaying = false;
};

/// The part of the g-contracted bulk integrand that the flat contraction
/// drops, (g^{ij} g^{kl} - d^{ij} d^{kl} + d^{ik} d^{jl} - g^{ik} g^{jl}) D_k e_jl (-D_i chi_alpha),
/// integrated per alpha and normalized like the weak mass.
DecayReport correction_decay(const MetricField& metric, const CutoffFamily& family,
                             const std::vector<double>& alphas, const QuadratureScheme& scheme);

/// Least-squares slope of log|v| against log s over entries with v != 0.
double log_log_slope(const std::vector<double>& s, const std::vector<double>& v);

}  // namespace admmass
