#pragma once

#include "admmass/curvature.hpp"
#include "admmass/metric.hpp"
#include "admmass/quadrature.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace admmass {

struct ValidationOptions {
  int samples = 1000;
  double r_in = 0.0;   // 0: twice the metric's inner radius
  double r_out = 64.0;
  std::uint64_t seed = 1;
  double tol_df_identity = 1e-10;
  double tol_decomposition = 1e-8;
  double tol_bianchi = 1e-6;
  double tol_killing = 1e-6;
  double tol_symmetry = 1e-12;
  double tol_scalar_flat = 1e-9;  // only for metrics declared scalar-flat
  bool scalar_flat = false;
  /// Names of deliberate corruptions. "scalar_decomposition" flips the sign
  /// of Q^S before the decomposition residual is taken.
  std::vector<std::string> inject_faults;
};

struct ResidualRow {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::size_t points = 0;
  bool enforced = true;  // advisory rows never fail the run
  bool passed = true;
  std::string note;
};

struct ValidationReport {
  std::string metric_id;
  std::vector<ResidualRow> rows;
  bool passed = true;
  std::vector<std::string> offenders;
};

/// Log-uniform radii in [r_in, r_out] with uniform directions.
std::vector<Point> sample_points(int n, double r_in, double r_out, int count, std::uint64_t seed);

/// Residual table for one metric:
///   df_identity        max |df - D(g^{-1})| with D(g^{-1}) from five-point differences
///   product_rule       max |D(g g^{-1})| assembled from (de, df)
///   f_bound            max |f| / (C |e|), C the declared comparability
///   gamma_bound        max |Gamma| / (3/2 C |De|)
///   symmetry           max asymmetry of e, f, Ric, G
///   scalar_decomposition  max |Scal - div V - Q^S|
///   scalar_flat        max |Scal| (only when options.scalar_flat)
///   bianchi            max |div_g G|
///   conformal_killing  |lhs - rhs| of the integrated Killing identity
///   sqrt_det_lipschitz max |sqrt det g1 - sqrt det g2| / (K |g1 - g2|)
/// Identity rows are enforced on analytic and C^2 metrics and advisory
/// otherwise.
ValidationReport validate_metric(MetricPtr metric, const ValidationOptions& options,
                                 const QuadratureScheme& scheme = {});

/// K = sqrt(n) C^{n/2 + 1} / 2 for metrics with C^{-1} delta <= g <= C delta.
double sqrt_det_lipschitz_constant(int n, double comparability);

std::string residual_table_csv(const ValidationReport& report);

}  // namespace admmass
