#include "admmass/validation.hpp"

#include "admmass/mass.hpp"
#include "admmass/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace admmass {

std::vector<Point> sample_points(int n, double r_in, double r_out, int count, std::uint64_t seed) {
  if (!(r_out > r_in) || !(r_in > 0.0)) fail(ErrorKind::invalid_argument, "sample shell needs 0 < r_in < r_out");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit;
  std::vector<Point> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    Point dir(n);
    for (int i = 0; i < n; ++i) dir[i] = gauss(rng);
    const double norm = dir.norm();
    if (!(norm > 1e-12)) continue;
    const double r = r_in * std::pow(r_out / r_in, unit(rng));
    out.push_back((r / norm) * dir);
  }
  return out;
}

double sqrt_det_lipschitz_constant(int n, double comparability) {
  return 0.5 * std::sqrt(static_cast<double>(n)) * std::pow(comparability, 0.5 * n + 1.0);
}

namespace {

bool wants(const ValidationOptions& o, const std::string& name) {
  return std::find(o.inject_faults.begin(), o.inject_faults.end(), name) != o.inject_faults.end();
}

double asymmetry(const Matrix& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

struct PointResiduals {
  double df_identity = 0.0;
  bool df_skipped = false;
  double product_rule = 0.0;
  double f_ratio = 0.0;
  double gamma_ratio = 0.0;
  double symmetry = 0.0;
  double decomposition = 0.0;
  double scal = 0.0;
};

}  // namespace

ValidationReport validate_metric(MetricPtr metric, const ValidationOptions& options, const QuadratureScheme& scheme) {
  const MetricField& g = *metric;
  const int n = g.dim();
  const double r_in = options.r_in > 0.0 ? options.r_in : 2.0 * g.inner_radius();
  const double r_out = std::min(options.r_out, g.outer_radius());
  if (!(r_in >= g.inner_radius()) || !(r_out > r_in)) fail(ErrorKind::invalid_argument, "validation shell outside the metric domain");
  if (options.samples < 1) fail(ErrorKind::invalid_argument, "validation needs at least one sample point");
  for (const auto& f : options.inject_faults)
    if (f != "scalar_decomposition") fail(ErrorKind::invalid_argument, "unknown fault '" + f + "'");

  const std::vector<Point> pts = sample_points(n, r_in, r_out, options.samples, options.seed);
  const double C = g.comparability();
  CurvatureOptions copt;
  if (wants(options, "scalar_decomposition")) copt.q_scalar_sign = -1.0;

  std::vector<PointResiduals> res(pts.size());
  parallel_for(pts.size(), [&](std::size_t idx) {
    const Point& x = pts[idx];
    PointResiduals& out = res[idx];
    const double r = x.norm();
    const ErrorTensors et = error_tensors(g, x);
    out.product_rule = et.product_rule_residual;

    // Five-point differences of g^{-1} against df.
    const double h = 1e-3 * r;
    if (g.kinks_in(r - 3.0 * h, r + 3.0 * h).empty()) {
      for (int k = 0; k < n; ++k) {
        auto ginv = [&](double t) {
          Point y = x;
          y[k] += t;
          return Matrix(g.eval(y).inverse());
        };
        const Matrix fd = (ginv(-2.0 * h) - 8.0 * ginv(-h) + 8.0 * ginv(h) - ginv(2.0 * h)) / (12.0 * h);
        out.df_identity = std::max(out.df_identity, (fd - et.df[k]).cwiseAbs().maxCoeff());
      }
    } else {
      out.df_skipped = true;
    }

    const double e_norm = et.e.norm();
    if (e_norm > 0.0) out.f_ratio = et.f.norm() / (C * e_norm);
    double de_norm2 = 0.0;
    for (int k = 0; k < n; ++k) de_norm2 += et.de[k].squaredNorm();
    const Christoffel gamma = difference_tensor(g, x);
    if (de_norm2 > 0.0) out.gamma_ratio = norm3(gamma, n) / (1.5 * C * std::sqrt(de_norm2));

    const CurvaturePointData c = curvature_point(g, x, Side::outer, copt);
    out.symmetry = std::max({asymmetry(et.e), asymmetry(et.f), asymmetry(c.ric), asymmetry(c.einstein)});
    out.decomposition = c.decomposition_residual;
    out.scal = std::abs(c.scal);
  });

  ValidationReport report;
  report.metric_id = g.id();
  const bool smooth = g.regularity() == Regularity::analytic || g.regularity() == Regularity::c2;
  const std::string rough_note = "advisory: metric is not C2";

  auto add = [&](std::string name, double value, double threshold, std::size_t points, bool enforced,
                 std::string note) {
    ResidualRow row;
    row.name = std::move(name);
    row.value = value;
    row.threshold = threshold;
    row.points = points;
    row.enforced = enforced;
    row.passed = !enforced || value <= threshold;
    row.note = std::move(note);
    if (!row.passed) {
      report.passed = false;
      report.offenders.push_back(row.name);
    }
    report.rows.push_back(std::move(row));
  };
  auto max_of = [&](auto member) {
    double m = 0.0;
    for (const auto& r : res) m = std::max(m, r.*member);
    return m;
  };

  std::size_t df_points = 0;
  for (const auto& r : res) df_points += r.df_skipped ? 0 : 1;
  add("df_identity", max_of(&PointResiduals::df_identity), options.tol_df_identity, df_points,
      smooth, smooth ? "" : rough_note);
  add("product_rule", max_of(&PointResiduals::product_rule), options.tol_df_identity, pts.size(), true, "");
  add("f_bound", max_of(&PointResiduals::f_ratio), 1.0, pts.size(), true, "ratio |f| / (C |e|)");
  add("gamma_bound", max_of(&PointResiduals::gamma_ratio), 1.0, pts.size(), true, "ratio |Gamma| / (1.5 C |De|)");
  add("symmetry", max_of(&PointResiduals::symmetry), options.tol_symmetry, pts.size(), true, "");
  add("scalar_decomposition", max_of(&PointResiduals::decomposition), options.tol_decomposition, pts.size(), smooth,
      smooth ? "" : rough_note);
  if (options.scalar_flat)
    add("scalar_flat", max_of(&PointResiduals::scal), options.tol_scalar_flat, pts.size(), smooth,
        smooth ? "" : rough_note);

  const BianchiResult b = bianchi_residual(g, pts);
  add("bianchi", b.max_residual, options.tol_bianchi, b.points, smooth && !b.near_kink,
      b.near_kink ? "advisory: stencils cross a kink sphere" : (smooth ? "" : rough_note));

  const double a = r_in, bb = std::min(2.0 * r_in, r_out);
  const KillingResidual kr = conformal_killing_residual(g, bump(a, bb), scheme);
  std::ostringstream knote;
  knote.precision(6);
  knote << "lhs " << kr.lhs << ", printed form " << kr.rhs_printed_form;
  if (kr.kinks_in_support) knote << ", advisory: kinks in support";
  add("conformal_killing", kr.residual, options.tol_killing + kr.quad_error, 1, smooth && !kr.kinks_in_support,
      knote.str());

  const double K = sqrt_det_lipschitz_constant(n, C);
  double det_ratio = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Matrix g1 = g.eval(pts[i]), g2 = g.eval(pts[i + 1]);
    const double diff = (g1 - g2).norm();
    if (diff > 1e-14)
      det_ratio = std::max(det_ratio, std::abs(std::sqrt(g1.determinant()) - std::sqrt(g2.determinant())) / (K * diff));
  }
  add("sqrt_det_lipschitz", det_ratio, 1.0, pts.size() > 1 ? pts.size() - 1 : 0, true, "ratio to K |g1 - g2|");
  return report;
}

std::string residual_table_csv(const ValidationReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "metric,name,value,threshold,points,enforced,passed,note\n";
  for (const auto& r : report.rows)
    os << '"' << report.metric_id << "\"," << r.name << ',' << r.value << ',' << r.threshold << ',' << r.points << ','
       << (r.enforced ? 1 : 0) << ',' << (r.passed ? 1 : 0) << ",\"" << r.note << "\"\n";
  return os.str();
}

}  // namespace admmass
