#include "admmass/grid.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace admmass {

namespace {

constexpr std::size_t kMaxGridPoints = 20'000'000;

int triangle_size(int n) { return n * (n + 1) / 2; }

}  // namespace

GridMetric::GridMetric(int dim, double spacing, double r_in, double r_out)
    : dim_(dim), spacing_(spacing), r_in_(r_in), r_out_(r_out) {
  if (dim < 3 || dim > kMaxDim) fail(ErrorKind::invalid_argument, "grid dimension out of range");
  if (!(spacing > 0.0)) fail(ErrorKind::invalid_argument, "grid spacing must be positive");
  if (!(r_out > r_in) || !(r_in > 0.0)) fail(ErrorKind::invalid_argument, "grid annulus must satisfy 0 < R_in < R_out");
}

double GridMetric::stencil_margin() const {
  return spacing_ * (std::sqrt(static_cast<double>(dim_)) + std::sqrt(2.0)) * (1.0 + 1e-9);
}

std::size_t GridMetric::IndexHash::operator()(const Index& idx) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (int v : idx) {
    h ^= static_cast<std::size_t>(static_cast<unsigned>(v));
    h *= 1099511628211ull;
  }
  return h;
}

void GridMetric::insert(const Index& index, const Matrix& g) {
  if (g.rows() != dim_ || g.cols() != dim_) fail(ErrorKind::invalid_argument, "grid sample has wrong shape");
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.cwiseAbs().maxCoeff()))
    fail(ErrorKind::invalid_argument, "grid sample is not symmetric");
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) fail(ErrorKind::invalid_argument, "grid sample is not positive definite");
  if (lookup_.count(index)) fail(ErrorKind::invalid_argument, "duplicate grid point");
  lookup_.emplace(index, points_.size());
  points_.push_back(index);
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) values_.push_back(g(i, j));
}

const double* GridMetric::find(const Index& index) const {
  auto it = lookup_.find(index);
  if (it == lookup_.end()) return nullptr;
  return values_.data() + it->second * triangle_size(dim_);
}

Matrix GridMetric::sample(std::size_t i) const {
  Matrix g(dim_, dim_);
  const double* v = values_.data() + i * triangle_size(dim_);
  for (int a = 0; a < dim_; ++a)
    for (int b = a; b < dim_; ++b) g(a, b) = g(b, a) = *v++;
  return g;
}

Point GridMetric::position(std::size_t i) const {
  Point x(dim_);
  for (int a = 0; a < dim_; ++a) x[a] = spacing_ * points_[i][a];
  return x;
}

void GridMetric::write(std::ostream& os) const {
  os << std::setprecision(17) << std::scientific;
  os << dim_ << ' ' << spacing_ << ' ' << r_in_ << ' ' << r_out_ << ' ' << points_.size() << '\n';
  const int tri = triangle_size(dim_);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    for (int a = 0; a < dim_; ++a) os << spacing_ * points_[i][a] << ' ';
    for (int t = 0; t < tri; ++t) os << values_[i * tri + t] << (t + 1 < tri ? ' ' : '\n');
  }
}

GridMetric GridMetric::read(std::istream& is) {
  int n = 0;
  double spacing = 0, r_in = 0, r_out = 0;
  std::size_t count = 0;
  if (!(is >> n >> spacing >> r_in >> r_out >> count)) fail(ErrorKind::io, "malformed grid header");
  GridMetric grid(n, spacing, r_in, r_out);
  Point x(n);
  Matrix g(n, n);
  for (std::size_t i = 0; i < count; ++i) {
    Index idx{};
    for (int a = 0; a < n; ++a) {
      if (!(is >> x[a])) fail(ErrorKind::io, "truncated grid record " + std::to_string(i));
      const double k = x[a] / spacing;
      idx[a] = static_cast<int>(std::lround(k));
      if (std::abs(k - idx[a]) > 1e-6) fail(ErrorKind::io, "grid point off the lattice in record " + std::to_string(i));
    }
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        if (!(is >> g(a, b))) fail(ErrorKind::io, "truncated grid record " + std::to_string(i));
        g(b, a) = g(a, b);
      }
    grid.insert(idx, g);
  }
  return grid;
}

void GridMetric::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::io, "cannot open " + path + " for writing");
  write(os);
  if (!os) fail(ErrorKind::io, "write failed for " + path);
}

GridMetric GridMetric::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::io, "cannot open grid file " + path);
  return read(is);
}

GridMetric sample_to_grid(const MetricField& metric, const LatticeSpec& lattice) {
  const int n = metric.dim();
  GridMetric grid(n, lattice.spacing, lattice.r_in, lattice.r_out);
  grid.set_source_id(metric.id());
  const double h = lattice.spacing;
  const double lo = lattice.r_in - grid.stencil_margin();
  const double hi = lattice.r_out + grid.stencil_margin();
  if (lo < metric.inner_radius() * (1.0 - 1e-12))
    fail(ErrorKind::invalid_argument, "lattice stencil reaches inside the metric's inner radius");
  const int m = static_cast<int>(std::ceil(hi / h));
  const double box = std::pow(2.0 * m + 1.0, n);
  // Rough annulus volume fraction estimate guards against runaway memory.
  if (box > 50.0 * kMaxGridPoints) fail(ErrorKind::invalid_argument, "lattice too fine for the requested annulus");

  GridMetric::Index idx{};
  for (int a = 0; a < n; ++a) idx[a] = -m;
  Point x(n);
  while (true) {
    double r2 = 0.0;
    for (int a = 0; a < n; ++a) {
      x[a] = h * idx[a];
      r2 += x[a] * x[a];
    }
    const double r = std::sqrt(r2);
    if (r >= lo && r <= hi) {
      if (grid.count() >= kMaxGridPoints) fail(ErrorKind::invalid_argument, "lattice exceeds the grid point limit");
      grid.insert(idx, metric.eval(x));
    }
    int a = n - 1;
    while (a >= 0 && ++idx[a] > m) idx[a--] = -m;
    if (a < 0) break;
  }
  return grid;
}

namespace {

class LiftedGridMetric final : public MetricField {
 public:
  LiftedGridMetric(MetricInfo info, std::shared_ptr<const GridMetric> grid)
      : MetricField(std::move(info)), grid_(std::move(grid)) {}

 protected:
  MetricJet compute_jet(const Point& x, int order) const override {
    const int n = dim();
    const double h = grid_->spacing();
    GridMetric::Index base{};
    double t[kMaxDim];
    for (int a = 0; a < n; ++a) {
      const double s = x[a] / h;
      base[a] = static_cast<int>(std::floor(s));
      t[a] = s - base[a];
    }
    MetricJet out = MetricJet::zero(n, order);
    for (int corner = 0; corner < (1 << n); ++corner) {
      GridMetric::Index c = base;
      double w = 1.0;
      for (int a = 0; a < n; ++a) {
        const bool up = (corner >> a) & 1;
        c[a] += up ? 1 : 0;
        w *= up ? t[a] : 1.0 - t[a];
      }
      if (w == 0.0) continue;
      accumulate_node(c, w, order, out);
    }
    return out;
  }

 private:
  Matrix at(const GridMetric::Index& idx) const {
    const double* v = grid_->find(idx);
    if (!v) fail(ErrorKind::domain, "query outside the sampled grid annulus");
    const int n = dim();
    Matrix g(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) g(a, b) = g(b, a) = *v++;
    return g;
  }

  Matrix shifted(GridMetric::Index idx, int k, int dk, int l = 0, int dl = 0) const {
    idx[k] += dk;
    idx[l] += dl;
    return at(idx);
  }

  void accumulate_node(const GridMetric::Index& c, double w, int order, MetricJet& out) const {
    const int n = dim();
    const double h = grid_->spacing();
    const Matrix g0 = at(c);
    out.g += w * g0;
    if (order >= 1) {
      for (int k = 0; k < n; ++k)
        out.dg[k] += w * (shifted(c, k, 1) - shifted(c, k, -1)) / (2.0 * h);
    }
    if (order >= 2) {
      for (int k = 0; k < n; ++k) {
        out.d2(k, k) += w * (shifted(c, k, 1) - 2.0 * g0 + shifted(c, k, -1)) / (h * h);
        for (int l = k + 1; l < n; ++l) {
          const Matrix mixed = (shifted(c, k, 1, l, 1) - shifted(c, k, 1, l, -1) -
                                shifted(c, k, -1, l, 1) + shifted(c, k, -1, l, -1)) /
                               (4.0 * h * h);
          out.d2(k, l) += w * mixed;
          out.d2(l, k) += w * mixed;
        }
      }
    }
  }

  std::shared_ptr<const GridMetric> grid_;
};

}  // namespace

MetricPtr lift_grid(std::shared_ptr<const GridMetric> grid) {
  if (!grid || grid->count() == 0) fail(ErrorKind::invalid_argument, "empty grid");
  MetricInfo info;
  info.dim = grid->dim();
  info.inner_radius = grid->r_in();
  info.outer_radius = grid->r_out();
  info.regularity = Regularity::grid;
  info.falloff_tau = kInfinity;
  double c = 1.0;
  for (std::size_t i = 0; i < grid->count(); ++i) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(grid->sample(i), Eigen::EigenvaluesOnly);
    c = std::max({c, es.eigenvalues().maxCoeff(), 1.0 / es.eigenvalues().minCoeff()});
  }
  info.comparability = c;
  info.id = "grid(" + (grid->source_id().empty() ? std::string("file") : grid->source_id()) + ")";
  return std::make_shared<LiftedGridMetric>(std::move(info), std::move(grid));
}

}  // namespace admmass
