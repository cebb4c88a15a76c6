#pragma once

#include "admmass/metric.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace admmass {

struct LatticeSpec {
  double spacing = 0.1;
  double r_in = 1.0;
  double r_out = 2.0;
};

/// Metric samples on the points of the Cartesian lattice spacing * Z^n that
/// cover the annulus r_in <= |x| <= r_out, including a margin wide enough for
/// the interpolation and finite-difference stencils of `lift_grid`.
///
/// Text format: a header line `n spacing R_in R_out count`, then one record per
/// lattice point `x_1 ... x_n g_11 g_12 ... g_nn` (upper triangle, row-major),
/// whitespace separated, written with 17 significant digits.
class GridMetric {
 public:
  using Index = std::array<int, kMaxDim>;

  GridMetric(int dim, double spacing, double r_in, double r_out);

  int dim() const { return dim_; }
  double spacing() const { return spacing_; }
  double r_in() const { return r_in_; }
  double r_out() const { return r_out_; }
  std::size_t count() const { return points_.size(); }
  const std::string& source_id() const { return source_id_; }
  void set_source_id(std::string id) { source_id_ = std::move(id); }

  /// Distance beyond the annulus that the lattice must cover.
  double stencil_margin() const;

  void insert(const Index& index, const Matrix& g);
  /// nullptr when the lattice point was not sampled.
  const double* find(const Index& index) const;
  Matrix sample(std::size_t i) const;
  Point position(std::size_t i) const;

  void write(std::ostream& os) const;
  static GridMetric read(std::istream& is);
  void save(const std::string& path) const;
  static GridMetric load(const std::string& path);

 private:
  struct IndexHash {
    std::size_t operator()(const Index& idx) const noexcept;
  };

  int dim_;
  double spacing_;
  double r_in_;
  double r_out_;
  std::string source_id_;
  std::vector<Index> points_;
  std::vector<double> values_;  // upper triangles, n(n+1)/2 per point
  std::unordered_map<Index, std::size_t, IndexHash> lookup_;
};

GridMetric sample_to_grid(const MetricField& metric, const LatticeSpec& lattice);

/// MetricField backed by grid samples: values by multilinear interpolation,
/// first and second derivatives by central differences at the lattice points,
/// interpolated the same way. Second-order accurate in the spacing.
MetricPtr lift_grid(std::shared_ptr<const GridMetric> grid);

}  // namespace admmass
