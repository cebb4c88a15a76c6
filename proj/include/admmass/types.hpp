#pragma once

#include <Eigen/Dense>

#include <array>
#include <limits>
#include <stdexcept>
#include <string>

namespace admmass {

/// Largest spatial dimension supported by the fixed-capacity tensor storage.
inline constexpr int kMaxDim = 7;

using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class ErrorKind {
  invalid_argument,  // malformed input, violated precondition
  domain,            // query outside the region a field is defined on
  numerical,         // singular matrix, failed iteration, non-finite value
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

/// Metric components and up to two orders of spatial derivatives at one point.
///
/// `dg[k](i, j)` is the partial derivative of g_ij along x^k and
/// `ddg[k * n + l](i, j)` the mixed second derivative along x^k, x^l.
/// Entries beyond `order` are left uninitialised.
struct MetricJet {
  int n = 0;
  int order = 0;
  Matrix g;
  std::array<Matrix, kMaxDim> dg;
  std::array<Matrix, kMaxDim * kMaxDim> ddg;

  const Matrix& d2(int k, int l) const { return ddg[k * n + l]; }
  Matrix& d2(int k, int l) { return ddg[k * n + l]; }

  static MetricJet zero(int n, int order);
};

inline MetricJet MetricJet::zero(int n, int order) {
  MetricJet jet;
  jet.n = n;
  jet.order = order;
  jet.g = Matrix::Zero(n, n);
  if (order >= 1)
    for (int k = 0; k < n; ++k) jet.dg[k] = Matrix::Zero(n, n);
  if (order >= 2)
    for (int k = 0; k < n * n; ++k) jet.ddg[k] = Matrix::Zero(n, n);
  return jet;
}

/// Frobenius norm over all entries, the flat-metric tensor norm |T|_delta.
inline double frobenius(const Matrix& m) { return m.norm(); }

}  // namespace admmass
