#include "ctxrr/numeric/tensor.hpp"

#include <cmath>

namespace ctxrr {

std::vector<Matrix> zeros_like(const std::vector<Matrix>& like) {
  std::vector<Matrix> out;
  out.reserve(like.size());
  for (const auto& m : like) out.emplace_back(m.rows(), m.cols());
  return out;
}

void zero_all(std::vector<Matrix>& ms) {
  for (auto& m : ms) m.fill(0.0);
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void matvec_add(const Matrix& m, std::span<const double> x, std::span<double> y) {
  assert(m.cols() == x.size() && m.rows() == y.size());
  const double* p = m.data().data();
  const std::size_t cols = m.cols();
  for (std::size_t r = 0; r < m.rows(); ++r, p += cols) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += p[c] * x[c];
    y[r] += s;
  }
}

void matvec_t_add(const Matrix& m, std::span<const double> x, std::span<double> y) {
  assert(m.rows() == x.size() && m.cols() == y.size());
  const double* p = m.data().data();
  const std::size_t cols = m.cols();
  for (std::size_t r = 0; r < m.rows(); ++r, p += cols) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) y[c] += p[c] * xr;
  }
}

void outer_add(Matrix& m, double alpha, std::span<const double> a, std::span<const double> b) {
  assert(m.rows() == a.size() && m.cols() == b.size());
  double* p = m.data().data();
  const std::size_t cols = m.cols();
  for (std::size_t r = 0; r < m.rows(); ++r, p += cols) {
    const double ar = alpha * a[r];
    if (ar == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) p[c] += ar * b[c];
  }
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace ctxrr
