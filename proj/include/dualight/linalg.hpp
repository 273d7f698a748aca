#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace dualight {

using Vec = std::vector<double>;

/// Dense row-major matrix. All network math uses the row-vector
/// convention: y = x * M maps R^rows -> R^cols.
struct Mat {
  int rows = 0;
  int cols = 0;
  Vec a;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

  double* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const { return a.data() + static_cast<size_t>(r) * cols; }

  Vec row_vec(int r) const { return Vec(row(r), row(r) + cols); }

  void fill(double v) { a.assign(a.size(), v); }

  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

inline double dot(const Vec& x, const Vec& y) {
  assert(x.size() == y.size());
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

/// y = x * M  (x in R^rows, y in R^cols)
inline Vec mul(const Vec& x, const Mat& m) {
  assert(static_cast<int>(x.size()) == m.rows);
  Vec y(m.cols, 0.0);
  for (int r = 0; r < m.rows; ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    const double* mr = m.row(r);
    for (int c = 0; c < m.cols; ++c) y[c] += xr * mr[c];
  }
  return y;
}

/// x = M * y  (y in R^cols, x in R^rows); the adjoint of mul().
inline Vec mul_t(const Mat& m, const Vec& y) {
  assert(static_cast<int>(y.size()) == m.cols);
  Vec x(m.rows, 0.0);
  for (int r = 0; r < m.rows; ++r) {
    const double* mr = m.row(r);
    double s = 0.0;
    for (int c = 0; c < m.cols; ++c) s += mr[c] * y[c];
    x[r] = s;
  }
  return x;
}

/// M += scale * outer(x, y), i.e. M(r,c) += scale * x[r] * y[c].
inline void add_outer(Mat& m, const Vec& x, const Vec& y, double scale = 1.0) {
  assert(static_cast<int>(x.size()) == m.rows);
  assert(static_cast<int>(y.size()) == m.cols);
  for (int r = 0; r < m.rows; ++r) {
    const double s = scale * x[r];
    if (s == 0.0) continue;
    double* mr = m.row(r);
    for (int c = 0; c < m.cols; ++c) mr[c] += s * y[c];
  }
}

/// y += scale * x
inline void axpy(Vec& y, const Vec& x, double scale = 1.0) {
  assert(x.size() == y.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] += scale * x[i];
}

inline Vec relu(const Vec& x) {
  Vec y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  return y;
}

/// Subgradient convention: d relu(x)/dx = 0 at x == 0.
inline Vec relu_grad_mask(const Vec& pre, const Vec& upstream) {
  assert(pre.size() == upstream.size());
  Vec y(pre.size());
  for (size_t i = 0; i < pre.size(); ++i) y[i] = pre[i] > 0.0 ? upstream[i] : 0.0;
  return y;
}

inline Vec hadamard(const Vec& x, const Vec& y) {
  assert(x.size() == y.size());
  Vec z(x.size());
  for (size_t i = 0; i < x.size(); ++i) z[i] = x[i] * y[i];
  return z;
}

inline Vec scaled(const Vec& x, double s) {
  Vec y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = s * x[i];
  return y;
}

}  // namespace dualight
