#pragma once

#include <cstddef>
#include <vector>

namespace stent {

using Vec = std::vector<double>;

// Minimal row-major dense matrix; all models here are small enough that
// plain loops beat pulling in a linear algebra dependency.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

inline Vec matvec(const Mat& m, const Vec& x) {
  Vec y(static_cast<std::size_t>(m.rows), 0.0);
  for (int r = 0; r < m.rows; ++r) {
    double acc = 0.0;
    const double* row = &m.a[static_cast<std::size_t>(r) * m.cols];
    for (int c = 0; c < m.cols; ++c) acc += row[c] * x[static_cast<std::size_t>(c)];
    y[static_cast<std::size_t>(r)] = acc;
  }
  return y;
}

// y = m * x + b
inline Vec affine(const Mat& m, const Vec& x, const Vec& b) {
  Vec y = matvec(m, x);
  for (int r = 0; r < m.rows; ++r) y[static_cast<std::size_t>(r)] += b[static_cast<std::size_t>(r)];
  return y;
}

// m += u * v^T
inline void add_outer(Mat& m, const Vec& u, const Vec& v) {
  for (int r = 0; r < m.rows; ++r) {
    double* row = &m.a[static_cast<std::size_t>(r) * m.cols];
    const double ur = u[static_cast<std::size_t>(r)];
    if (ur == 0.0) continue;
    for (int c = 0; c < m.cols; ++c) row[c] += ur * v[static_cast<std::size_t>(c)];
  }
}

// y += m^T * x
inline void add_matvec_transposed(const Mat& m, const Vec& x, Vec& y) {
  for (int r = 0; r < m.rows; ++r) {
    const double xr = x[static_cast<std::size_t>(r)];
    if (xr == 0.0) continue;
    const double* row = &m.a[static_cast<std::size_t>(r) * m.cols];
    for (int c = 0; c < m.cols; ++c) y[static_cast<std::size_t>(c)] += xr * row[c];
  }
}

inline void add_scaled(Vec& y, const Vec& x, double s) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += s * x[i];
}

}  // namespace stent
