#pragma once

#include <cstddef>
#include <vector>

#include "pngsfp/errors.hpp"

namespace pngsfp {

// Dense row-major payoff matrix. Row index = own strategy, column index =
// opponent strategy, matching r_i = x_i^T A_ij x_j.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows = static_cast<int>(init.size());
    cols = rows > 0 ? static_cast<int>(init.begin()->size()) : 0;
    a.reserve(static_cast<size_t>(rows) * cols);
    for (const auto& row : init) {
      if (static_cast<int>(row.size()) != cols) throw ConfigError("ragged matrix literal");
      a.insert(a.end(), row.begin(), row.end());
    }
  }

  double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

  Matrix transposed() const {
    Matrix t(cols, rows);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend bool operator==(const Matrix& x, const Matrix& y) {
    return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
  }
};

// y += A x
inline void matvec_acc(const Matrix& m, const double* x, double* y) {
  const double* row = m.a.data();
  for (int r = 0; r < m.rows; ++r, row += m.cols) {
    double s = 0.0;
    for (int c = 0; c < m.cols; ++c) s += row[c] * x[c];
    y[r] += s;
  }
}

}  // namespace pngsfp
