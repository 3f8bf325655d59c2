#pragma once

#include <Eigen/Dense>

namespace gsi {

// k x k matrices (covariances, projection matrices, transforms).
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// Sample tables: one observation per row, rows contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Tr(a * b) accumulated row-major over a, so that a = Id reproduces the
// plain in-order sum of diag(b) bit for bit.
inline double trace_product(const Matrix& a, const Matrix& b) {
  double acc = 0.0;
  for (Eigen::Index l = 0; l < a.rows(); ++l)
    for (Eigen::Index m = 0; m < a.cols(); ++m) acc += a(l, m) * b(m, l);
  return acc;
}

inline double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace gsi
