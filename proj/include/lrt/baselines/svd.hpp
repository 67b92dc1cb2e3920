#pragma once

#include <cstddef>
#include <vector>

namespace lrt {

// Row-major dense matrix.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  DenseMatrix transposed() const;
};

// A = U diag(S) V^T with U: rows x r, V: cols x r, r = min(rows, cols) and S
// sorted non-increasing. Columns of U belonging to zero singular values are 0.
struct SvdResult {
  DenseMatrix u;
  std::vector<double> singular_values;
  DenseMatrix v;
  int sweeps = 0;
};

inline constexpr int kSvdMaxSweeps = 1000;
inline constexpr double kSvdTolerance = 1e-10;

// One-sided (Hestenes) Jacobi on the smaller dimension. Throws
// ConvergenceError when the sweep cap is reached.
SvdResult jacobi_svd(const DenseMatrix& a, int max_sweeps = kSvdMaxSweeps, double tolerance = kSvdTolerance);

}  // namespace lrt
