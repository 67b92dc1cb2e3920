#include "lrt/baselines/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lrt/error.hpp"

namespace lrt {

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols, rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

namespace {

// Orthogonalizes the columns of `w` (m x n, m >= n) in place and accumulates
// the rotations in `v` (n x n).
int hestenes(DenseMatrix& w, DenseMatrix& v, int max_sweeps, double tol) {
  const std::size_t m = w.rows;
  const std::size_t n = w.cols;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0;
        double beta = 0.0;
        double gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += w(i, p) * w(i, p);
          beta += w(i, q) * w(i, q);
          gamma += w(i, p) * w(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double wp = w(i, p);
          const double wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) return sweep;
  }
  throw ConvergenceError("Jacobi SVD did not converge within " + std::to_string(max_sweeps) + " sweeps");
}

}  // namespace

SvdResult jacobi_svd(const DenseMatrix& a, int max_sweeps, double tolerance) {
  if (a.rows == 0 || a.cols == 0) throw ValidationError("SVD of an empty matrix");
  for (const double x : a.data) {
    if (!std::isfinite(x)) throw ValidationError("SVD input must be finite");
  }
  const bool flip = a.cols > a.rows;
  DenseMatrix w = flip ? a.transposed() : a;
  const std::size_t m = w.rows;
  const std::size_t n = w.cols;
  DenseMatrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  const int sweeps = hestenes(w, v, max_sweeps, tolerance);

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += w(i, j) * w(i, j);
    sigma[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  const double largest = sigma[order.front()];
  DenseMatrix left(m, n);
  DenseMatrix right(n, n);
  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    values[k] = sigma[j];
    const bool zero = sigma[j] <= tolerance * std::max(largest, 1.0);
    for (std::size_t i = 0; i < m; ++i) left(i, k) = zero ? 0.0 : w(i, j) / sigma[j];
    for (std::size_t i = 0; i < n; ++i) right(i, k) = v(i, j);
  }

  SvdResult out;
  out.singular_values = std::move(values);
  out.sweeps = sweeps;
  if (flip) {
    out.u = std::move(right);
    out.v = std::move(left);
  } else {
    out.u = std::move(left);
    out.v = std::move(right);
  }
  return out;
}

}  // namespace lrt
