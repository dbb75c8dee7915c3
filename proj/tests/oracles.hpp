// Independent reference computations used only by the tests. None of these
// call into the library routines they are compared against.
#ifndef RADONBL_TESTS_ORACLES_HPP
#define RADONBL_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "radonbl/common.hpp"
#include "radonbl/rng.hpp"

namespace oracle {

using radonbl::Matrix;
using radonbl::Vector;

// Leibniz expansion over all permutations.
inline double det_leibniz(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  do {
    double prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= m(i, perm[i]);
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
    total += inversions % 2 ? -prod : prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

inline Matrix random_matrix(int rows, int cols, radonbl::Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline Matrix sym_apply(const Matrix& s, double (*f)(double)) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
  const Vector d = eig.eigenvalues().unaryExpr(f);
  return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
}

// BL^-1 = inf over SPD X_j of [det(sum p_j pi_j^T X_j pi_j) / prod det(X_j)^{p_j}]^{1/2},
// minimized by Riemannian gradient descent in the affine-invariant metric.
inline double bl_inverse_gradient_descent(const std::vector<Matrix>& maps, const std::vector<double>& p,
                                          int iters = 20000, double step = 0.5) {
  const int m = static_cast<int>(maps.size());
  const int n = static_cast<int>(maps.front().cols());
  std::vector<Matrix> x;
  for (const Matrix& pi : maps) x.push_back(Matrix::Identity(pi.rows(), pi.rows()));
  auto objective = [&](const std::vector<Matrix>& xs) {
    Matrix central = Matrix::Zero(n, n);
    double log_den = 0.0;
    for (int j = 0; j < m; ++j) {
      central += p[j] * maps[j].transpose() * xs[j] * maps[j];
      log_den += p[j] * std::log(xs[j].determinant());
    }
    return 0.5 * (std::log(central.determinant()) - log_den);
  };
  double value = objective(x);
  for (int it = 0; it < iters; ++it) {
    Matrix central = Matrix::Zero(n, n);
    for (int j = 0; j < m; ++j) central += p[j] * maps[j].transpose() * x[j] * maps[j];
    const Matrix inv = central.inverse();
    std::vector<Matrix> next = x;
    double grad_norm = 0.0;
    for (int j = 0; j < m; ++j) {
      const Matrix half = sym_apply(x[j], [](double v) { return std::sqrt(v); });
      const Matrix g = 0.5 * p[j] * (half * maps[j] * inv * maps[j].transpose() * half -
                                     Matrix::Identity(x[j].rows(), x[j].rows()));
      grad_norm = std::max(grad_norm, g.cwiseAbs().maxCoeff());
      const Matrix g_sym = -step * 0.5 * (g + g.transpose());
      next[j] = half * sym_apply(g_sym, [](double v) { return std::exp(v); }) * half;
    }
    const double next_value = objective(next);
    if (next_value > value) {
      step *= 0.5;
      continue;
    }
    x = next;
    value = next_value;
    if (grad_norm < 1e-12) break;
  }
  return std::exp(value);
}

// Generic equal-exponent data with m maps R^n -> R^{n-k} satisfy the
// subspace condition strictly on every intersection of a kernels, which is
// where generic data first fail.
inline bool generic_nondegenerate(int n, int k, int m) {
  const double p = static_cast<double>(n) / (m * (n - k));
  if (p > 1.0) return false;
  for (int a = 1; a < m; ++a) {
    const int dim = n - a * (n - k);
    if (dim <= 0) break;
    if (!((m - a) * p * std::min(dim, n - k) > dim)) return false;
  }
  return true;
}

// Length of {t in [-1, 1] : x1 + t in [0, a], x2 + t^2 / 2 in [0, b]}.
inline double parabola_T(double x1, double x2, double a, double b) {
  const double lo = std::max(-1.0, -x1);
  const double hi = std::min(1.0, a - x1);
  if (hi <= lo) return 0.0;
  const double outer_sq = 2.0 * (b - x2);
  if (outer_sq < 0.0) return 0.0;
  const double outer = std::sqrt(outer_sq);
  const double inner = std::sqrt(std::max(0.0, -2.0 * x2));
  if (inner >= outer) return 0.0;
  auto overlap = [&](double u, double v) { return std::max(0.0, std::min(hi, v) - std::max(lo, u)); };
  return overlap(-outer, -inner) + overlap(inner, outer);
}

// Midpoint quadrature of int T^q over the support of T chi_E.
inline double parabola_norm(double a, double b, double q, int grid) {
  const double x1_lo = -1.0, x1_hi = a + 1.0;
  const double x2_lo = -0.5, x2_hi = b;
  const double h1 = (x1_hi - x1_lo) / grid, h2 = (x2_hi - x2_lo) / grid;
  double total = 0.0;
  for (int i = 0; i < grid; ++i) {
    double row = 0.0;
    const double x1 = x1_lo + (i + 0.5) * h1;
    for (int j = 0; j < grid; ++j) {
      const double t = parabola_T(x1, x2_lo + (j + 0.5) * h2, a, b);
      if (t > 0.0) row += std::pow(t, q);
    }
    total += row;
  }
  return std::pow(total * h1 * h2, 1.0 / q);
}

// Mixed directional derivative D_{v_1}..D_{v_c} of a function that is a
// homogeneous degree-c polynomial in each of its k vector arguments
// (centered at base), by inclusion-exclusion over 2^{kc} subsets.
inline double mixed_derivative_inclusion_exclusion(
    const std::function<double(const std::vector<Vector>&)>& f, const std::vector<Vector>& base,
    const std::vector<std::vector<Vector>>& directions) {
  const int k = static_cast<int>(base.size());
  std::vector<int> counts;
  int total_bits = 0;
  for (const auto& d : directions) {
    counts.push_back(static_cast<int>(d.size()));
    total_bits += counts.back();
  }
  double sum = 0.0;
  for (long mask = 0; mask < (1L << total_bits); ++mask) {
    std::vector<Vector> t = base;
    int bit = 0;
    int missing = 0;
    for (int i = 0; i < k; ++i) {
      for (int a = 0; a < counts[i]; ++a, ++bit) {
        if (mask & (1L << bit)) {
          t[i] += directions[i][a];
        } else {
          ++missing;
        }
      }
    }
    sum += (missing % 2 ? -1.0 : 1.0) * f(t);
  }
  return sum;
}

}  // namespace oracle

#endif  // RADONBL_TESTS_ORACLES_HPP
