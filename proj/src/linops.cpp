#include "radonbl/linops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace radonbl {

double relative_difference(double a, double b, double floor) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw InputError(std::string(what) + ": expected a square matrix, got " + std::to_string(m.rows()) +
                     "x" + std::to_string(m.cols()));
  }
}

double det_cofactor(const Matrix& m) {
  require_square(m, "det_cofactor");
  switch (m.rows()) {
    case 0:
      return 1.0;
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
             m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    case 4: {
      // expand along the first row using 2x2 minors of the bottom two rows
      const double s0 = m(2, 0) * m(3, 1) - m(2, 1) * m(3, 0);
      const double s1 = m(2, 0) * m(3, 2) - m(2, 2) * m(3, 0);
      const double s2 = m(2, 0) * m(3, 3) - m(2, 3) * m(3, 0);
      const double s3 = m(2, 1) * m(3, 2) - m(2, 2) * m(3, 1);
      const double s4 = m(2, 1) * m(3, 3) - m(2, 3) * m(3, 1);
      const double s5 = m(2, 2) * m(3, 3) - m(2, 3) * m(3, 2);
      const double c0 = m(1, 1) * s5 - m(1, 2) * s4 + m(1, 3) * s3;
      const double c1 = m(1, 0) * s5 - m(1, 2) * s2 + m(1, 3) * s1;
      const double c2 = m(1, 0) * s4 - m(1, 1) * s2 + m(1, 3) * s0;
      const double c3 = m(1, 0) * s3 - m(1, 1) * s1 + m(1, 2) * s0;
      return m(0, 0) * c0 - m(0, 1) * c1 + m(0, 2) * c2 - m(0, 3) * c3;
    }
    default:
      throw InputError("det_cofactor: size " + std::to_string(m.rows()) + " exceeds 4");
  }
}

double det_lu(const Matrix& m) {
  require_square(m, "det_lu");
  const Eigen::Index n = m.rows();
  Matrix a = m;
  double result = 1.0;
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    double best = std::abs(a(col, col));
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > best) {
        best = std::abs(a(r, col));
        pivot = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      result = -result;
    }
    const double p = a(col, col);
    result *= p;
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const double f = a(r, col) / p;
      if (f != 0.0) a.row(r).tail(n - col - 1) -= f * a.row(col).tail(n - col - 1);
    }
  }
  return result;
}

double det(const Matrix& m) {
  require_square(m, "det");
  return m.rows() <= 4 ? det_cofactor(m) : det_lu(m);
}

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> checked_spd_eigen(const Matrix& m, const Tolerances& tol,
                                                        const char* what) {
  require_square(m, what);
  if (m.size() == 0) throw InputError(std::string(what) + ": empty matrix");
  const double scale = m.cwiseAbs().maxCoeff();
  if (!m.allFinite()) throw InputError(std::string(what) + ": non-finite entries");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol.rel * std::max(scale, 1e-300)) {
    throw InputError(std::string(what) + ": matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()));
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || lo <= tol.abs * hi) {
    throw NumericalError(std::string(what) + ": matrix is not positive definite (smallest eigenvalue " +
                         std::to_string(lo) + ")");
  }
  return eig;
}

}  // namespace

Matrix spd_inverse_sqrt(const Matrix& m, const Tolerances& tol) {
  const auto eig = checked_spd_eigen(m, tol, "spd_inverse_sqrt");
  const Vector d = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  const Matrix& v = eig.eigenvectors();
  Matrix s = v * d.asDiagonal() * v.transpose();
  return 0.5 * (s + s.transpose());
}

Matrix spd_sqrt(const Matrix& m, const Tolerances& tol) {
  const auto eig = checked_spd_eigen(m, tol, "spd_sqrt");
  const Vector d = eig.eigenvalues().cwiseSqrt();
  const Matrix& v = eig.eigenvectors();
  Matrix s = v * d.asDiagonal() * v.transpose();
  return 0.5 * (s + s.transpose());
}

double hs_norm(const Matrix& m) { return m.norm(); }

double linf_operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double linf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

TriangularizationResult upper_triangularize(const Matrix& t) {
  require_square(t, "upper_triangularize");
  const Eigen::Index d = t.rows();
  if (d == 0) throw InputError("upper_triangularize: empty matrix");

  Matrix e;
  if (d == 1) {
    e = Matrix::Identity(1, 1);
  } else {
    // bring the largest entry of the last row into the last column
    Eigen::Index pivot = 0;
    if (t.row(d - 1).cwiseAbs().maxCoeff(&pivot) == 0.0) pivot = d - 1;
    Matrix perm = Matrix::Identity(d, d);
    if (pivot != d - 1) {
      perm.col(pivot).swap(perm.col(d - 1));
    }
    const Matrix tp = t * perm;
    const double tdd = tp(d - 1, d - 1);

    Matrix reduced(d - 1, d - 1);
    if (tdd != 0.0) {
      for (Eigen::Index j = 0; j < d - 1; ++j)
        for (Eigen::Index i = 0; i < d - 1; ++i)
          reduced(j, i) = tp(j, i) - tp(d - 1, i) * tp(j, d - 1) / tdd;
    } else {
      reduced = tp.topLeftCorner(d - 1, d - 1);  // last row is identically zero
    }

    const Matrix inner = upper_triangularize(reduced).E;
    Matrix ep = Matrix::Zero(d, d);
    ep.topLeftCorner(d - 1, d - 1) = inner;
    if (tdd != 0.0) {
      for (Eigen::Index i = 0; i < d - 1; ++i) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < d - 1; ++j) s += tp(d - 1, j) / tdd * inner(j, i);
        ep(d - 1, i) = -s;
      }
    }
    ep(d - 1, d - 1) = 1.0;
    e = perm * ep;
    // a transposition has sign -1; negating one column restores det E = 1
    if (pivot != d - 1) e.col(d - 1) = -e.col(d - 1);
  }

  TriangularizationResult out;
  out.E = e;
  out.U = t * e;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) out.U(j, i) = 0.0;  // zero by construction
  out.entry_sum = e.cwiseAbs().sum();
  return out;
}

Matrix random_unimodular(int d, Rng& rng, double spread) {
  Matrix a(d, d);
  for (;;) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = (i == j ? 1.0 : 0.0) + spread * rng.normal();
    const double dt = det(a);
    if (std::abs(dt) < 1e-3) continue;
    if (dt < 0) a.row(0) = -a.row(0);
    a /= std::pow(std::abs(dt), 1.0 / d);
    return a;
  }
}

}  // namespace radonbl
