#ifndef RADONBL_LINOPS_HPP
#define RADONBL_LINOPS_HPP

#include "radonbl/common.hpp"
#include "radonbl/rng.hpp"

namespace radonbl {

// Cofactor expansion for sizes <= 4, partial-pivot LU above that.
double det(const Matrix& m);
double det_lu(const Matrix& m);
double det_cofactor(const Matrix& m);  // sizes 0..4 only

// S with S*m*S = I, via symmetric eigendecomposition.
Matrix spd_inverse_sqrt(const Matrix& m, const Tolerances& tol = kDefaultTolerances);
Matrix spd_sqrt(const Matrix& m, const Tolerances& tol = kDefaultTolerances);

double hs_norm(const Matrix& m);

// Max absolute row sum: the l^inf -> l^inf operator norm.
double linf_operator_norm(const Matrix& m);
double linf_norm(const Vector& v);

struct TriangularizationResult {
  Matrix U;  // upper-triangular
  Matrix E;  // det E = 1
  double entry_sum = 0.0;
};

// Finds E with det E = 1 and sum |E_li| <= 2^d - 1 such that T*E is
// upper-triangular. Recursive pivoting on the last row.
TriangularizationResult upper_triangularize(const Matrix& t);

// Random d x d matrix with determinant exactly normalized to +1.
Matrix random_unimodular(int d, Rng& rng, double spread = 0.5);

void require_square(const Matrix& m, const char* what);

}  // namespace radonbl

#endif  // RADONBL_LINOPS_HPP
