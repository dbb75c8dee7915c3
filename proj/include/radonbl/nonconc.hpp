#ifndef RADONBL_NONCONC_HPP
#define RADONBL_NONCONC_HPP

#include <utility>
#include <vector>

#include "radonbl/common.hpp"
#include "radonbl/models.hpp"

namespace radonbl {

// A finite weighted point set with d real functions evaluated at each point.
struct SampleSpace {
  Matrix points;   // N x dim (informational)
  Vector weights;  // N, nonnegative
  Matrix basis;    // N x d, column i = i-th basis function

  int size() const { return static_cast<int>(basis.rows()); }
  int dim() const { return static_cast<int>(basis.cols()); }
};

void validate(const SampleSpace& space);

// X_delta plus d witness functions (coefficient vectors in the basis).
// Functions 0..j0-1 vanish on X_delta; functions j0..d-1 are bounded by 1
// there.
struct ConvpropCertificate {
  std::vector<int> selected;
  Matrix witness;  // d x d, column j = coefficients of f_j
  int j0 = 0;
  double delta = 0.0;
  double selected_measure = 0.0;
  double total_measure = 0.0;
  int exchanges = 0;
};

ConvpropCertificate convprop_construct(const SampleSpace& space, double delta);

// Smallest v >= 0 with mu(|f| > v) <= eps (weights summed exactly over the
// points, no smoothing).
double upper_quantile(const Vector& values, const Vector& weights, double eps);

// F as a union of closed intervals [a, b].
std::vector<double> separated_points(const std::vector<std::pair<double, double>>& intervals, int count);

// The k periodic c x c minors of lambda: columns i, ..., i+c-1 (mod k).
std::vector<double> minor_condition(const QuadraticModel& model);
double density_K(const QuadraticModel& model);
// Signed product of the c-strided periodic minors.
double signed_minor_product(const QuadraticModel& model);

// Phi^UR(B(t^1), ..., B(t^k), B(t^0)) = det M^UR(B(t^1 - t^0), ..., B(t^k - t^0)).
double upper_right_phi(const QuadraticModel& model, const std::vector<Vector>& t, const Vector& base);

// Mixed derivative of upper_right_phi at t^i = base, using order[i] of the
// vector fields assigned to variable i (fields (i c + a) mod k, a < order[i],
// each a column of u). Exact: interpolates the polynomial on integer nodes.
double upper_right_derivative(const QuadraticModel& model, const Matrix& u, const Vector& base,
                              const std::vector<int>& order);

struct DerivativeCheck {
  double lhs = 0.0;
  double rhs = 0.0;  // det(U)^c * product of minors
  double discrepancy = 0.0;
};

DerivativeCheck derivative_identity_check(const QuadraticModel& model, const Matrix& u, const Vector& base);

}  // namespace radonbl

#endif  // RADONBL_NONCONC_HPP
