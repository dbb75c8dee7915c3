#ifndef RADONBL_IFT_NEWTON_HPP
#define RADONBL_IFT_NEWTON_HPP

#include <functional>
#include <string>
#include <vector>

#include "radonbl/common.hpp"
#include "radonbl/models.hpp"

namespace radonbl {

using VectorField = std::function<Vector(const Vector&)>;
using JacobianField = std::function<Matrix(const Vector&)>;

// Phi : R^n -> R^{n-k} on the l^inf box Q_{x0,r}. All vector norms are
// l^inf and matrix norms the induced l^inf -> l^inf norm.
struct NewtonProblem {
  VectorField phi;
  JacobianField jacobian;  // optional; central differences when empty
  Vector x0;
  double r = 0.0;
  Matrix R;         // n x (n-k)
  double c = 0.0;   // claimed sup ||D Phi R - I||
  double C = 0.0;   // claimed sup |D Phi v| over unit v orthogonal to range(R)
};

struct NewtonOptions {
  int max_iters = 200;
  double tol = 1e-12;
  int contraction_grid = 3;  // nodes per axis for the sampled check; 0 skips it
};

struct NewtonCertificate {
  std::vector<double> residuals;  // |Phi(x_j)|
  double distance = 0.0;          // |x - x0|
  double distance_bound = 0.0;    // ||R|| (1-c)^-1 |Phi(x0)|
  double sampled_contraction = -1.0;  // -1 when not sampled
  int iterations = 0;
};

struct NewtonResult {
  Vector root;
  NewtonCertificate certificate;
};

Matrix central_difference_jacobian(const VectorField& phi, const Vector& x, double relative_step = 1e-6);
Matrix evaluate_jacobian(const NewtonProblem& p, const Vector& x);

// sup of ||D Phi_x R - I|| over grid^n cell centers of Q_{x0,r}.
double sampled_contraction(const NewtonProblem& p, int grid);
// sup of |D Phi_x v| over the same nodes and unit l^inf vectors v in V = range(R)^perp
// (maximized over the vertices of a sampled set of directions).
double sampled_transverse_bound(const NewtonProblem& p, int grid);

void validate(const NewtonProblem& p);

// x_{j+1} = x_j - R Phi(x_j). Throws InputError when |Phi(x0)| is too large
// and NumericalError when the decay |Phi(x_j)| <= c^j |Phi(x0)| fails.
NewtonResult newton_solve(const NewtonProblem& p, const NewtonOptions& opts = {});

struct FiberMeasure {
  double measure = 0.0;     // cell-counted k-dimensional measure of the parameter set
  double guaranteed = 0.0;  // r^k min(1/2, (1-c) / (6 C ||R||))^k
  double parameter_radius = 0.0;
  int nodes_solved = 0;
  double sampled_contraction = -1.0;
  double sampled_transverse = -1.0;
  std::vector<Vector> roots;
};

FiberMeasure fiber_measure_lower_bound(const NewtonProblem& p, int grid, const NewtonOptions& opts = {});

// rho : R^n x R^n -> R^{n-k} with its left and right derivative matrices.
struct IncidenceModel {
  std::string name;
  int n = 0;
  int k = 0;
  int degree = 0;
  std::function<Vector(const Vector&, const Vector&)> rho;
  std::function<Matrix(const Vector&, const Vector&)> dx;  // optional
  std::function<Matrix(const Vector&, const Vector&)> dy;  // optional
  // a zero of rho(x, .) parametrized by t in R^k
  std::function<Vector(const Vector&, const Vector&)> fiber_point;
};

// rho_i = x_i - y_i + (y_1 - x_1)^i, i = 2..n
IncidenceModel moment_curve_incidence(int n);
// rho_j = -y_{k+j} + x_{k+j} + (1/2) sum_i lambda_ji (y_i - x_i)^2
IncidenceModel quadratic_incidence(const QuadraticModel& model);
// rho_ij = -y''_ij + x''_ij + x'_i y'_j
IncidenceModel max_codim_incidence(int k);

Matrix incidence_dx(const IncidenceModel& m, const Vector& x, const Vector& y);
Matrix incidence_dy(const IncidenceModel& m, const Vector& x, const Vector& y);

struct NormalizedDefining {
  Vector value;  // (D_x rho D_x rho^T)^{-1/2} rho
  Matrix dx;     // D_x of the normalized function
  bool at_zero = false;
  double gram_residual = 0.0;   // max |D_x rho~ D_x rho~^T - I|
  double det_ratio = 0.0;       // det(D_y rho D_y rho^T) / det(D_x rho D_x rho^T)
  double det_normalized = 0.0;  // det(D_y rho~ D_y rho~^T)
  double det_discrepancy = 0.0;
};

NormalizedDefining normalize_defining_function(const IncidenceModel& m, const Vector& x, const Vector& y);

// kappa_n = kappa'_n / 6 where 1 / kappa'_n = max ||R|| over n x c matrices
// with orthonormal columns; that maximum is sqrt(c).
double normalization_kappa(int c);

}  // namespace radonbl

#endif  // RADONBL_IFT_NEWTON_HPP
