#ifndef RADONBL_RADON_LAB_HPP
#define RADONBL_RADON_LAB_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "radonbl/common.hpp"
#include "radonbl/models.hpp"

namespace radonbl {

struct Box {
  Vector lo;
  Vector hi;

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
  bool contains(const Vector& p) const;
};

Box make_box(const Vector& lo, const Vector& hi);
Box cube(int dim, double lo, double hi);

enum class OperatorKind { moment_curve, quadratic, max_codim };

std::string to_string(OperatorKind kind);

// T f(x) = int_{t_box} f(graph(x, t)) dt with
//   moment curve: graph = x + (t, t^2, ..., t^n)               (k = 1)
//   quadratic:    graph = (x' + t, x'' + (1/2) lambda t^2)
//   max codim:    graph = (x' + t, x''_ij + x'_i (x'_j + t_j))  (n = k + k^2)
// The surface measure of every fiber is exactly dt, so no density enters.
struct ModelOperator {
  OperatorKind kind = OperatorKind::quadratic;
  int n = 0;  // ambient dimension
  int k = 0;  // fiber dimension
  QuadraticModel quad;  // used by the quadratic kind only
  Box domain_box;
  Box t_box;
};

ModelOperator moment_curve_operator(int n);
ModelOperator quadratic_operator(const QuadraticModel& model);
ModelOperator max_codim_operator(int k);
void validate(const ModelOperator& op);

Vector graph_point(const ModelOperator& op, const Vector& x, const Vector& t);
// The x with graph_point(x, t) = y. For fixed t, x -> y has Jacobian 1.
Vector source_point(const ModelOperator& op, const Vector& y, const Vector& t);

struct MonteCarloEstimate {
  double value = 0.0;
  double stderr = 0.0;
  long hits = 0;
  long samples = 0;
};

using Indicator = std::function<bool(const Vector&)>;

// Uniform t over t_box.
MonteCarloEstimate apply_T(const ModelOperator& op, const Indicator& in_e, const Vector& x, int samples_t,
                           uint64_t seed);
// E a box: t is drawn only where x' + t lands in the first k sides of E.
MonteCarloEstimate apply_T(const ModelOperator& op, const Box& e, const Vector& x, int samples_t, uint64_t seed);

struct ExponentPair {
  double p = 0.0;
  double q = 0.0;
};

// Restricted strong type pair at which the Knapp ratio is scale invariant.
ExponentPair critical_exponents(const ModelOperator& op);

// quadratic: [0,d]^k x [0, C d^2]^c with C = max|lambda| / 2
// moment curve: prod_i [0, d^i]; max codim: [0,d]^k x [0,d^2]^{k^2}
Box knapp_box(const ModelOperator& op, double delta);

struct KnappExperiment {
  ModelOperator op;
  ExponentPair exponents;
  std::vector<double> deltas;
  int samples_x = 100000;
  int samples_t = 64;
  uint64_t seed = 0;
  double power_shift = 0.1;
};

struct KnappRecord {
  double delta = 0.0;
  double norm_estimate = 0.0;  // ||T chi_E||_q
  double stderr = 0.0;
  double set_measure = 0.0;  // |E|
  double ratio = 0.0;        // norm / |E|^{1/p}
  double ratio_stderr = 0.0;
  double shifted_ratio = 0.0;  // norm / |E|^{1/p + power_shift}
};

struct RadonExperimentResult {
  std::vector<KnappRecord> records;
  bool exponent_warning = false;
  std::string warning;

  double ratio_band() const;          // max ratio / min ratio
  double shifted_growth() const;      // last shifted ratio / first
  bool shifted_monotone() const;
};

std::vector<double> dyadic_deltas(int count);  // 1/2, 1/4, ..., 2^-count
void validate(const KnappExperiment& exp);
RadonExperimentResult knapp_sweep(const KnappExperiment& exp);

// c x n matrix D_x rho for the quadratic model. Columns follow the
// convention (x_{k+1}, ..., x_n, x_1, ..., x_k): [I_c | (x_i - y_i) lambda_ji].
Matrix left_derivative_matrix(const QuadraticModel& model, const Vector& x, const Vector& y);

// Finite weighted sample of a fiber, recorded by parameters t = y' - x'.
struct FiberSample {
  std::vector<Vector> t;
  std::vector<double> weights;
};

struct ProbeResult {
  double sup_estimate = 0.0;  // best W^{1/p} over the tuples tried
  double bound = 0.0;         // (sum of weights)^s
  long tuples_tried = 0;
  std::vector<int> best_tuple;
  bool minor_condition_holds = false;
  bool flagged = false;  // sup < bound * (1 - tolerance) on a model with nonzero minors
};

struct ProbeOptions {
  int random_tuples = 200;
  uint64_t seed = 0;
  double tolerance = 1e-3;
  int bl_max_iters = 4000;
};

ProbeResult hypothesis_probe(const QuadraticModel& model, const Vector& x, const FiberSample& f, double s,
                             const ProbeOptions& opts = {});

// |det(I + B^T B) - det(I + B B^T)| relative to their size.
double measure_identity_check(const Matrix& b);

}  // namespace radonbl

#endif  // RADONBL_RADON_LAB_HPP
