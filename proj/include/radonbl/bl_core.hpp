#ifndef RADONBL_BL_CORE_HPP
#define RADONBL_BL_CORE_HPP

#include <cstdint>
#include <vector>

#include "radonbl/common.hpp"

namespace radonbl {

struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

Rational make_rational(int64_t num, int64_t den);  // reduced, den > 0

// Maps pi_j : R^n -> R^{n_j} with exponents p_j in (0, 1]. The constructor
// enforces sum_j p_j n_j = n exactly in rational arithmetic.
class BLDatum {
 public:
  BLDatum(int n, std::vector<Rational> exps, std::vector<Matrix> maps);

  int n() const { return n_; }
  int m() const { return static_cast<int>(maps_.size()); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<Rational>& exps() const { return exps_; }
  const std::vector<Matrix>& maps() const { return maps_; }
  double exp(int j) const { return exps_[j].value(); }

 private:
  int n_;
  std::vector<int> dims_;
  std::vector<Rational> exps_;
  std::vector<Matrix> maps_;
};

// m maps, each (n-k) x n, sharing the exponent p = n / (m (n-k)).
struct EqualExpDatum {
  int n = 0;
  int k = 0;
  std::vector<Matrix> maps;

  int m() const { return static_cast<int>(maps.size()); }
  Rational p() const;
};

void validate(const EqualExpDatum& d);
BLDatum to_bl_datum(const EqualExpDatum& d);

struct BLOptions {
  int max_iters = 20000;
  double tol = 1e-13;
};

struct BLResult {
  double value = 0.0;  // BL^-1, or W^{1/p} for the weight-root entry point
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // relative objective change at stop
  bool regularized = false;
  bool zero_weight = false;  // degenerate / semi-stable stop
  double gaussian_value = 0.0;
  double min_vector_value = 0.0;
  std::vector<Matrix> witness;  // A_1..A_m, A (unit determinant)
  std::vector<double> history;  // objective after every half step
};

double gaussian_objective(const BLDatum& d, const std::vector<Matrix>& spd_params);
double min_vector_objective(const BLDatum& d, const std::vector<Matrix>& a_list, const Matrix& a);

BLResult bl_constant_alternating(const BLDatum& d, const BLOptions& opts = {});
BLResult bl_weight_root(const EqualExpDatum& d, const BLOptions& opts = {});

struct ScalingCheck {
  double lhs = 0.0;  // W^{1/p}(M_j pi_j)
  double rhs = 0.0;  // W^{1/p}(pi_j) prod |det M_j|
  double discrepancy = 0.0;
  bool converged = false;
};

ScalingCheck check_scaling_identity(const EqualExpDatum& d, const std::vector<Matrix>& m_list,
                                    const BLOptions& opts = {});

// Named data used by tests and the CLI.
EqualExpDatum loomis_whitney(int n);

}  // namespace radonbl

#endif  // RADONBL_BL_CORE_HPP
