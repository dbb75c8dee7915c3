#ifndef RADONBL_MODELS_HPP
#define RADONBL_MODELS_HPP

#include "radonbl/common.hpp"

namespace radonbl {

// Quadratic submanifold model: graph t -> (t, (1/2) sum_i lambda_ji t_i^2)
// in R^n, k < n <= 2k, with codimension c = n - k and lambda of shape c x k.
struct QuadraticModel {
  int n = 0;
  int k = 0;
  Matrix lambda;

  int c() const { return n - k; }
};

QuadraticModel make_quadratic_model(int n, int k, const Matrix& lambda);
void validate(const QuadraticModel& model);

// B(t) = lambda * diag(t), the c x k block that appears in the
// derivative matrices of the quadratic model.
Matrix quadratic_b(const QuadraticModel& model, const Vector& t);

}  // namespace radonbl

#endif  // RADONBL_MODELS_HPP
