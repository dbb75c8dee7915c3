#include "radonbl/models.hpp"

#include <string>

namespace radonbl {

void validate(const QuadraticModel& model) {
  if (model.k <= 0 || model.n <= model.k || model.n > 2 * model.k) {
    throw InputError("quadratic model needs k < n <= 2k (got n=" + std::to_string(model.n) +
                     ", k=" + std::to_string(model.k) + ")");
  }
  if (model.lambda.rows() != model.c() || model.lambda.cols() != model.k) {
    throw InputError("quadratic model: lambda must be " + std::to_string(model.c()) + "x" +
                     std::to_string(model.k));
  }
  if (!model.lambda.allFinite()) throw InputError("quadratic model: non-finite lambda");
}

QuadraticModel make_quadratic_model(int n, int k, const Matrix& lambda) {
  QuadraticModel model{n, k, lambda};
  validate(model);
  return model;
}

Matrix quadratic_b(const QuadraticModel& model, const Vector& t) {
  if (t.size() != model.k) throw InputError("quadratic_b: parameter has wrong length");
  return model.lambda * t.asDiagonal();
}

}  // namespace radonbl
