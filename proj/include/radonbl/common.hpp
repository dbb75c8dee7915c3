#ifndef RADONBL_COMMON_HPP
#define RADONBL_COMMON_HPP

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace radonbl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Bad shapes, invalid parameters, malformed data.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation ran but could not deliver its guarantee (singular matrix,
// violated contraction, failed certificate, ...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct Tolerances {
  double abs = 1e-12;
  double rel = 1e-9;
};

inline const Tolerances kDefaultTolerances{};

// |a - b| / max(|a|, |b|, floor); 0 when both are zero.
double relative_difference(double a, double b, double floor = 0.0);

}  // namespace radonbl

#endif  // RADONBL_COMMON_HPP
