#include "radonbl/bl_core.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "radonbl/linops.hpp"

namespace radonbl {

Rational make_rational(int64_t num, int64_t den) {
  if (den == 0) throw InputError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

BLDatum::BLDatum(int n, std::vector<Rational> exps, std::vector<Matrix> maps)
    : n_(n), exps_(std::move(exps)), maps_(std::move(maps)) {
  if (n_ < 1) throw InputError("BL datum: ambient dimension must be positive");
  if (maps_.empty()) throw InputError("BL datum: no maps");
  if (exps_.size() != maps_.size()) {
    throw InputError("BL datum: " + std::to_string(exps_.size()) + " exponents for " +
                     std::to_string(maps_.size()) + " maps");
  }
  // sum_j p_j n_j == n, exactly
  __int128 num = 0;
  __int128 den = 1;
  for (std::size_t j = 0; j < maps_.size(); ++j) {
    const Matrix& pi = maps_[j];
    if (pi.cols() != n_ || pi.rows() < 1 || pi.rows() > n_) {
      throw InputError("BL datum: map " + std::to_string(j) + " has shape " + std::to_string(pi.rows()) +
                       "x" + std::to_string(pi.cols()) + ", expected n_j x " + std::to_string(n_));
    }
    if (!pi.allFinite()) throw InputError("BL datum: map " + std::to_string(j) + " has non-finite entries");
    exps_[j] = make_rational(exps_[j].num, exps_[j].den);
    const Rational p = exps_[j];
    if (p.num <= 0 || p.num > p.den) {
      throw InputError("BL datum: exponent " + std::to_string(j) + " must lie in (0, 1]");
    }
    dims_.push_back(static_cast<int>(pi.rows()));
    num = num * p.den + static_cast<__int128>(p.num) * pi.rows() * den;
    den *= p.den;
    const __int128 a = num < 0 ? -num : num;
    __int128 g = den;
    __int128 b = a;
    while (b != 0) {
      const __int128 r = g % b;
      g = b;
      b = r;
    }
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  if (num != static_cast<__int128>(n_) * den) {
    throw InputError("BL datum violates the scaling condition: sum_j p_j n_j = " +
                     std::to_string(static_cast<double>(num) / static_cast<double>(den)) + " but n = " +
                     std::to_string(n_));
  }
}

Rational EqualExpDatum::p() const {
  return make_rational(n, static_cast<int64_t>(m()) * (n - k));
}

void validate(const EqualExpDatum& d) {
  if (d.k <= 0 || d.k >= d.n) throw InputError("equal-exponent datum needs 0 < k < n");
  if (d.maps.empty()) throw InputError("equal-exponent datum: no maps");
  for (std::size_t j = 0; j < d.maps.size(); ++j) {
    if (d.maps[j].rows() != d.n - d.k || d.maps[j].cols() != d.n) {
      throw InputError("equal-exponent datum: map " + std::to_string(j) + " must be " +
                       std::to_string(d.n - d.k) + "x" + std::to_string(d.n));
    }
  }
}

BLDatum to_bl_datum(const EqualExpDatum& d) {
  validate(d);
  const Rational p = d.p();
  if (p.num > p.den) {
    throw InputError("equal-exponent datum: p = " + std::to_string(p.value()) +
                     " exceeds 1; need m (n-k) >= n");
  }
  return BLDatum(d.n, std::vector<Rational>(d.maps.size(), p), d.maps);
}

double gaussian_objective(const BLDatum& d, const std::vector<Matrix>& spd_params) {
  if (static_cast<int>(spd_params.size()) != d.m()) throw InputError("gaussian_objective: wrong parameter count");
  Matrix central = Matrix::Zero(d.n(), d.n());
  double log_den = 0.0;
  for (int j = 0; j < d.m(); ++j) {
    const Matrix& x = spd_params[j];
    if (x.rows() != d.dims()[j] || x.cols() != d.dims()[j]) {
      throw InputError("gaussian_objective: parameter " + std::to_string(j) + " has the wrong shape");
    }
    if ((x - x.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, x.cwiseAbs().maxCoeff())) {
      throw InputError("gaussian_objective: parameter " + std::to_string(j) + " is not symmetric");
    }
    Eigen::LLT<Matrix> llt(x);
    if (llt.info() != Eigen::Success) {
      throw InputError("gaussian_objective: parameter " + std::to_string(j) + " is not positive definite");
    }
    log_den += d.exp(j) * 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    central += d.exp(j) * d.maps()[j].transpose() * x * d.maps()[j];
  }
  const double dc = det(0.5 * (central + central.transpose()));
  if (!(dc > 0.0)) return 0.0;
  return std::exp(0.5 * (std::log(dc) - log_den));
}

double min_vector_objective(const BLDatum& d, const std::vector<Matrix>& a_list, const Matrix& a) {
  if (static_cast<int>(a_list.size()) != d.m()) throw InputError("min_vector_objective: wrong matrix count");
  require_square(a, "min_vector_objective");
  if (a.rows() != d.n()) throw InputError("min_vector_objective: A has the wrong size");
  if (std::abs(det(a) - 1.0) > 1e-6) throw InputError("min_vector_objective: det A must be 1");
  double log_value = 0.0;
  for (int j = 0; j < d.m(); ++j) {
    const Matrix& aj = a_list[j];
    if (aj.rows() != d.dims()[j] || aj.cols() != d.dims()[j]) {
      throw InputError("min_vector_objective: A_" + std::to_string(j) + " has the wrong size");
    }
    if (std::abs(det(aj) - 1.0) > 1e-6) {
      throw InputError("min_vector_objective: det A_" + std::to_string(j) + " must be 1");
    }
    const double nj = d.dims()[j];
    const double pj = d.exp(j);
    const double hs = hs_norm(aj * d.maps()[j] * a.transpose());
    if (hs == 0.0) return 0.0;
    log_value += -pj * nj / 2.0 * std::log(nj) + pj * nj * std::log(hs);
  }
  return std::exp(log_value);
}

namespace {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix unit_det(const Matrix& spd) {
  const double dt = det(spd);
  return spd / std::pow(dt, 1.0 / static_cast<double>(spd.rows()));
}

}  // namespace

// The scheme works with P = A^T A (det 1) and the Gaussian parameters
// X_j = A_j^T A_j up to scale. Each half step is an exact minimizer of the
// same functional, so the recorded objective never increases.
BLResult bl_constant_alternating(const BLDatum& d, const BLOptions& opts) {
  if (!(opts.tol > 0.0)) throw InputError("bl_constant_alternating: tol must be positive");
  if (opts.max_iters < 1) throw InputError("bl_constant_alternating: max_iters must be positive");
  const int n = d.n();
  const int m = d.m();

  BLResult res;
  Matrix p = Matrix::Identity(n, n);
  std::vector<Matrix> x(m);
  double kernel_scale = 1.0;

  // X_j := (pi_j P pi_j^T)^-1; returns prod det(pi_j P pi_j^T)^{p_j/2}
  auto maps_step = [&]() {
    double log_value = 0.0;
    for (int j = 0; j < m; ++j) {
      const Matrix& pi = d.maps()[j];
      Matrix g = symmetrize(pi * p * pi.transpose());
      const double trace = g.trace();
      Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
      if (eig.eigenvalues().minCoeff() <= 1e-12 * trace || trace <= 0.0) {
        const double eps = trace > 0.0 ? 1e-12 * trace : 1e-12;
        g += eps * Matrix::Identity(g.rows(), g.cols());
        eig.compute(g);
        res.regularized = true;
      }
      const Matrix& v = eig.eigenvectors();
      x[j] = symmetrize(v * eig.eigenvalues().cwiseInverse().asDiagonal() * v.transpose());
      log_value += 0.5 * d.exp(j) * eig.eigenvalues().array().log().sum();
    }
    return std::exp(log_value);
  };

  // P := (det M)^{1/n} M^-1 with M = sum p_j pi_j^T X_j pi_j, or the kernel
  // limit when M is singular; returns the Gaussian objective at X.
  auto ambient_step = [&]() {
    Matrix central = Matrix::Zero(n, n);
    double log_den = 0.0;
    for (int j = 0; j < m; ++j) {
      central += d.exp(j) * d.maps()[j].transpose() * x[j] * d.maps()[j];
      log_den += d.exp(j) * std::log(det(x[j]));
    }
    central = symmetrize(central);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(central);
    const Vector& ev = eig.eigenvalues();
    const Matrix& v = eig.eigenvectors();
    const double norm = ev.maxCoeff();
    const double dc = ev.prod();
    if (!(norm > 0.0) || dc < 1e-14 * std::pow(norm, n)) {
      int ell = 0;
      for (int i = 0; i < n; ++i)
        if (ev(i) <= 1e-7 * std::max(norm, 1e-300)) ++ell;
      ell = std::max(ell, 1);
      if (ell >= n) {
        p = Matrix::Identity(n, n);
        return 0.0;
      }
      const Matrix ker = v.leftCols(ell) * v.leftCols(ell).transpose();
      kernel_scale *= 10.0;
      p = std::pow(kernel_scale, 2.0 / ell) * ker +
          std::pow(kernel_scale, -2.0 / (n - ell)) * (Matrix::Identity(n, n) - ker);
      p = symmetrize(p);
      return 0.0;
    }
    const double root = std::pow(dc, 1.0 / n);
    p = symmetrize(v * (root * ev.cwiseInverse()).asDiagonal() * v.transpose());
    return std::exp(0.5 * (std::log(dc) - log_den));
  };

  double start = 0.0;
  double previous = std::numeric_limits<double>::infinity();
  int big_drops = 0;
  for (int it = 1; it <= opts.max_iters; ++it) {
    const double half = maps_step();
    res.history.push_back(half);
    if (it == 1) {
      start = half;
      previous = half;
    }
    const double full = ambient_step();
    res.history.push_back(full);
    res.iterations = it;

    const double rel = previous > 0.0 ? (previous - full) / previous : 0.0;
    res.residual = std::max(rel, 0.0);
    previous = full;
    if (!(full > 1e-8 * start)) {
      res.zero_weight = true;
      break;
    }
    big_drops = rel > 0.5 ? big_drops + 1 : 0;
    if (big_drops >= 10) {
      res.zero_weight = true;
      break;
    }
    if (rel < opts.tol) {
      res.converged = true;
      break;
    }
  }

  // witness consistent with the final P
  maps_step();
  res.witness.clear();
  for (int j = 0; j < m; ++j) res.witness.push_back(spd_sqrt(unit_det(x[j])));
  res.witness.push_back(spd_sqrt(unit_det(p)));
  res.gaussian_value = gaussian_objective(d, x);
  if (res.zero_weight) {
    res.min_vector_value = res.history.back();
    res.value = res.history.back();
  } else {
    std::vector<Matrix> a_list(res.witness.begin(), res.witness.end() - 1);
    res.min_vector_value = min_vector_objective(d, a_list, res.witness.back());
    res.value = std::min(res.gaussian_value, res.min_vector_value);
  }
  return res;
}

BLResult bl_weight_root(const EqualExpDatum& d, const BLOptions& opts) {
  BLResult res = bl_constant_alternating(to_bl_datum(d), opts);
  // W^{1/p} = (BL^-1)^{1/p}
  const double inv_p = 1.0 / d.p().value();
  res.value = std::pow(res.value, inv_p);
  res.gaussian_value = std::pow(res.gaussian_value, inv_p);
  res.min_vector_value = std::pow(res.min_vector_value, inv_p);
  return res;
}

ScalingCheck check_scaling_identity(const EqualExpDatum& d, const std::vector<Matrix>& m_list,
                                    const BLOptions& opts) {
  validate(d);
  if (static_cast<int>(m_list.size()) != d.m()) throw InputError("check_scaling_identity: need one M_j per map");
  EqualExpDatum scaled = d;
  double det_product = 1.0;
  for (int j = 0; j < d.m(); ++j) {
    const Matrix& mj = m_list[j];
    if (mj.rows() != d.n - d.k || mj.cols() != d.n - d.k) {
      throw InputError("check_scaling_identity: M_" + std::to_string(j) + " has the wrong size");
    }
    const double dm = det(mj);
    const double scale = std::max(mj.cwiseAbs().maxCoeff(), 1e-300);
    if (std::abs(dm) <= 1e-12 * std::pow(scale, mj.rows())) {
      throw InputError("check_scaling_identity: M_" + std::to_string(j) + " is singular");
    }
    det_product *= std::abs(dm);
    scaled.maps[j] = mj * d.maps[j];
  }
  const BLResult base = bl_weight_root(d, opts);
  const BLResult moved = bl_weight_root(scaled, opts);
  ScalingCheck out;
  out.lhs = moved.value;
  out.rhs = base.value * det_product;
  out.discrepancy = relative_difference(out.lhs, out.rhs);
  out.converged = base.converged && moved.converged;
  return out;
}

EqualExpDatum loomis_whitney(int n) {
  if (n < 2) throw InputError("loomis_whitney: n must be at least 2");
  EqualExpDatum d;
  d.n = n;
  d.k = 1;
  for (int j = 0; j < n; ++j) {
    Matrix pi = Matrix::Zero(n - 1, n);
    int row = 0;
    for (int i = 0; i < n; ++i)
      if (i != j) pi(row++, i) = 1.0;
    d.maps.push_back(pi);
  }
  return d;
}

}  // namespace radonbl
