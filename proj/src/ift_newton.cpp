#include "radonbl/ift_newton.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <string>

#include "radonbl/linops.hpp"
#include "radonbl/parallel.hpp"
#include "radonbl/rng.hpp"

namespace radonbl {

namespace {

// rounding in D Phi R - I; a claimed c = 0 must survive an exactly affine map
constexpr double kContractionSlack = 1e-12;

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

Matrix central_difference_jacobian(const VectorField& phi, const Vector& x, double relative_step) {
  const Vector f0 = phi(x);
  Matrix jac(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = relative_step * std::max(1.0, std::abs(x(i)));
    Vector plus = x, minus = x;
    plus(i) += h;
    minus(i) -= h;
    jac.col(i) = (phi(plus) - phi(minus)) / (plus(i) - minus(i));
  }
  return jac;
}

Matrix evaluate_jacobian(const NewtonProblem& p, const Vector& x) {
  return p.jacobian ? p.jacobian(x) : central_difference_jacobian(p.phi, x);
}

void validate(const NewtonProblem& p) {
  if (!p.phi) throw InputError("newton problem: Phi is missing");
  const Eigen::Index n = p.x0.size();
  if (n < 1) throw InputError("newton problem: x0 is empty");
  if (p.R.rows() != n || p.R.cols() < 1 || p.R.cols() > n) {
    throw InputError("newton problem: R must be n x (n-k) with 0 <= k < n");
  }
  if (!(p.r > 0.0) || !std::isfinite(p.r)) throw InputError("newton problem: r must be positive");
  if (!(p.c >= 0.0 && p.c < 1.0)) throw InputError("newton problem: c must lie in [0, 1)");
  if (!(p.C >= 0.0)) throw InputError("newton problem: C must be nonnegative");
  const Vector f0 = p.phi(p.x0);
  if (f0.size() != p.R.cols()) throw InputError("newton problem: Phi must map into R^{n-k}");
}

namespace {

// Cell centers of Q_{x0,r}, grid per axis.
std::vector<Vector> box_nodes(const Vector& x0, double r, int grid) {
  const Eigen::Index n = x0.size();
  long total = 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    total *= grid;
    if (total > 200000) throw InputError("contraction grid too fine: more than 200000 nodes");
  }
  std::vector<Vector> nodes;
  nodes.reserve(total);
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    Vector x = x0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int g = static_cast<int>(rest % grid);
      rest /= grid;
      x(i) += r * (-1.0 + (2.0 * g + 1.0) / grid);
    }
    nodes.push_back(x);
  }
  return nodes;
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

// Orthonormal basis of range(R)^perp.
Matrix complement_basis(const Matrix& r) {
  Eigen::HouseholderQR<Matrix> qr(r);
  const Matrix q = qr.householderQ() * Matrix::Identity(r.rows(), r.rows());
  return q.rightCols(r.rows() - r.cols());
}

}  // namespace

double sampled_contraction(const NewtonProblem& p, int grid) {
  validate(p);
  if (grid < 1) throw InputError("sampled_contraction: grid must be positive");
  const std::vector<Vector> nodes = box_nodes(p.x0, p.r, grid);
  std::vector<double> values(nodes.size());
  const Matrix eye = Matrix::Identity(p.R.cols(), p.R.cols());
  parallel_for(nodes.size(), [&](std::size_t i) {
    values[i] = linf_operator_norm(evaluate_jacobian(p, nodes[i]) * p.R - eye);
  });
  return max_of(values);
}

double sampled_transverse_bound(const NewtonProblem& p, int grid) {
  validate(p);
  if (grid < 1) throw InputError("sampled_transverse_bound: grid must be positive");
  const Matrix q = complement_basis(p.R);
  const Eigen::Index k = q.cols();
  if (k == 0) return 0.0;
  // directions: the basis vectors and seeded random combinations, each
  // rescaled to unit l^inf norm in R^n
  std::vector<Vector> dirs;
  for (Eigen::Index i = 0; i < k; ++i) dirs.push_back(q.col(i));
  Rng rng(0x7472616e73ULL);
  for (int i = 0; i < (k == 1 ? 0 : 64); ++i) {
    Vector w(k);
    for (Eigen::Index j = 0; j < k; ++j) w(j) = rng.normal();
    dirs.push_back(q * w);
  }
  for (Vector& v : dirs) v /= linf_norm(v);
  const std::vector<Vector> nodes = box_nodes(p.x0, p.r, grid);
  std::vector<double> values(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const Matrix jac = evaluate_jacobian(p, nodes[i]);
    double best = 0.0;
    for (const Vector& v : dirs) best = std::max(best, linf_norm(jac * v));
    values[i] = best;
  });
  return max_of(values);
}

NewtonResult newton_solve(const NewtonProblem& p, const NewtonOptions& opts) {
  validate(p);
  if (opts.max_iters < 1) throw InputError("newton_solve: max_iters must be positive");
  const double r_norm = linf_operator_norm(p.R);
  if (!(r_norm > 0.0)) throw InputError("newton_solve: R vanishes");

  NewtonResult out;
  NewtonCertificate& cert = out.certificate;
  if (opts.contraction_grid > 0) {
    cert.sampled_contraction = sampled_contraction(p, opts.contraction_grid);
    if (cert.sampled_contraction > p.c + kContractionSlack) {
      throw InputError("newton_solve: sampled ||D Phi R - I|| = " + format_real(cert.sampled_contraction) +
                       " exceeds c = " + format_real(p.c));
    }
  }

  Vector x = p.x0;
  Vector fx = p.phi(x);
  const double f0 = linf_norm(fx);
  if (!(f0 < p.r / r_norm * (1.0 - p.c))) {
    throw InputError("newton_solve: |Phi(x0)| = " + format_real(f0) + " is not below r ||R||^-1 (1-c) = " +
                     format_real(p.r / r_norm * (1.0 - p.c)));
  }
  const double floor = 64.0 * DBL_EPSILON * std::max(1.0, f0);
  cert.residuals.push_back(f0);
  int j = 0;
  while (cert.residuals.back() > opts.tol) {
    if (j == opts.max_iters) {
      throw NumericalError("newton_solve: no convergence after " + std::to_string(j) + " steps, |Phi| = " +
                           format_real(cert.residuals.back()));
    }
    ++j;
    x -= p.R * fx;
    if (linf_norm(x - p.x0) >= p.r) {
      throw NumericalError("newton_solve: iterate " + std::to_string(j) + " left the box Q_{x0,r}");
    }
    fx = p.phi(x);
    const double f = linf_norm(fx);
    const double allowed = std::pow(p.c + 1e-9, j) * f0 + floor;
    cert.residuals.push_back(f);
    if (!(f <= allowed)) {
      throw NumericalError("newton_solve: decay violated at step " + std::to_string(j) + ": |Phi| = " +
                           format_real(f) + " > " + format_real(allowed) + " (c is too small)");
    }
    if (f <= floor && f > opts.tol) {
      // at the roundoff floor: one more step cannot make progress
      cert.iterations = j;
      break;
    }
  }
  cert.iterations = j;
  cert.distance = linf_norm(x - p.x0);
  cert.distance_bound = r_norm / (1.0 - p.c) * f0;
  if (cert.distance > cert.distance_bound * (1.0 + 1e-9) + floor) {
    throw NumericalError("newton_solve: |x - x0| exceeds ||R|| (1-c)^-1 |Phi(x0)|");
  }
  out.root = x;
  return out;
}

FiberMeasure fiber_measure_lower_bound(const NewtonProblem& p, int grid, const NewtonOptions& opts) {
  validate(p);
  if (grid < 1) throw InputError("fiber_measure_lower_bound: grid must be positive");
  const Eigen::Index n = p.x0.size();
  const Eigen::Index k = n - p.R.cols();
  if (k < 1) throw InputError("fiber_measure_lower_bound: needs k > 0");
  const double r_norm = linf_operator_norm(p.R);
  const double f0 = linf_norm(p.phi(p.x0));
  if (!(f0 < p.r / 3.0 / r_norm * (1.0 - p.c))) {
    throw InputError("fiber_measure_lower_bound: |Phi(x0)| is not below (r/3) ||R||^-1 (1-c)");
  }

  FiberMeasure out;
  if (opts.contraction_grid > 0) {
    out.sampled_contraction = sampled_contraction(p, opts.contraction_grid);
    if (out.sampled_contraction > p.c + kContractionSlack) throw InputError("fiber_measure_lower_bound: sampled contraction exceeds c");
    out.sampled_transverse = sampled_transverse_bound(p, opts.contraction_grid);
    if (out.sampled_transverse > p.C * (1.0 + 1e-9) + 1e-12) {
      throw InputError("fiber_measure_lower_bound: sampled transverse derivative exceeds C");
    }
  }
  const double factor = p.C > 0.0 ? std::min(0.5, (1.0 - p.c) / (6.0 * p.C * r_norm)) : 0.5;
  out.parameter_radius = p.r * factor;
  out.guaranteed = std::pow(out.parameter_radius, static_cast<double>(k));

  // parameter set {w : |Q w| <= rho}; k = 1 is an exact interval, otherwise
  // the enclosing box |w|_inf <= sqrt(n) rho is cell-counted
  const Matrix q = complement_basis(p.R);
  const double half = k == 1 ? out.parameter_radius / q.cwiseAbs().maxCoeff()
                             : std::sqrt(static_cast<double>(n)) * out.parameter_radius;
  const double h = 2.0 * half / grid;
  long total = 1;
  for (Eigen::Index i = 0; i < k; ++i) {
    total *= grid;
    if (total > 1000000) throw InputError("fiber_measure_lower_bound: grid too fine");
  }
  std::vector<Vector> centers;
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    Vector w(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      w(i) = -half + (static_cast<double>(rest % grid) + 0.5) * h;
      rest /= grid;
    }
    const Vector v = q * w;
    if (k == 1 || linf_norm(v) <= out.parameter_radius) centers.push_back(p.x0 + v);
  }

  NewtonOptions sub = opts;
  sub.contraction_grid = 0;  // the big box was sampled above
  std::vector<Vector> roots(centers.size());
  std::vector<std::string> failures(centers.size());
  parallel_for(centers.size(), [&](std::size_t i) {
    NewtonProblem node = p;
    node.x0 = centers[i];
    node.r = 0.5 * p.r;
    try {
      roots[i] = newton_solve(node, sub).root;
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (!failures[i].empty()) {
      throw NumericalError("fiber_measure_lower_bound: node " + std::to_string(i) + " failed: " + failures[i]);
    }
  }
  out.roots = roots;
  out.nodes_solved = static_cast<int>(roots.size());
  out.measure = out.nodes_solved * std::pow(h, static_cast<double>(k));
  if (k == 1 && out.measure < out.guaranteed * (1.0 - 1e-12)) {
    throw NumericalError("fiber_measure_lower_bound: measure fell below the guaranteed bound");
  }
  return out;
}

IncidenceModel moment_curve_incidence(int n) {
  if (n < 2) throw InputError("moment_curve_incidence: n must be at least 2");
  IncidenceModel m;
  m.name = "moment_curve";
  m.n = n;
  m.k = 1;
  m.degree = n;
  m.rho = [n](const Vector& x, const Vector& y) {
    Vector out(n - 1);
    for (int i = 2; i <= n; ++i) out(i - 2) = x(i - 1) - y(i - 1) + std::pow(y(0) - x(0), i);
    return out;
  };
  m.dx = [n](const Vector& x, const Vector& y) {
    Matrix d = Matrix::Zero(n - 1, n);
    for (int i = 2; i <= n; ++i) {
      d(i - 2, 0) = -i * std::pow(y(0) - x(0), i - 1);
      d(i - 2, i - 1) = 1.0;
    }
    return d;
  };
  m.dy = [n](const Vector& x, const Vector& y) {
    Matrix d = Matrix::Zero(n - 1, n);
    for (int i = 2; i <= n; ++i) {
      d(i - 2, 0) = i * std::pow(y(0) - x(0), i - 1);
      d(i - 2, i - 1) = -1.0;
    }
    return d;
  };
  m.fiber_point = [n](const Vector& x, const Vector& t) {
    Vector y = x;
    for (int i = 1; i <= n; ++i) y(i - 1) += std::pow(t(0), i);
    return y;
  };
  return m;
}

IncidenceModel quadratic_incidence(const QuadraticModel& model) {
  validate(model);
  IncidenceModel m;
  m.name = "quadratic";
  m.n = model.n;
  m.k = model.k;
  m.degree = 2;
  const int n = model.n, k = model.k, c = model.c();
  const Matrix lam = model.lambda;
  m.rho = [=](const Vector& x, const Vector& y) {
    Vector out(c);
    for (int j = 0; j < c; ++j) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += lam(j, i) * (y(i) - x(i)) * (y(i) - x(i));
      out(j) = -y(k + j) + x(k + j) + 0.5 * s;
    }
    return out;
  };
  m.dx = [=](const Vector& x, const Vector& y) {
    Matrix d = Matrix::Zero(c, n);
    for (int j = 0; j < c; ++j) {
      for (int i = 0; i < k; ++i) d(j, i) = lam(j, i) * (x(i) - y(i));
      d(j, k + j) = 1.0;
    }
    return d;
  };
  m.dy = [=](const Vector& x, const Vector& y) {
    Matrix d = Matrix::Zero(c, n);
    for (int j = 0; j < c; ++j) {
      for (int i = 0; i < k; ++i) d(j, i) = lam(j, i) * (y(i) - x(i));
      d(j, k + j) = -1.0;
    }
    return d;
  };
  m.fiber_point = [=](const Vector& x, const Vector& t) {
    Vector y = x;
    for (int i = 0; i < k; ++i) y(i) += t(i);
    for (int j = 0; j < c; ++j) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += lam(j, i) * t(i) * t(i);
      y(k + j) += 0.5 * s;
    }
    return y;
  };
  return m;
}

IncidenceModel max_codim_incidence(int k) {
  if (k < 1) throw InputError("max_codim_incidence: k must be positive");
  IncidenceModel m;
  m.name = "max_codim";
  m.k = k;
  m.n = k + k * k;
  m.degree = 2;
  const int n = m.n;
  m.rho = [=](const Vector& x, const Vector& y) {
    Vector out(k * k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) out(i * k + j) = -y(k + i * k + j) + x(k + i * k + j) + x(i) * y(j);
    return out;
  };
  m.dx = [=](const Vector&, const Vector& y) {
    Matrix d = Matrix::Zero(k * k, n);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        d(i * k + j, i) = y(j);
        d(i * k + j, k + i * k + j) = 1.0;
      }
    return d;
  };
  m.dy = [=](const Vector& x, const Vector&) {
    Matrix d = Matrix::Zero(k * k, n);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        d(i * k + j, j) = x(i);
        d(i * k + j, k + i * k + j) = -1.0;
      }
    return d;
  };
  m.fiber_point = [=](const Vector& x, const Vector& t) {
    Vector y = x;
    for (int i = 0; i < k; ++i) y(i) += t(i);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) y(k + i * k + j) += x(i) * y(j);
    return y;
  };
  return m;
}

Matrix incidence_dx(const IncidenceModel& m, const Vector& x, const Vector& y) {
  if (m.dx) return m.dx(x, y);
  return central_difference_jacobian([&](const Vector& xx) { return m.rho(xx, y); }, x);
}

Matrix incidence_dy(const IncidenceModel& m, const Vector& x, const Vector& y) {
  if (m.dy) return m.dy(x, y);
  return central_difference_jacobian([&](const Vector& yy) { return m.rho(x, yy); }, y);
}

namespace {

Matrix normalizer(const IncidenceModel& m, const Vector& x, const Vector& y) {
  const Matrix dx = incidence_dx(m, x, y);
  const Matrix gram = dx * dx.transpose();
  if (!(det(gram) > 1e-12)) throw NumericalError("normalize_defining_function: D_x rho D_x rho^T is near singular");
  return spd_inverse_sqrt(gram, Tolerances{1e-14, 1e-9});
}

}  // namespace

NormalizedDefining normalize_defining_function(const IncidenceModel& m, const Vector& x, const Vector& y) {
  if (!m.rho) throw InputError("normalize_defining_function: rho is missing");
  if (x.size() != m.n || y.size() != m.n) throw InputError("normalize_defining_function: points must lie in R^n");
  const Vector rho = m.rho(x, y);
  if (rho.size() != m.n - m.k) throw InputError("normalize_defining_function: rho must map into R^{n-k}");
  const Matrix dx = incidence_dx(m, x, y);
  const Matrix dy = incidence_dy(m, x, y);
  const Matrix s = normalizer(m, x, y);

  NormalizedDefining out;
  out.value = s * rho;
  out.at_zero = linf_norm(rho) <= 1e-10;
  if (out.at_zero) {
    // derivatives falling on the normalizer multiply rho and vanish
    out.dx = s * dx;
  } else {
    out.dx = central_difference_jacobian([&](const Vector& xx) { return Vector(normalizer(m, xx, y) * m.rho(xx, y)); },
                                         x);
  }
  const Matrix c = m.n - m.k > 0 ? Matrix::Identity(m.n - m.k, m.n - m.k) : Matrix();
  out.gram_residual = (out.dx * out.dx.transpose() - c).cwiseAbs().maxCoeff();
  const Matrix dy_tilde = s * dy;
  out.det_ratio = det(dy * dy.transpose()) / det(dx * dx.transpose());
  out.det_normalized = det(dy_tilde * dy_tilde.transpose());
  out.det_discrepancy = relative_difference(out.det_ratio, out.det_normalized);
  if (out.at_zero) {
    if (out.gram_residual > 1e-8) {
      throw NumericalError("normalize_defining_function: rows of D_x rho~ are not orthonormal (residual " +
                           format_real(out.gram_residual) + ")");
    }
    if (out.det_discrepancy > 1e-8) throw NumericalError("normalize_defining_function: determinant ratio mismatch");
  }
  return out;
}

double normalization_kappa(int c) {
  if (c < 1) throw InputError("normalization_kappa: c must be positive");
  return 1.0 / (6.0 * std::sqrt(static_cast<double>(c)));
}

}  // namespace radonbl
