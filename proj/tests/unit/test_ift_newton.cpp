#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "radonbl/ift_newton.hpp"
#include "radonbl/linops.hpp"
#include "radonbl/models.hpp"
#include "radonbl/rng.hpp"

using namespace radonbl;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix col(double a, double b) {
  Matrix m(2, 1);
  m << a, b;
  return m;
}

NewtonProblem parabola_graph(const Vector& x0, double r, double c) {
  NewtonProblem p;
  p.phi = [](const Vector& z) { return vec({z(1) - z(0) * z(0)}); };
  p.jacobian = [](const Vector& z) {
    Matrix j(1, 2);
    j << -2.0 * z(0), 1.0;
    return j;
  };
  p.x0 = x0;
  p.r = r;
  p.R = col(0, 1);
  p.c = c;
  return p;
}

}  // namespace

TEST_CASE("newton_solve: affine in the correction direction") {
  const NewtonResult res = newton_solve(parabola_graph(vec({1.0, 0.9}), 0.5, 0.0));
  CHECK(res.certificate.iterations == 1);
  CHECK((res.root - vec({1.0, 1.0})).norm() <= 1e-15);
  CHECK(res.certificate.residuals.back() == 0.0);
}

TEST_CASE("newton_solve: scalar root in one step") {
  NewtonProblem p;
  p.phi = [](const Vector& x) { return vec({x(0) - 0.7}); };
  p.jacobian = [](const Vector&) { return Matrix::Identity(1, 1); };
  p.x0 = vec({0.6});
  p.r = 1.0;
  p.R = Matrix::Identity(1, 1);
  p.c = 0.0;
  const NewtonResult res = newton_solve(p);
  CHECK(res.root(0) == doctest::Approx(0.7));
  CHECK(res.certificate.iterations == 1);
}

TEST_CASE("newton_solve: finite-difference jacobian") {
  NewtonProblem p;
  p.phi = [](const Vector& x) { return vec({x(0) - 0.7}); };
  p.x0 = vec({0.6});
  p.r = 1.0;
  p.R = Matrix::Identity(1, 1);
  p.c = 0.0;
  // central differences are not exact, so a zero contraction constant is refused
  CHECK_THROWS_AS(newton_solve(p), InputError);
  p.c = 1e-6;
  const NewtonResult res = newton_solve(p);
  CHECK(res.root(0) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("newton_solve: geometric decay on a nonlinear curve") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    NewtonProblem p;
    p.phi = [](const Vector& z) { return vec({z(1) - std::sin(z(0) * z(1)) - 0.3}); };
    p.jacobian = [](const Vector& z) {
      const double cs = std::cos(z(0) * z(1));
      Matrix j(1, 2);
      j << -z(1) * cs, 1.0 - z(0) * cs;
      return j;
    };
    const double x = rng.uniform(-0.3, 0.3);
    p.x0 = vec({x, 0.3 + std::sin(0.3 * x) + rng.uniform(-0.02, 0.02)});
    const Matrix j0 = p.jacobian(p.x0);
    p.R = j0.transpose() / (j0 * j0.transpose())(0, 0);
    p.r = 0.1;
    p.c = 0.0;
    p.c = std::min(0.9, 1.25 * sampled_contraction(p, 5) + 1e-6);
    const NewtonResult res = newton_solve(p);
    const auto& cert = res.certificate;
    const double f0 = cert.residuals.front();
    for (std::size_t j = 0; j < cert.residuals.size(); ++j)
      CHECK(cert.residuals[j] <= std::pow(p.c, static_cast<double>(j)) * f0 + 64.0 * 2.3e-16 * std::max(1.0, f0));
    CHECK(cert.distance <= cert.distance_bound);
    CHECK(std::abs(p.phi(res.root)(0)) <= 1e-12);
  }
}

TEST_CASE("newton_solve: precondition and decay failures") {
  NewtonProblem far = parabola_graph(vec({1.0, 5.0}), 0.5, 0.0);
  CHECK_THROWS_AS(newton_solve(far), InputError);
  // a claimed contraction that the map does not honour
  NewtonProblem p;
  p.phi = [](const Vector& x) { return vec({x(0) + 0.5 * std::sin(3.0 * x(0))}); };
  p.x0 = vec({0.01});
  p.r = 1.0;
  p.R = Matrix::Identity(1, 1);
  p.c = 0.05;
  CHECK_THROWS_AS(newton_solve(p), InputError);  // sampled contraction exceeds c
  NewtonOptions skip;
  skip.contraction_grid = 0;
  CHECK_THROWS_AS(newton_solve(p, skip), NumericalError);
  NewtonProblem bad = p;
  bad.c = 1.0;
  CHECK_THROWS_AS(newton_solve(bad), InputError);
}

TEST_CASE("central differences match the analytic Jacobian") {
  const NewtonProblem p = parabola_graph(vec({0.4, 0.3}), 0.5, 0.0);
  const Matrix fd = central_difference_jacobian(p.phi, p.x0);
  CHECK((fd - p.jacobian(p.x0)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("fiber_measure_lower_bound: flat fiber") {
  NewtonProblem p;
  p.phi = [](const Vector& z) { return vec({z(1)}); };
  p.jacobian = [](const Vector&) {
    Matrix j(1, 2);
    j << 0.0, 1.0;
    return j;
  };
  p.x0 = vec({0.0, 0.0});
  p.r = 1.0;
  p.R = col(0, 1);
  p.c = 0.0;
  p.C = 0.0;
  const FiberMeasure f = fiber_measure_lower_bound(p, 8);
  CHECK(f.parameter_radius == doctest::Approx(0.5));
  CHECK(f.measure == doctest::Approx(1.0));
  CHECK(f.guaranteed == doctest::Approx(0.5));
}

TEST_CASE("fiber_measure_lower_bound: parabola and scaling of the guarantee") {
  NewtonProblem p = parabola_graph(vec({0.3, 0.09}), 0.2, 0.0);
  p.c = 1.25 * sampled_contraction(p, 5) + 1e-6;
  p.C = 1.25 * sampled_transverse_bound(p, 5) + 1e-12;
  const FiberMeasure f = fiber_measure_lower_bound(p, 16);
  CHECK(f.measure >= f.guaranteed);
  for (const Vector& root : f.roots) CHECK(std::abs(p.phi(root)(0)) <= 1e-12);

  NewtonProblem half = p;
  half.r = p.r / 2.0;
  const FiberMeasure g = fiber_measure_lower_bound(half, 16);
  CHECK(g.guaranteed == doctest::Approx(f.guaranteed / 2.0));
}

TEST_CASE("incidence models vanish on their fibers") {
  Rng rng(14);
  const std::vector<IncidenceModel> models{moment_curve_incidence(3),
                                           quadratic_incidence(make_quadratic_model(3, 2, vec({1, -2}).transpose())),
                                           max_codim_incidence(2)};
  for (const IncidenceModel& m : models) {
    for (int trial = 0; trial < 10; ++trial) {
      Vector x(m.n), t(m.k);
      for (int i = 0; i < m.n; ++i) x(i) = rng.uniform(-1, 1);
      for (int i = 0; i < m.k; ++i) t(i) = rng.uniform(-1, 1);
      const Vector y = m.fiber_point(x, t);
      CHECK(m.rho(x, y).cwiseAbs().maxCoeff() <= 1e-12);
      const Matrix dx = incidence_dx(m, x, y);
      const Matrix dy = incidence_dy(m, x, y);
      CHECK((dx - central_difference_jacobian([&](const Vector& z) { return m.rho(z, y); }, x))
                .cwiseAbs()
                .maxCoeff() <= 1e-6);
      CHECK((dy - central_difference_jacobian([&](const Vector& z) { return m.rho(x, z); }, y))
                .cwiseAbs()
                .maxCoeff() <= 1e-6);
    }
  }
}

TEST_CASE("normalize_defining_function") {
  // rho(x, y) = y - x with D_x rho = -I: already orthonormal rows
  IncidenceModel flat;
  flat.name = "flat";
  flat.n = 2;
  flat.k = 1;
  flat.degree = 1;
  flat.rho = [](const Vector& x, const Vector& y) { return vec({y(1) - x(1)}); };
  flat.fiber_point = [](const Vector& x, const Vector& t) { return vec({x(0) + t(0), x(1)}); };
  const Vector x = vec({0.2, -0.4});
  const Vector y = flat.fiber_point(x, vec({0.3}));
  const NormalizedDefining a = normalize_defining_function(flat, x, y);
  CHECK(a.at_zero);
  CHECK((a.value - flat.rho(x, y)).norm() <= 1e-15);
  CHECK(a.gram_residual <= 1e-12);

  IncidenceModel scaled = flat;
  scaled.rho = [](const Vector& x, const Vector& y) { return vec({5.0 * (y(1) - x(1))}); };
  const NormalizedDefining b = normalize_defining_function(scaled, x, y);
  CHECK((b.value - a.value).norm() <= 1e-12);
  CHECK((b.dx - a.dx).cwiseAbs().maxCoeff() <= 1e-8);

  const std::vector<IncidenceModel> models{quadratic_incidence(make_quadratic_model(2, 1, Matrix::Ones(1, 1))),
                                           quadratic_incidence(make_quadratic_model(4, 2, Matrix::Identity(2, 2))),
                                           moment_curve_incidence(3), max_codim_incidence(1)};
  Rng rng(15);
  for (const IncidenceModel& m : models) {
    Vector xx(m.n), t(m.k);
    for (int i = 0; i < m.n; ++i) xx(i) = rng.uniform(-1, 1);
    for (int i = 0; i < m.k; ++i) t(i) = rng.uniform(-1, 1);
    const NormalizedDefining nd = normalize_defining_function(m, xx, m.fiber_point(xx, t));
    CHECK(nd.at_zero);
    CHECK(nd.gram_residual <= 1e-8);
    CHECK(nd.det_discrepancy <= 1e-8);
  }
  CHECK(normalization_kappa(1) == doctest::Approx(1.0 / 6.0));
}
