#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "radonbl/bl_core.hpp"
#include "radonbl/invariant_poly.hpp"
#include "radonbl/linops.hpp"
#include "radonbl/models.hpp"
#include "radonbl/rng.hpp"

using namespace radonbl;

namespace {

std::vector<Matrix> random_maps(const BlockPolySpec& spec, Rng& rng) {
  std::vector<Matrix> maps;
  for (int j = 0; j < spec.m(); ++j) maps.push_back(oracle::random_matrix(spec.row_height(), spec.n(), rng));
  return maps;
}

Matrix row(double a, double b) {
  Matrix m(1, 2);
  m << a, b;
  return m;
}

}  // namespace

TEST_CASE("assemble: single placement and zero coefficients") {
  const BlockPolySpec single(2, 0, 1, 1, {Placement{0, 0, 0, 1.0}});
  Matrix pi(2, 2);
  pi << 1, 2, 3, 4;
  CHECK((assemble(single, {pi}) - pi).norm() == 0.0);
  CHECK(eval_phi(single, {pi}) == doctest::Approx(-2.0));
  const BlockPolySpec zero(2, 0, 1, 1, {Placement{0, 0, 0, 0.0}});
  CHECK(assemble(zero, {pi}).norm() == 0.0);
  CHECK(eval_phi(zero, {pi}) == 0.0);
}

TEST_CASE("assemble: moment-curve layout places each map only in its blocks") {
  const BlockPolySpec spec = moment_curve_spec(3);
  CHECK(spec.size() == 6);
  Rng rng(4);
  const std::vector<Matrix> maps = random_maps(spec, rng);
  const Matrix a = assemble(spec, maps);
  Matrix expected = Matrix::Zero(6, 6);
  for (const Placement& pl : spec.placements())
    expected.block(pl.block_row * spec.row_height(), pl.block_col * spec.n(), spec.row_height(), spec.n()) +=
        pl.coeff * maps[pl.map];
  CHECK((a - expected).norm() == 0.0);
  // every block row is owned by one map, and the bottom row repeats the last map
  for (int r = 0; r < spec.block_rows(); ++r) {
    for (const Placement& pl : spec.placements())
      if (pl.block_row == r) CHECK(pl.map == spec.row_map(r));
  }
  CHECK(spec.common_degree() == 2);
}

TEST_CASE("eval_phi: fixed values") {
  const BlockPolySpec spec = moment_curve_spec(3);
  CHECK(eval_phi(spec, std::vector<Matrix>(3, Matrix::Zero(2, 3))) == 0.0);
  CHECK(std::abs(std::abs(eval_phi(spec, moment_curve_maps({0, 1, 2}, 3))) - 12.0) <= 1e-9);
  const BlockPolySpec codim = max_codim_spec(1);
  CHECK(std::abs(eval_phi(codim, {row(0, 1), row(1, 1)})) == doctest::Approx(1.0));
  CHECK_THROWS_AS(eval_phi(spec, moment_curve_maps({0, 1}, 3)), InputError);
}

TEST_CASE("moment_curve_pi") {
  for (int n : {2, 3, 4}) {
    const Matrix p = moment_curve_pi(0.0, n);
    CHECK(p.col(0).norm() == 0.0);
    CHECK((p.rightCols(n - 1) - Matrix::Identity(n - 1, n - 1)).norm() == 0.0);
  }
  const Matrix p = moment_curve_pi(2.0, 3);
  CHECK(p(0, 0) == doctest::Approx(4.0));
  CHECK(p(1, 0) == doctest::Approx(-12.0));
  double product = 1.0;
  const std::vector<double> t{0.0, 1.0, 2.0};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) product *= std::abs(t[i] - t[j]);
  CHECK(std::abs(eval_phi(moment_curve_spec(3), moment_curve_maps(t, 3))) / 6.0 == doctest::Approx(product));
}

TEST_CASE("quadratic model layout") {
  const QuadraticModel model = make_quadratic_model(2, 1, Matrix::Ones(1, 1));
  const BlockPolySpec spec = quadratic_model_spec(model);
  CHECK(spec.size() == 2);
  Matrix a(1, 2), b(1, 2);
  a << 2, 3;
  b << 5, 7;
  // for c = 1 the determinant is [A_1 B_1; A_2 B_2] up to sign
  CHECK(std::abs(eval_phi(spec, {a, b})) == doctest::Approx(std::abs(2.0 * 7.0 - 3.0 * 5.0)));
  const Matrix layout = quadratic_layout(model, {a, b});
  CHECK(std::abs(layout.determinant()) == doctest::Approx(1.0));
  CHECK_FALSE(upper_right_on_diagonal(2, 1, 0, 1));
}

TEST_CASE("homogeneity") {
  Rng rng(8);
  const BlockPolySpec spec = moment_curve_spec(3);
  const std::vector<Matrix> maps = random_maps(spec, rng);
  CHECK(check_homogeneity(spec, maps, {1.0, 1.0, 1.0}) == 0.0);
  CHECK(check_homogeneity(spec, maps, {2.0, 2.0, 2.0}) <= 1e-9);
  CHECK(check_homogeneity(spec, maps, {0.0, -1.5, 3.0}) <= 1e-12);
}

TEST_CASE("SL invariance") {
  Rng rng(12);
  const BlockPolySpec moment = moment_curve_spec(3);
  CHECK(check_sl_invariance(moment, random_maps(moment, rng), 1, 0) == 0.0);
  CHECK(check_sl_invariance(moment, random_maps(moment, rng), 2) <= 1e-8);
  const BlockPolySpec quad = quadratic_model_spec(make_quadratic_model(3, 2, Matrix::Ones(1, 2)));
  CHECK(check_sl_invariance(quad, random_maps(quad, rng), 3) <= 1e-8);
  const BlockPolySpec codim = max_codim_spec(2);
  CHECK(check_sl_invariance(codim, random_maps(codim, rng), 4) <= 1e-8);
}

TEST_CASE("estimate_phi_norm on the 2x2 Hilbert-Schmidt ball") {
  const BlockPolySpec single(2, 0, 1, 1, {Placement{0, 0, 0, 1.0}});
  // dense grid oracle: max |det| over ||pi||_HS <= 1
  double grid_max = 0.0;
  const int steps = 40;
  for (int a = 0; a <= steps; ++a)
    for (int b = 0; b <= steps; ++b)
      for (int c = 0; c <= steps; ++c) {
        const double x = -1.0 + 2.0 * a / steps, y = -1.0 + 2.0 * b / steps, z = -1.0 + 2.0 * c / steps;
        const double rest = 1.0 - x * x - y * y - z * z;
        if (rest < 0.0) continue;
        grid_max = std::max(grid_max, std::abs(x * std::sqrt(rest) - y * z));
      }
  CHECK(grid_max == doctest::Approx(0.5).epsilon(1e-3));
  const double est = estimate_phi_norm(single, 3, 2000);
  CHECK(est <= 0.5 + 1e-12);
  CHECK(est >= 0.5 * (1.0 - 1e-3));
  const BlockPolySpec zero(2, 0, 1, 1, {Placement{0, 0, 0, 0.0}});
  CHECK(estimate_phi_norm(zero, 3, 100) == 0.0);
}

TEST_CASE("weight_lower_bound stays below the computed weight") {
  const BlockPolySpec spec = moment_curve_spec(2);
  CHECK(weight_lower_bound(spec, std::vector<Matrix>(2, Matrix::Zero(1, 2)), 1.0) == 0.0);
  const std::vector<Matrix> maps = moment_curve_maps({0.0, 1.0}, 2);
  const double norm = estimate_phi_norm(spec, 1, 2000);
  const double w = bl_weight_root(EqualExpDatum{2, 1, maps}).value;
  CHECK(weight_lower_bound(spec, maps, norm) <= w * (1.0 + 1e-3));

  const QuadraticModel model = make_quadratic_model(3, 2, Matrix::Ones(1, 2));
  const BlockPolySpec qs = quadratic_model_spec(model);
  Rng rng(5);
  const std::vector<Matrix> qmaps = random_maps(qs, rng);
  const double qnorm = estimate_phi_norm(qs, 5, 2000);
  const BLResult qw = bl_weight_root(EqualExpDatum{3, 2, qmaps});
  REQUIRE(qw.converged);
  CHECK(weight_lower_bound(qs, qmaps, qnorm) <= qw.value * (1.0 + 1e-3));
}

TEST_CASE("contraction identity: fixed families") {
  ContractionFamily one;
  one.maps = {Matrix::Constant(1, 1, 2.5)};
  one.map_of = {0};
  one.I = {{0}};
  one.J = {{0}};
  const ContractionResult r1 = contraction_identity_check(one);
  CHECK(r1.enumerated == doctest::Approx(2.5));
  CHECK(r1.difference == 0.0);

  Rng rng(3);
  ContractionFamily two;
  two.maps = {oracle::random_matrix(2, 2, rng)};
  two.map_of = {0, 0};
  two.I = {{0, 1}};
  two.J = {{0, 1}};
  const ContractionResult r2 = contraction_identity_check(two);
  CHECK(r2.difference <= 1e-10);
  CHECK(std::abs(r2.enumerated) == doctest::Approx(2.0 * std::abs(two.maps[0].determinant())));

  Rng rng9(9);
  ContractionFamily four;
  four.maps = {oracle::random_matrix(2, 2, rng9), oracle::random_matrix(2, 2, rng9)};
  four.map_of = {0, 0, 1, 1};
  four.I = {{0, 1}, {2, 3}};
  four.J = {{0, 2}, {1, 3}};
  CHECK(contraction_identity_check(four).difference <= 1e-9);
}

TEST_CASE("contraction identity: generated families") {
  const std::vector<ContractionFamily> fams = contraction_families(6, 17);
  CHECK(fams.size() > 10);
  for (const ContractionFamily& f : fams) CHECK(contraction_identity_check(f).difference <= 1e-9);
}
