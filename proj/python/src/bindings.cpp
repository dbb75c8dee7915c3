#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "radonbl/bl_core.hpp"
#include "radonbl/ift_newton.hpp"
#include "radonbl/invariant_poly.hpp"
#include "radonbl/linops.hpp"
#include "radonbl/nonconc.hpp"
#include "radonbl/radon_lab.hpp"

namespace py = pybind11;
using namespace radonbl;

namespace {

EqualExpDatum make_datum(int n, int k, const std::vector<Matrix>& maps) {
  EqualExpDatum d;
  d.n = n;
  d.k = k;
  d.maps = maps;
  validate(d);
  return d;
}

py::dict bl_dict(const BLResult& r) {
  py::dict out;
  out["value"] = r.value;
  out["iterations"] = r.iterations;
  out["converged"] = r.converged;
  out["zero_weight"] = r.zero_weight;
  out["regularized"] = r.regularized;
  out["gaussian_value"] = r.gaussian_value;
  out["min_vector_value"] = r.min_vector_value;
  out["witness"] = r.witness;
  return out;
}

ModelOperator operator_for(const std::string& kind, int n, int k, const Matrix& lambda) {
  if (kind == "moment") return moment_curve_operator(n);
  if (kind == "max-codim") return max_codim_operator(k);
  if (kind == "quadratic") return quadratic_operator(make_quadratic_model(n, k, lambda));
  throw InputError("unknown operator kind '" + kind + "'");
}

IncidenceModel incidence_for(const std::string& kind, int n, int k, const Matrix& lambda) {
  if (kind == "moment") return moment_curve_incidence(n);
  if (kind == "max-codim") return max_codim_incidence(k);
  if (kind == "quadratic") return quadratic_incidence(make_quadratic_model(n, k, lambda));
  throw InputError("unknown incidence kind '" + kind + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Brascamp-Lieb weights, invariant polynomials and Radon-like operator experiments";
  m.attr("__version__") = RADONBL_VERSION;

  static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InputError& e) {
      PyErr_SetString(input_error.ptr(), e.what());
    } catch (const NumericalError& e) {
      PyErr_SetString(numerical_error.ptr(), e.what());
    }
  });

  m.def("det", &det, py::arg("matrix"));
  m.def(
      "upper_triangularize",
      [](const Matrix& t) {
        const TriangularizationResult r = upper_triangularize(t);
        return py::make_tuple(r.E, r.U);
      },
      py::arg("matrix"), "returns (E, U) with det E = 1 and T E = U upper triangular");

  m.def(
      "bl_constant",
      [](int n, int k, const std::vector<Matrix>& maps, int max_iters, double tol) {
        return bl_dict(bl_constant_alternating(to_bl_datum(make_datum(n, k, maps)), BLOptions{max_iters, tol}));
      },
      py::arg("n"), py::arg("k"), py::arg("maps"), py::arg("max_iters") = 20000, py::arg("tol") = 1e-13,
      "BL^-1 of an equal-exponent datum by alternating scaling");
  m.def(
      "bl_weight_root",
      [](int n, int k, const std::vector<Matrix>& maps, int max_iters, double tol) {
        return bl_dict(bl_weight_root(make_datum(n, k, maps), BLOptions{max_iters, tol}));
      },
      py::arg("n"), py::arg("k"), py::arg("maps"), py::arg("max_iters") = 20000, py::arg("tol") = 1e-13);
  m.def(
      "loomis_whitney",
      [](int n) {
        const EqualExpDatum d = loomis_whitney(n);
        return py::make_tuple(d.n, d.k, d.maps);
      },
      py::arg("n"), "(n, k, maps) for the coordinate projections");
  m.def(
      "check_scaling_identity",
      [](int n, int k, const std::vector<Matrix>& maps, const std::vector<Matrix>& m_list) {
        const ScalingCheck s = check_scaling_identity(make_datum(n, k, maps), m_list);
        return py::make_tuple(s.lhs, s.rhs, s.discrepancy);
      },
      py::arg("n"), py::arg("k"), py::arg("maps"), py::arg("m_list"));

  py::class_<BlockPolySpec>(m, "BlockPolySpec")
      .def_property_readonly("n", &BlockPolySpec::n)
      .def_property_readonly("m", &BlockPolySpec::m)
      .def_property_readonly("row_height", &BlockPolySpec::row_height);
  m.def("moment_curve_spec", &moment_curve_spec, py::arg("n"));
  m.def("staircase_spec", &staircase_spec, py::arg("n"), py::arg("k"), py::arg("m"));
  m.def("max_codim_spec", &max_codim_spec, py::arg("k"));
  m.def(
      "quadratic_model_spec",
      [](int n, int k, const Matrix& lambda) { return quadratic_model_spec(make_quadratic_model(n, k, lambda)); },
      py::arg("n"), py::arg("k"), py::arg("lambda_"));
  m.def("moment_curve_maps", &moment_curve_maps, py::arg("t"), py::arg("n"));
  m.def("assemble", &assemble, py::arg("spec"), py::arg("maps"));
  m.def("eval_phi", &eval_phi, py::arg("spec"), py::arg("maps"));

  m.def(
      "density_k",
      [](int n, int k, const Matrix& lambda) { return density_K(make_quadratic_model(n, k, lambda)); },
      py::arg("n"), py::arg("k"), py::arg("lambda_"));
  m.def(
      "minor_condition",
      [](int n, int k, const Matrix& lambda) { return minor_condition(make_quadratic_model(n, k, lambda)); },
      py::arg("n"), py::arg("k"), py::arg("lambda_"));
  m.def(
      "derivative_identity",
      [](int n, int k, const Matrix& lambda, const Matrix& u, const Vector& base) {
        const DerivativeCheck d = derivative_identity_check(make_quadratic_model(n, k, lambda), u, base);
        return py::make_tuple(d.lhs, d.rhs, d.discrepancy);
      },
      py::arg("n"), py::arg("k"), py::arg("lambda_"), py::arg("u"), py::arg("base"));
  m.def(
      "convprop",
      [](const Vector& weights, const Matrix& basis, double delta) {
        SampleSpace s;
        s.weights = weights;
        s.basis = basis;
        s.points = Matrix::Zero(basis.rows(), 0);
        const ConvpropCertificate c = convprop_construct(s, delta);
        py::dict out;
        out["selected"] = c.selected;
        out["witness"] = c.witness;
        out["j0"] = c.j0;
        out["selected_measure"] = c.selected_measure;
        out["total_measure"] = c.total_measure;
        return out;
      },
      py::arg("weights"), py::arg("basis"), py::arg("delta"));
  m.def("separated_points", &separated_points, py::arg("intervals"), py::arg("count"));

  m.def(
      "critical_exponents",
      [](const std::string& kind, int n, int k, const Matrix& lambda) {
        const ExponentPair e = critical_exponents(operator_for(kind, n, k, lambda));
        return py::make_tuple(e.p, e.q);
      },
      py::arg("kind"), py::arg("n") = 2, py::arg("k") = 1, py::arg("lambda_") = Matrix::Ones(1, 1));
  m.def(
      "knapp_sweep",
      [](const std::string& kind, int n, int k, const Matrix& lambda, const std::vector<double>& deltas,
         int samples_x, int samples_t, uint64_t seed) {
        KnappExperiment exp;
        exp.op = operator_for(kind, n, k, lambda);
        exp.exponents = critical_exponents(exp.op);
        exp.deltas = deltas;
        exp.samples_x = samples_x;
        exp.samples_t = samples_t;
        exp.seed = seed;
        const RadonExperimentResult r = knapp_sweep(exp);
        py::list rows;
        for (const KnappRecord& rec : r.records) {
          py::dict row;
          row["delta"] = rec.delta;
          row["norm_estimate"] = rec.norm_estimate;
          row["stderr"] = rec.stderr;
          row["set_measure"] = rec.set_measure;
          row["ratio"] = rec.ratio;
          rows.append(row);
        }
        return rows;
      },
      py::arg("kind"), py::arg("n") = 2, py::arg("k") = 1, py::arg("lambda_") = Matrix::Ones(1, 1),
      py::arg("deltas") = dyadic_deltas(4), py::arg("samples_x") = 20000, py::arg("samples_t") = 32,
      py::arg("seed") = 0);

  m.def(
      "newton_solve",
      [](VectorField phi, JacobianField jac, const Vector& x0, double r, const Matrix& R, double c, int max_iters,
         double tol, int contraction_grid) {
        NewtonProblem p;
        p.phi = std::move(phi);
        p.jacobian = std::move(jac);
        p.x0 = x0;
        p.r = r;
        p.R = R;
        p.c = c;
        NewtonOptions opts;
        opts.max_iters = max_iters;
        opts.tol = tol;
        opts.contraction_grid = contraction_grid;
        const NewtonResult res = newton_solve(p, opts);
        py::dict out;
        out["root"] = res.root;
        out["residuals"] = res.certificate.residuals;
        out["distance"] = res.certificate.distance;
        out["distance_bound"] = res.certificate.distance_bound;
        out["iterations"] = res.certificate.iterations;
        return out;
      },
      py::arg("phi"), py::arg("jacobian"), py::arg("x0"), py::arg("r"), py::arg("R"), py::arg("c"),
      py::arg("max_iters") = 200, py::arg("tol") = 1e-12, py::arg("contraction_grid") = 3,
      "certified Newton iteration x <- x - R Phi(x) on the cube of radius r around x0");
  m.def(
      "normalize_defining_function",
      [](const std::string& kind, int n, int k, const Matrix& lambda, const Vector& x, const Vector& t) {
        const IncidenceModel model = incidence_for(kind, n, k, lambda);
        const Vector y = model.fiber_point(x, t);
        const NormalizedDefining nd = normalize_defining_function(model, x, y);
        py::dict out;
        out["y"] = y;
        out["value"] = nd.value;
        out["dx"] = nd.dx;
        out["gram_residual"] = nd.gram_residual;
        out["det_ratio"] = nd.det_ratio;
        out["det_normalized"] = nd.det_normalized;
        return out;
      },
      py::arg("kind"), py::arg("n"), py::arg("k"), py::arg("lambda_"), py::arg("x"), py::arg("t"));
}
