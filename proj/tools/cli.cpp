#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <utility>

#include "CLI11.hpp"
#include "radonbl/ift_newton.hpp"
#include "radonbl/invariant_poly.hpp"
#include "radonbl/linops.hpp"
#include "radonbl/nonconc.hpp"
#include "radonbl/rng.hpp"

namespace radonbl::tools {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json matrix_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i).transpose()));
  return a;
}

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), v.size()); }

QuadraticModel parabola_model() { return make_quadratic_model(2, 1, Matrix::Ones(1, 1)); }

int parse_suffix(const std::string& name, const std::string& prefix) {
  if (name.rfind(prefix, 0) != 0) return -1;
  const std::string rest = name.substr(prefix.size());
  if (rest.size() != 1 || rest[0] < '2' || rest[0] > '4') return -1;
  return rest[0] - '0';
}

std::string joined_names() {
  std::string s;
  for (const auto& n : named_data()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

double parse_real(const std::string& text, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) throw InputError(std::string(what) + ": not a number: " + text);
  return v;
}

int parse_count(const std::string& text, const char* what) {
  const double v = parse_real(text, what);
  if (!(v >= 1.0) || v > 1e9 || v != std::floor(v)) throw InputError(std::string(what) + " must be a positive integer");
  return static_cast<int>(v);
}

struct ModelArgs {
  std::string model = "quadratic";
  std::string datum;
  int n = 2;
  int k = 1;
  std::string lambda;

  void attach(CLI::App* app) {
    app->add_option("--model", model, "quadratic, parabola, moment or max-codim")
        ->check(CLI::IsMember({"quadratic", "parabola", "moment", "max-codim"}));
    app->add_option("--datum", datum, "named data (overrides --model)");
    app->add_option("--n", n, "ambient dimension");
    app->add_option("--k", k, "fiber dimension");
    app->add_option("--lambda", lambda, "c x k coefficient matrix, rows separated by ';'");
  }

  QuadraticModel quadratic() const {
    if (model == "parabola" || datum == "parabola") return parabola_model();
    if (model != "quadratic") throw InputError("this command needs a quadratic model");
    if (lambda.empty()) throw InputError("--lambda is required for the quadratic model");
    return make_quadratic_model(n, k, parse_matrix(lambda));
  }

  ModelOperator op() const {
    if (!datum.empty()) return named_operator(datum);
    if (model == "moment") return moment_curve_operator(n);
    if (model == "max-codim") return max_codim_operator(k);
    return quadratic_operator(quadratic());
  }

  IncidenceModel incidence() const {
    const ModelOperator o = op();
    switch (o.kind) {
      case OperatorKind::moment_curve:
        return moment_curve_incidence(o.n);
      case OperatorKind::max_codim:
        return max_codim_incidence(o.k);
      case OperatorKind::quadratic:
        break;
    }
    return quadratic_incidence(o.quad);
  }
};

Vector point_or_zero(const std::vector<double>& v, int n, const char* what) {
  if (v.empty()) return Vector::Zero(n);
  if (static_cast<int>(v.size()) != n) throw InputError(std::string(what) + " must have " + std::to_string(n) + " entries");
  return to_vector(v);
}

struct Common {
  uint64_t seed = 0;
  std::string out_path;
};

// ---- bl ----

struct BlArgs {
  std::string datum;
  std::string maps;
  int max_iters = 20000;
  double tol = 1e-13;
};

EqualExpDatum bl_input(const BlArgs& a, std::string& label) {
  if (!a.datum.empty() && !a.maps.empty()) throw InputError("give either --datum or --maps");
  if (!a.datum.empty()) {
    label = a.datum;
    return named_datum(a.datum);
  }
  if (a.maps.empty()) throw InputError("give --datum or --maps");
  EqualExpDatum d;
  d.maps = parse_maps(a.maps);
  d.n = static_cast<int>(d.maps.front().cols());
  d.k = d.n - static_cast<int>(d.maps.front().rows());
  label = "custom";
  return d;
}

int bl_compute(const BlArgs& a, const Common& c, std::ostream& out) {
  std::string label;
  const EqualExpDatum d = bl_input(a, label);
  validate(d);
  const BLResult r = bl_constant_alternating(to_bl_datum(d), BLOptions{a.max_iters, a.tol});
  const Rational p = d.p();
  const double root = std::pow(r.value, 1.0 / p.value());
  out << "bl compute " << label << ": value " << fmt(r.value) << " weight_root " << fmt(root) << " iterations "
      << r.iterations << (r.converged ? " converged" : r.zero_weight ? " zero-weight" : " not-converged") << "\n";
  if (!c.out_path.empty()) {
    Json doc{{"command", "bl compute"},
             {"datum", label},
             {"n", d.n},
             {"k", d.k},
             {"m", d.m()},
             {"exponent", std::to_string(p.num) + "/" + std::to_string(p.den)},
             {"value", r.value},
             {"weight_root", root},
             {"gaussian_value", r.gaussian_value},
             {"min_vector_value", r.min_vector_value},
             {"iterations", r.iterations},
             {"converged", r.converged},
             {"zero_weight", r.zero_weight},
             {"regularized", r.regularized}};
    write_json(c.out_path, doc);
  }
  return (r.converged || r.zero_weight) ? 0 : 2;
}

int bl_verify_scaling(const BlArgs& a, const Common& c, std::ostream& out) {
  std::string label;
  const EqualExpDatum d = bl_input(a, label);
  validate(d);
  Rng rng(c.seed);
  std::vector<Matrix> ms;
  for (int j = 0; j < d.m(); ++j) {
    Matrix mj;
    do {
      mj = Matrix::Identity(d.n - d.k, d.n - d.k) + 0.5 * random_matrix(d.n - d.k, d.n - d.k, rng);
    } while (std::abs(det(mj)) < 0.1);
    ms.push_back(mj);
  }
  const ScalingCheck s = check_scaling_identity(d, ms, BLOptions{a.max_iters, a.tol});
  out << "bl verify-scaling " << label << ": lhs " << fmt(s.lhs) << " rhs " << fmt(s.rhs) << " discrepancy "
      << fmt(s.discrepancy) << "\n";
  if (!c.out_path.empty()) {
    write_json(c.out_path, Json{{"command", "bl verify-scaling"},
                                {"datum", label},
                                {"seed", c.seed},
                                {"lhs", s.lhs},
                                {"rhs", s.rhs},
                                {"discrepancy", s.discrepancy},
                                {"converged", s.converged}});
  }
  return s.discrepancy <= 1e-4 ? 0 : 2;
}

// ---- poly ----

struct PolyArgs {
  std::string family = "moment";
  int n = 3;
  int k = 1;
  int m = 3;
  std::string t;
  bool pattern = false;
  int trials = 50;
  int max_size = 8;
};

BlockPolySpec family_spec(const PolyArgs& a) {
  if (a.family == "moment") return moment_curve_spec(a.n);
  if (a.family == "quadratic") return quadratic_model_spec(make_quadratic_model(a.n, a.k, Matrix::Ones(a.n - a.k, a.k)));
  if (a.family == "max-codim") return max_codim_spec(a.k);
  return staircase_spec(a.n, a.k, a.m);
}

std::vector<Matrix> family_maps(const BlockPolySpec& spec, const PolyArgs& a, uint64_t seed) {
  if (a.family == "moment" && !a.t.empty()) {
    const std::vector<double> t = parse_list(a.t);
    if (static_cast<int>(t.size()) != a.n) throw InputError("--t needs n values");
    return moment_curve_maps(t, a.n);
  }
  Rng rng(seed);
  std::vector<Matrix> maps;
  for (int j = 0; j < spec.m(); ++j) maps.push_back(random_matrix(spec.row_height(), spec.n(), rng));
  return maps;
}

int poly_eval(const PolyArgs& a, const Common& c, std::ostream& out) {
  const BlockPolySpec spec = family_spec(a);
  const std::vector<Matrix> maps = family_maps(spec, a, c.seed);
  const double phi = eval_phi(spec, maps);
  out << "poly eval " << a.family << ": phi " << fmt(phi) << "\n";
  if (!c.out_path.empty()) {
    Json jm = Json::array();
    for (const Matrix& m : maps) jm.push_back(matrix_json(m));
    write_json(c.out_path, Json{{"command", "poly eval"}, {"family", a.family}, {"phi", phi}, {"maps", jm}});
  }
  return 0;
}

int poly_vandermonde(const PolyArgs& a, const Common& c, std::ostream& out) {
  if (a.t.empty()) throw InputError("--t is required");
  const std::vector<double> t = parse_list(a.t);
  if (static_cast<int>(t.size()) != a.n) throw InputError("--t needs n values");
  const BlockPolySpec spec = moment_curve_spec(a.n);
  const std::vector<Matrix> maps = moment_curve_maps(t, a.n);
  const double phi = std::abs(eval_phi(spec, maps));
  double product = 1.0;
  for (int i = 0; i < a.n; ++i) {
    product *= i + 1;
    for (int j = i + 1; j < a.n; ++j) product *= std::abs(t[i] - t[j]);
  }
  out << fmt(phi) << "\n";
  if (a.pattern) {
    const Matrix m = assemble(spec, maps);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) out << (m(i, j) == 0.0 ? '.' : '*');
      out << "\n";
    }
  }
  if (!c.out_path.empty()) {
    write_json(c.out_path, Json{{"command", "poly vandermonde"},
                                {"n", a.n},
                                {"t", t},
                                {"abs_phi", phi},
                                {"factorial_times_product", product}});
  }
  return 0;
}

int poly_invariance(const PolyArgs& a, const Common& c, std::ostream& out) {
  const BlockPolySpec spec = family_spec(a);
  const std::vector<Matrix> maps = family_maps(spec, a, c.seed);
  Rng rng(c.seed, 1);
  std::vector<double> scalars;
  for (int j = 0; j < spec.m(); ++j) scalars.push_back(rng.uniform(0.5, 2.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0));
  const double hom = check_homogeneity(spec, maps, scalars);
  const double sl = check_sl_invariance(spec, maps, c.seed, a.trials);
  out << "poly invariance " << a.family << ": homogeneity " << fmt(hom) << " sl " << fmt(sl) << "\n";
  if (!c.out_path.empty()) {
    write_json(c.out_path, Json{{"command", "poly invariance"},
                                {"family", a.family},
                                {"seed", c.seed},
                                {"homogeneity_violation", hom},
                                {"sl_violation", sl}});
  }
  return (hom <= 1e-8 && sl <= 1e-8) ? 0 : 2;
}

int poly_contraction(const PolyArgs& a, const Common& c, std::ostream& out) {
  const std::vector<ContractionFamily> families = contraction_families(a.max_size, c.seed);
  std::vector<std::vector<double>> rows;
  double worst = 0.0;
  for (const ContractionFamily& f : families) {
    const ContractionResult r = contraction_identity_check(f);
    worst = std::max(worst, r.difference);
    rows.push_back({static_cast<double>(f.map_of.size()), static_cast<double>(f.maps.front().cols()),
                    static_cast<double>(f.maps.front().rows()), static_cast<double>(f.J.size()),
                    static_cast<double>(f.maps.size()), r.enumerated, r.polarized, r.difference});
  }
  out << "poly contraction: " << families.size() << " families, max difference " << fmt(worst) << "\n";
  if (!c.out_path.empty()) {
    write_csv(c.out_path, "poly contraction",
              {"size", "n", "rows", "s", "m", "enumerated", "polarized", "difference"}, rows);
  }
  return worst <= 1e-9 ? 0 : 2;
}

// ---- nonconc ----

struct NonconcArgs {
  int points = 200;
  int dim = 4;
  double delta = 0.25;
  std::string intervals;
  int count = 3;
};

SampleSpace random_space(int points, int dim, uint64_t seed) {
  Rng rng(seed);
  SampleSpace s;
  s.points.resize(points, 1);
  s.weights.resize(points);
  s.basis.resize(points, dim);
  for (int i = 0; i < points; ++i) {
    const double x = rng.uniform(-1.0, 1.0);
    s.points(i, 0) = x;
    s.weights(i) = rng.uniform();
    double power = 1.0;
    for (int j = 0; j < dim; ++j) {
      s.basis(i, j) = power;
      power *= x;
    }
  }
  return s;
}

int nonconc_convprop(const NonconcArgs& a, const Common& c, std::ostream& out) {
  const SampleSpace space = random_space(a.points, a.dim, c.seed);
  const ConvpropCertificate cert = convprop_construct(space, a.delta);
  const double bound = (1.0 - a.delta) * cert.total_measure;
  out << "nonconc convprop: selected measure " << fmt(cert.selected_measure) << " of " << fmt(cert.total_measure)
      << " (needs " << fmt(bound) << "), j0 " << cert.j0 << ", exchanges " << cert.exchanges << "\n";
  if (!c.out_path.empty()) {
    write_json(c.out_path, Json{{"command", "nonconc convprop"},
                                {"seed", c.seed},
                                {"delta", a.delta},
                                {"selected", cert.selected},
                                {"selected_measure", cert.selected_measure},
                                {"total_measure", cert.total_measure},
                                {"j0", cert.j0},
                                {"exchanges", cert.exchanges},
                                {"witness", matrix_json(cert.witness)}});
  }
  return cert.selected_measure >= bound * (1.0 - 1e-12) ? 0 : 2;
}

int nonconc_separate(const NonconcArgs& a, const Common& c, std::ostream& out) {
  if (a.intervals.empty()) throw InputError("--intervals is required");
  const Matrix m = parse_matrix(a.intervals);
  if (m.cols() != 2) throw InputError("--intervals takes pairs a,b separated by ';'");
  std::vector<std::pair<double, double>> iv;
  double length = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) iv.push_back({m(i, 0), m(i, 1)});
  const std::vector<double> pts = separated_points(iv, a.count);
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) gap = std::min(gap, std::abs(pts[i] - pts[j]));
  // merged length for the report
  std::vector<std::pair<double, double>> sorted = iv;
  std::sort(sorted.begin(), sorted.end());
  double reach = -std::numeric_limits<double>::infinity();
  for (const auto& [lo, hi] : sorted) {
    const double from = std::max(lo, reach);
    if (hi > from) length += hi - from;
    reach = std::max(reach, hi);
  }
  out << "nonconc separate:";
  for (double p : pts) out << " " << fmt(p);
  out << " (min gap " << fmt(gap) << ", |F|/(2n-1) " << fmt(length / (2.0 * a.count - 1.0)) << ")\n";
  if (!c.out_path.empty()) {
    write_json(c.out_path,
               Json{{"command", "nonconc separate"}, {"points", pts}, {"min_gap", gap}, {"measure", length}});
  }
  return 0;
}

int nonconc_density(const ModelArgs& ma, const Common& c, std::ostream& out) {
  const QuadraticModel model = ma.quadratic();
  const std::vector<double> minors = minor_condition(model);
  const double kd = density_K(model);
  out << "nonconc density-k: K " << fmt(kd) << " minors";
  for (double v : minors) out << " " << fmt(v);
  out << "\n";
  if (!c.out_path.empty()) {
    write_json(c.out_path, Json{{"command", "nonconc density-k"}, {"K", kd}, {"minors", minors}});
  }
  return 0;
}

int nonconc_derivative(const ModelArgs& ma, const Common& c, std::ostream& out) {
  const QuadraticModel model = ma.quadratic();
  Rng rng(c.seed);
  Matrix u = Matrix::Zero(model.k, model.k);
  for (int i = 0; i < model.k; ++i) {
    u(i, i) = rng.uniform(0.5, 1.5) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    for (int j = i + 1; j < model.k; ++j) u(i, j) = rng.normal();
  }
  Vector base(model.k);
  for (int i = 0; i < model.k; ++i) base(i) = rng.normal();
  const DerivativeCheck d = derivative_identity_check(model, u, base);
  out << "nonconc derivative-id: lhs " << fmt(d.lhs) << " rhs " << fmt(d.rhs) << " discrepancy "
      << fmt(d.discrepancy) << "\n";
  if (!c.out_path.empty()) {
    write_json(c.out_path, Json{{"command", "nonconc derivative-id"},
                                {"seed", c.seed},
                                {"lhs", d.lhs},
                                {"rhs", d.rhs},
                                {"discrepancy", d.discrepancy},
                                {"U", matrix_json(u)}});
  }
  return d.discrepancy <= 1e-8 ? 0 : 2;
}

// ---- radon ----

struct RadonArgs {
  std::vector<double> x;
  double delta = 0.25;
  std::string samples_t = "4096";
  std::string p = "auto";
  std::string q = "auto";
  std::string deltas = "6";
  std::string samples = "1e5";
  double power_shift = 0.1;
};

int radon_apply(const ModelArgs& ma, const RadonArgs& a, const Common& c, std::ostream& out) {
  const ModelOperator op = ma.op();
  const Vector x = point_or_zero(a.x, op.n, "--x");
  const Box e = knapp_box(op, a.delta);
  const MonteCarloEstimate est = apply_T(op, e, x, parse_count(a.samples_t, "--samples-t"), c.seed);
  out << "radon apply " << to_string(op.kind) << ": T chi_E(x) " << fmt(est.value) << " +- " << fmt(est.stderr)
      << "\n";
  if (!c.out_path.empty()) {
    write_json(c.out_path, Json{{"command", "radon apply"},
                                {"model", to_string(op.kind)},
                                {"seed", c.seed},
                                {"delta", a.delta},
                                {"x", a.x},
                                {"value", est.value},
                                {"stderr", est.stderr},
                                {"hits", est.hits},
                                {"samples", est.samples}});
  }
  return 0;
}

int radon_knapp(const ModelArgs& ma, const RadonArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  KnappExperiment exp;
  exp.op = ma.op();
  const ExponentPair crit = critical_exponents(exp.op);
  exp.exponents.p = a.p == "auto" ? crit.p : parse_real(a.p, "--p");
  exp.exponents.q = a.q == "auto" ? crit.q : parse_real(a.q, "--q");
  exp.deltas = a.deltas.find(',') == std::string::npos ? dyadic_deltas(parse_count(a.deltas, "--deltas"))
                                                       : parse_list(a.deltas);
  exp.samples_x = parse_count(a.samples, "--samples");
  exp.samples_t = parse_count(a.samples_t, "--samples-t");
  exp.seed = c.seed;
  exp.power_shift = a.power_shift;
  const RadonExperimentResult r = knapp_sweep(exp);
  if (r.exponent_warning) err << "warning: " << r.warning << "\n";
  out << "radon knapp " << to_string(exp.op.kind) << ": p " << fmt(exp.exponents.p) << " q " << fmt(exp.exponents.q)
      << " ratio band " << fmt(r.ratio_band()) << " shifted growth " << fmt(r.shifted_growth()) << "\n";
  if (!c.out_path.empty()) {
    std::vector<std::vector<double>> rows;
    for (const KnappRecord& rec : r.records)
      rows.push_back({rec.delta, rec.norm_estimate, rec.stderr, rec.set_measure, rec.ratio});
    write_csv(c.out_path, "radon knapp " + to_string(exp.op.kind),
              {"delta", "norm_estimate", "stderr", "set_measure", "ratio"}, rows);
  }
  return 0;
}

// ---- ift ----

struct IftArgs {
  std::vector<double> x;
  std::vector<double> x0;
  std::vector<double> t;
  double r = 0.1;
  std::string c = "auto";
  std::string big_c = "auto";
  int grid = 3;
  int fiber_grid = 16;
  int max_iters = 200;
  double tol = 1e-12;
};

NewtonProblem fiber_problem(const IncidenceModel& m, const IftArgs& a, double& c_used) {
  const Vector x = point_or_zero(a.x, m.n, "--x");
  NewtonProblem p;
  p.phi = [m, x](const Vector& y) { return m.rho(x, y); };
  p.jacobian = [m, x](const Vector& y) { return incidence_dy(m, x, y); };
  if (a.x0.empty()) {
    Vector y = m.fiber_point(x, Vector::Constant(m.k, 0.25));
    y(m.n - 1) += 1e-3;
    p.x0 = y;
  } else {
    p.x0 = point_or_zero(a.x0, m.n, "--x0");
  }
  p.r = a.r;
  const Matrix j = incidence_dy(m, x, p.x0);
  p.R = j.transpose() * (j * j.transpose()).inverse();
  if (a.c == "auto") {
    p.c = 0.0;
    const double sampled = sampled_contraction(p, std::max(1, a.grid));
    c_used = 1.25 * sampled + 1e-6;
    if (c_used >= 1.0) throw InputError("no contraction on Q_{x0,r} (sampled " + fmt(sampled) + "); reduce --r");
  } else {
    c_used = parse_real(a.c, "--c");
  }
  p.c = c_used;
  return p;
}

int ift_solve(const ModelArgs& ma, const IftArgs& a, const Common& c, std::ostream& out) {
  const IncidenceModel m = ma.incidence();
  double c_used = 0.0;
  const NewtonProblem p = fiber_problem(m, a, c_used);
  NewtonOptions opts;
  opts.max_iters = a.max_iters;
  opts.tol = a.tol;
  opts.contraction_grid = a.grid;
  const NewtonResult res = newton_solve(p, opts);
  const NewtonCertificate& cert = res.certificate;
  out << "ift solve " << m.name << ": |Phi| " << fmt(cert.residuals.front()) << " -> " << fmt(cert.residuals.back())
      << " in " << cert.iterations << " steps, |x - x0| " << fmt(cert.distance) << " <= " << fmt(cert.distance_bound)
      << "\n";
  if (!c.out_path.empty()) {
    write_json(c.out_path, Json{{"command", "ift solve"},
                                {"model", m.name},
                                {"x0", vector_json(p.x0)},
                                {"r", p.r},
                                {"c", p.c},
                                {"sampled_contraction", cert.sampled_contraction},
                                {"residuals", cert.residuals},
                                {"root", vector_json(res.root)},
                                {"distance", cert.distance},
                                {"distance_bound", cert.distance_bound},
                                {"iterations", cert.iterations}});
  }
  return 0;
}

int ift_fiber(const ModelArgs& ma, const IftArgs& a, const Common& c, std::ostream& out) {
  const IncidenceModel m = ma.incidence();
  double c_used = 0.0;
  NewtonProblem p = fiber_problem(m, a, c_used);
  if (a.big_c == "auto") {
    p.C = 1.25 * sampled_transverse_bound(p, std::max(1, a.grid)) + 1e-12;
  } else {
    p.C = parse_real(a.big_c, "--C");
  }
  NewtonOptions opts;
  opts.max_iters = a.max_iters;
  opts.tol = a.tol;
  opts.contraction_grid = a.grid;
  const FiberMeasure f = fiber_measure_lower_bound(p, a.fiber_grid, opts);
  out << "ift fiber " << m.name << ": measure " << fmt(f.measure) << " guaranteed " << fmt(f.guaranteed) << " nodes "
      << f.nodes_solved << "\n";
  if (!c.out_path.empty()) {
    write_json(c.out_path, Json{{"command", "ift fiber"},
                                {"model", m.name},
                                {"r", p.r},
                                {"c", p.c},
                                {"C", p.C},
                                {"measure", f.measure},
                                {"guaranteed", f.guaranteed},
                                {"parameter_radius", f.parameter_radius},
                                {"nodes_solved", f.nodes_solved}});
  }
  return f.measure >= f.guaranteed * (1.0 - 1e-12) ? 0 : 2;
}

int ift_normalize(const ModelArgs& ma, const IftArgs& a, const Common& c, std::ostream& out) {
  const IncidenceModel m = ma.incidence();
  const Vector x = point_or_zero(a.x, m.n, "--x");
  const Vector t = a.t.empty() ? Vector::Constant(m.k, 0.25) : point_or_zero(a.t, m.k, "--t");
  const Vector y = m.fiber_point(x, t);
  const NormalizedDefining nd = normalize_defining_function(m, x, y);
  out << "ift normalize " << m.name << ": gram residual " << fmt(nd.gram_residual) << " det ratio "
      << fmt(nd.det_ratio) << " vs " << fmt(nd.det_normalized) << "\n";
  if (!c.out_path.empty()) {
    write_json(c.out_path, Json{{"command", "ift normalize"},
                                {"model", m.name},
                                {"y", vector_json(y)},
                                {"value", vector_json(nd.value)},
                                {"dx", matrix_json(nd.dx)},
                                {"gram_residual", nd.gram_residual},
                                {"det_ratio", nd.det_ratio},
                                {"det_normalized", nd.det_normalized}});
  }
  return 0;
}

std::string scalar_arg(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  throw InputError("manifest: unsupported parameter value " + v.dump());
}

}  // namespace

std::vector<std::string> named_data() {
  return {"loomis-whitney-2d", "loomis-whitney-3d", "moment-curve-n2", "moment-curve-n3",
          "moment-curve-n4",   "parabola",          "max-codim-k1"};
}

EqualExpDatum named_datum(const std::string& name) {
  if (name == "loomis-whitney-2d") return loomis_whitney(2);
  if (name == "loomis-whitney-3d") return loomis_whitney(3);
  if (const int n = parse_suffix(name, "moment-curve-n"); n > 0) {
    EqualExpDatum d;
    d.n = n;
    d.k = 1;
    std::vector<double> t;
    for (int i = 0; i < n; ++i) t.push_back(i);
    d.maps = moment_curve_maps(t, n);
    return d;
  }
  if (name == "parabola") {
    const QuadraticModel model = parabola_model();
    EqualExpDatum d;
    d.n = 2;
    d.k = 1;
    for (double t : {0.0, 1.0}) d.maps.push_back(left_derivative_matrix(model, Vector::Zero(2), Vector{{t, 0.0}}));
    return d;
  }
  if (name == "max-codim-k1") {
    const IncidenceModel m = max_codim_incidence(1);
    EqualExpDatum d;
    d.n = 2;
    d.k = 1;
    for (double y : {0.0, 1.0}) d.maps.push_back(m.dx(Vector::Zero(2), Vector{{y, 0.0}}));
    return d;
  }
  throw InputError("unknown datum '" + name + "'; known: " + joined_names());
}

ModelOperator named_operator(const std::string& name) {
  if (name == "parabola") return quadratic_operator(parabola_model());
  if (name == "max-codim-k1") return max_codim_operator(1);
  if (const int n = parse_suffix(name, "moment-curve-n"); n > 0) return moment_curve_operator(n);
  throw InputError("datum '" + name + "' has no operator; use parabola, moment-curve-n{2,3,4} or max-codim-k1");
}

std::vector<std::string> manifest_to_args(const Json& manifest) {
  if (!manifest.is_object()) throw InputError("manifest must be a JSON object");
  // "generated" is the timestamp write_json stamps on every document
  static const std::set<std::string> allowed{"command", "parameters", "seed", "output_path", "generated"};
  for (auto it = manifest.begin(); it != manifest.end(); ++it)
    if (!allowed.count(it.key())) throw InputError("manifest: unknown key '" + it.key() + "'");
  if (!manifest.contains("command") || !manifest["command"].is_string()) throw InputError("manifest: command missing");
  const std::string command = manifest["command"];
  static const std::set<std::string> commands{"bl", "poly", "nonconc", "radon", "ift"};
  if (!commands.count(command)) throw InputError("manifest: unknown command '" + command + "'");
  const Json params = manifest.value("parameters", Json::object());
  if (!params.is_object()) throw InputError("manifest: parameters must be an object");
  if (!params.contains("subcommand") || !params["subcommand"].is_string()) {
    throw InputError("manifest: parameters.subcommand missing");
  }
  std::vector<std::string> args{command, params["subcommand"].get<std::string>()};
  for (auto it = params.begin(); it != params.end(); ++it) {
    if (it.key() == "subcommand") continue;
    std::string flag = "--" + it.key();
    std::replace(flag.begin(), flag.end(), '_', '-');
    const Json& v = it.value();
    if (v.is_boolean()) {
      if (v.get<bool>()) args.push_back(flag);
      continue;
    }
    args.push_back(flag);
    if (v.is_array()) {
      std::string joined;
      for (const Json& e : v) joined += (joined.empty() ? "" : ",") + scalar_arg(e);
      args.push_back(joined);
    } else {
      args.push_back(scalar_arg(v));
    }
  }
  const Json seed = manifest.value("seed", Json(0));
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
    throw InputError("manifest: seed must be a nonnegative integer");
  }
  args.push_back("--seed");
  args.push_back(std::to_string(seed.get<uint64_t>()));
  if (manifest.contains("output_path")) {
    args.push_back("--out");
    args.push_back(manifest["output_path"].get<std::string>());
  }
  return args;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"radonbl: Brascamp-Lieb weights, invariant polynomials and Radon-like operator experiments"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  Common common;
  BlArgs bl;
  PolyArgs poly;
  NonconcArgs nc;
  ModelArgs model;
  RadonArgs radon;
  IftArgs ift;
  std::string baseline, current, rtol = "1e-12", manifest_path;

  std::vector<std::pair<CLI::App*, std::function<int()>>> leaves;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, std::function<int()> fn) {
    CLI::App* sub = parent->add_subcommand(name, help);
    sub->add_option("--seed", common.seed, "64-bit seed");
    sub->add_option("--out,--report", common.out_path, "output artifact path");
    leaves.emplace_back(sub, std::move(fn));
    return sub;
  };

  CLI::App* bl_cmd = app.add_subcommand("bl", "Brascamp-Lieb constants")->require_subcommand(1);
  for (auto [name, fn] : std::vector<std::pair<std::string, std::function<int()>>>{
           {"compute", [&] { return bl_compute(bl, common, out); }},
           {"verify-scaling", [&] { return bl_verify_scaling(bl, common, out); }}}) {
    CLI::App* sub = leaf(bl_cmd, name, name == "compute" ? "BL^-1 by alternating scaling" : "scaling identity", fn);
    sub->add_option("--datum", bl.datum, "named datum");
    sub->add_option("--maps", bl.maps, "maps: entries ',', rows ';', maps '|'");
    sub->add_option("--max-iters", bl.max_iters, "scaling iteration cap");
    sub->add_option("--tol", bl.tol, "stopping tolerance on the scaling residual");
  }

  CLI::App* poly_cmd = app.add_subcommand("poly", "invariant polynomials")->require_subcommand(1);
  auto poly_family = [&](CLI::App* sub) {
    sub->add_option("--family", poly.family, "polynomial family")->check(CLI::IsMember({"moment", "quadratic", "max-codim", "staircase"}));
    sub->add_option("--n", poly.n, "ambient dimension");
    sub->add_option("--k", poly.k, "fiber dimension");
    sub->add_option("--m", poly.m, "number of blocks");
    sub->add_option("--t", poly.t, "moment curve parameters");
  };
  poly_family(leaf(poly_cmd, "eval", "evaluate Phi", [&] { return poly_eval(poly, common, out); }));
  {
    CLI::App* sub = leaf(poly_cmd, "vandermonde", "|Phi| for the moment curve",
                         [&] { return poly_vandermonde(poly, common, out); });
    sub->add_option("--n", poly.n, "ambient dimension");
    sub->add_option("--t", poly.t, "moment curve parameters")->required();
    sub->add_flag("--pattern", poly.pattern, "print the zero pattern of the block matrix");
  }
  {
    CLI::App* sub =
        leaf(poly_cmd, "invariance", "homogeneity and SL invariance", [&] { return poly_invariance(poly, common, out); });
    poly_family(sub);
    sub->add_option("--trials", poly.trials, "random trials");
  }
  leaf(poly_cmd, "contraction", "alternating contraction vs polarization",
       [&] { return poly_contraction(poly, common, out); })
      ->add_option("--max-size", poly.max_size, "largest family size checked");

  CLI::App* nc_cmd = app.add_subcommand("nonconc", "nonconcentration tools")->require_subcommand(1);
  {
    CLI::App* sub = leaf(nc_cmd, "convprop", "bounded spanning functions", [&] { return nonconc_convprop(nc, common, out); });
    sub->add_option("--points", nc.points, "number of sample points");
    sub->add_option("--dim", nc.dim, "dimension of the function space");
    sub->add_option("--delta", nc.delta, "probability mass allowed to be discarded");
  }
  {
    CLI::App* sub = leaf(nc_cmd, "separate", "well separated points", [&] { return nonconc_separate(nc, common, out); });
    sub->add_option("--intervals", nc.intervals, "intervals as a,b pairs separated by ';'")->required();
    sub->add_option("--count", nc.count, "points wanted");
  }
  model.attach(leaf(nc_cmd, "density-k", "periodic minors", [&] { return nonconc_density(model, common, out); }));
  model.attach(leaf(nc_cmd, "derivative-id", "mixed derivative identity",
                    [&] { return nonconc_derivative(model, common, out); }));

  CLI::App* radon_cmd = app.add_subcommand("radon", "Radon-like operator experiments")->require_subcommand(1);
  {
    CLI::App* sub = leaf(radon_cmd, "apply", "Monte Carlo T chi_E(x) on a Knapp box",
                         [&] { return radon_apply(model, radon, common, out); });
    model.attach(sub);
    sub->add_option("--x", radon.x, "evaluation point (default 0)")->delimiter(',');
    sub->add_option("--delta", radon.delta, "box scale");
    sub->add_option("--samples-t", radon.samples_t, "Monte Carlo samples over the fiber");
  }
  {
    CLI::App* sub = leaf(radon_cmd, "knapp", "Knapp ratio sweep", [&] { return radon_knapp(model, radon, common, out, err); });
    model.attach(sub);
    sub->add_option("--p", radon.p, "input exponent or auto");
    sub->add_option("--q", radon.q, "output exponent or auto");
    sub->add_option("--deltas", radon.deltas, "count of dyadic deltas or an explicit list");
    sub->add_option("--samples", radon.samples, "output points per delta");
    sub->add_option("--samples-t", radon.samples_t, "fiber samples per output point")->default_str("64");
    sub->add_option("--power-shift", radon.power_shift, "exponent offset for the growth check");
  }

  CLI::App* ift_cmd = app.add_subcommand("ift", "implicit function tools")->require_subcommand(1);
  auto ift_opts = [&](CLI::App* sub) {
    model.attach(sub);
    sub->add_option("--x", ift.x, "base point x (default 0)")->delimiter(',');
    sub->add_option("--x0", ift.x0, "starting point (default 0)")->delimiter(',');
    sub->add_option("--r", ift.r, "cube radius");
    sub->add_option("--c", ift.c, "contraction constant or auto");
    sub->add_option("--grid", ift.grid, "nodes per axis for sampled bounds");
    sub->add_option("--max-iters", ift.max_iters, "Newton iteration cap");
    sub->add_option("--tol", ift.tol, "residual tolerance");
  };
  ift_opts(leaf(ift_cmd, "solve", "Newton iteration with certificate", [&] { return ift_solve(model, ift, common, out); }));
  {
    CLI::App* sub = leaf(ift_cmd, "fiber", "fiber measure lower bound", [&] { return ift_fiber(model, ift, common, out); });
    ift_opts(sub);
    sub->add_option("--C", ift.big_c, "transverse derivative bound or auto");
    sub->add_option("--fiber-grid", ift.fiber_grid, "fiber nodes per axis");
  }
  {
    CLI::App* sub =
        leaf(ift_cmd, "normalize", "normalized defining function", [&] { return ift_normalize(model, ift, common, out); });
    model.attach(sub);
    sub->add_option("--x", ift.x, "base point x (default 0)")->delimiter(',');
    sub->add_option("--t", ift.t, "fiber parameter (default 0)")->delimiter(',');
  }

  CLI::App* regress_cmd = app.add_subcommand("regress", "compare two artifacts");
  regress_cmd->add_option("baseline", baseline, "reference artifact")->required();
  regress_cmd->add_option("current", current, "artifact to compare")->required();
  regress_cmd->add_option("--rtol", rtol, "relative tolerance (inf accepted)");

  CLI::App* run_cmd = app.add_subcommand("run", "run a JSON manifest");
  run_cmd->add_option("manifest", manifest_path, "JSON manifest path")->required();

  // radon knapp keeps its own samples_t default
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  bool knapp_samples_t_default = true;
  for (const auto& a : args)
    if (a.rfind("--samples-t", 0) == 0) knapp_samples_t_default = false;
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (regress_cmd->parsed()) {
      const double tol = parse_real(rtol, "--rtol");
      const RegressReport rep = regress(baseline, current, tol);
      for (const auto& m : rep.messages) err << m << "\n";
      out << "regress: " << (rep.status == 0 ? "match" : "mismatch") << "\n";
      return rep.status;
    }
    if (run_cmd->parsed()) return run_cli(manifest_to_args(read_json(manifest_path)), out, err);
    for (auto& [sub, fn] : leaves) {
      if (!sub->parsed()) continue;
      if (sub->get_name() == "knapp" && knapp_samples_t_default) radon.samples_t = "64";
      return fn();
    }
    err << app.help();
    return 1;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace radonbl::tools
