#include "radonbl/radon_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "radonbl/bl_core.hpp"
#include "radonbl/linops.hpp"
#include "radonbl/nonconc.hpp"
#include "radonbl/parallel.hpp"
#include "radonbl/rng.hpp"

namespace radonbl {

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= std::max(0.0, hi(i) - lo(i));
  return v;
}

bool Box::contains(const Vector& p) const {
  if (p.size() != lo.size()) return false;
  for (int i = 0; i < dim(); ++i)
    if (p(i) < lo(i) || p(i) > hi(i)) return false;
  return true;
}

Box make_box(const Vector& lo, const Vector& hi) {
  if (lo.size() != hi.size()) throw InputError("make_box: corner dimensions differ");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(lo(i) <= hi(i))) throw InputError("make_box: lower corner exceeds upper corner");
  return Box{lo, hi};
}

Box cube(int dim, double lo, double hi) { return make_box(Vector::Constant(dim, lo), Vector::Constant(dim, hi)); }

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::moment_curve:
      return "moment_curve";
    case OperatorKind::quadratic:
      return "quadratic";
    case OperatorKind::max_codim:
      return "max_codim";
  }
  return "unknown";
}

namespace {

constexpr double kDomainHalfWidth = 8.0;

// y = graph(x, t) written into y; raw arrays keep the sampling loops free of
// allocations.
void graph_raw(const ModelOperator& op, const double* x, const double* t, double* y) {
  const int n = op.n, k = op.k;
  switch (op.kind) {
    case OperatorKind::moment_curve: {
      double power = 1.0;
      for (int i = 0; i < n; ++i) {
        power *= t[0];
        y[i] = x[i] + power;
      }
      return;
    }
    case OperatorKind::quadratic: {
      for (int i = 0; i < k; ++i) y[i] = x[i] + t[i];
      const Matrix& lam = op.quad.lambda;
      for (int j = 0; j < n - k; ++j) {
        double s = 0.0;
        for (int i = 0; i < k; ++i) s += lam(j, i) * t[i] * t[i];
        y[k + j] = x[k + j] + 0.5 * s;
      }
      return;
    }
    case OperatorKind::max_codim: {
      for (int i = 0; i < k; ++i) y[i] = x[i] + t[i];
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) y[k + i * k + j] = x[k + i * k + j] + x[i] * (x[j] + t[j]);
      return;
    }
  }
}

void source_raw(const ModelOperator& op, const double* y, const double* t, double* x) {
  const int n = op.n, k = op.k;
  switch (op.kind) {
    case OperatorKind::moment_curve: {
      double power = 1.0;
      for (int i = 0; i < n; ++i) {
        power *= t[0];
        x[i] = y[i] - power;
      }
      return;
    }
    case OperatorKind::quadratic: {
      for (int i = 0; i < k; ++i) x[i] = y[i] - t[i];
      const Matrix& lam = op.quad.lambda;
      for (int j = 0; j < n - k; ++j) {
        double s = 0.0;
        for (int i = 0; i < k; ++i) s += lam(j, i) * t[i] * t[i];
        x[k + j] = y[k + j] - 0.5 * s;
      }
      return;
    }
    case OperatorKind::max_codim: {
      for (int i = 0; i < k; ++i) x[i] = y[i] - t[i];
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) x[k + i * k + j] = y[k + i * k + j] - x[i] * y[j];
      return;
    }
  }
}

bool inside(const Box& b, const double* p, int from) {
  for (int i = from; i < b.dim(); ++i)
    if (p[i] < b.lo(i) || p[i] > b.hi(i)) return false;
  return true;
}

// Part of t_box where x' + t lies in the first k sides of e.
Box restricted_t_box(const ModelOperator& op, const Box& e, const double* x) {
  Box r = op.t_box;
  for (int i = 0; i < op.k; ++i) {
    r.lo(i) = std::max(r.lo(i), e.lo(i) - x[i]);
    r.hi(i) = std::min(r.hi(i), e.hi(i) - x[i]);
    if (r.hi(i) < r.lo(i)) r.hi(i) = r.lo(i);
  }
  return r;
}

long count_hits(const ModelOperator& op, const Box& e, const double* x, const Box& region, int samples, Rng& rng,
                std::vector<double>& t, std::vector<double>& y) {
  long hits = 0;
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < op.k; ++i) t[i] = rng.uniform(region.lo(i), region.hi(i));
    graph_raw(op, x, t.data(), y.data());
    if (inside(e, y.data(), op.k)) ++hits;
  }
  return hits;
}

MonteCarloEstimate binomial_estimate(double volume, long hits, long samples) {
  MonteCarloEstimate out;
  out.hits = hits;
  out.samples = samples;
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  out.value = volume * p;
  out.stderr = hits == 0 ? volume / static_cast<double>(samples)
                         : volume * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return out;
}

void check_point(const ModelOperator& op, const Vector& x) {
  if (x.size() != op.n) throw InputError("apply_T: point has the wrong dimension");
  if (!op.domain_box.contains(x)) throw InputError("apply_T: point lies outside the domain box");
}

}  // namespace

ModelOperator moment_curve_operator(int n) {
  if (n < 2) throw InputError("moment_curve_operator: n must be at least 2");
  ModelOperator op;
  op.kind = OperatorKind::moment_curve;
  op.n = n;
  op.k = 1;
  op.domain_box = cube(n, -kDomainHalfWidth, kDomainHalfWidth);
  op.t_box = cube(1, -1.0, 1.0);
  return op;
}

ModelOperator quadratic_operator(const QuadraticModel& model) {
  validate(model);
  ModelOperator op;
  op.kind = OperatorKind::quadratic;
  op.n = model.n;
  op.k = model.k;
  op.quad = model;
  op.domain_box = cube(model.n, -kDomainHalfWidth, kDomainHalfWidth);
  op.t_box = cube(model.k, -1.0, 1.0);
  return op;
}

ModelOperator max_codim_operator(int k) {
  if (k < 1) throw InputError("max_codim_operator: k must be positive");
  ModelOperator op;
  op.kind = OperatorKind::max_codim;
  op.k = k;
  op.n = k + k * k;
  op.domain_box = cube(op.n, -kDomainHalfWidth, kDomainHalfWidth);
  op.t_box = cube(k, -1.0, 1.0);
  return op;
}

void validate(const ModelOperator& op) {
  switch (op.kind) {
    case OperatorKind::moment_curve:
      if (op.k != 1 || op.n < 2) throw InputError("moment curve operator needs k = 1 and n >= 2");
      break;
    case OperatorKind::quadratic:
      validate(op.quad);
      if (op.n != op.quad.n || op.k != op.quad.k) throw InputError("quadratic operator disagrees with its model");
      break;
    case OperatorKind::max_codim:
      if (op.k < 1 || op.n != op.k + op.k * op.k) throw InputError("max codim operator needs n = k + k^2");
      break;
  }
  if (op.domain_box.dim() != op.n) throw InputError("domain box has the wrong dimension");
  if (op.t_box.dim() != op.k) throw InputError("parameter box has the wrong dimension");
}

Vector graph_point(const ModelOperator& op, const Vector& x, const Vector& t) {
  validate(op);
  if (x.size() != op.n || t.size() != op.k) throw InputError("graph_point: dimension mismatch");
  Vector y(op.n);
  graph_raw(op, x.data(), t.data(), y.data());
  return y;
}

Vector source_point(const ModelOperator& op, const Vector& y, const Vector& t) {
  validate(op);
  if (y.size() != op.n || t.size() != op.k) throw InputError("source_point: dimension mismatch");
  Vector x(op.n);
  source_raw(op, y.data(), t.data(), x.data());
  return x;
}

MonteCarloEstimate apply_T(const ModelOperator& op, const Indicator& in_e, const Vector& x, int samples_t,
                           uint64_t seed) {
  validate(op);
  check_point(op, x);
  if (samples_t < 1) throw InputError("apply_T: samples_t must be positive");
  Rng rng(seed);
  Vector t(op.k);
  long hits = 0;
  for (int s = 0; s < samples_t; ++s) {
    for (int i = 0; i < op.k; ++i) t(i) = rng.uniform(op.t_box.lo(i), op.t_box.hi(i));
    if (in_e(graph_point(op, x, t))) ++hits;
  }
  return binomial_estimate(op.t_box.volume(), hits, samples_t);
}

MonteCarloEstimate apply_T(const ModelOperator& op, const Box& e, const Vector& x, int samples_t, uint64_t seed) {
  validate(op);
  check_point(op, x);
  if (samples_t < 1) throw InputError("apply_T: samples_t must be positive");
  if (e.dim() != op.n) throw InputError("apply_T: set E has the wrong dimension");
  const Box region = restricted_t_box(op, e, x.data());
  const double volume = region.volume();
  if (volume == 0.0) return MonteCarloEstimate{0.0, 0.0, 0, samples_t};
  Rng rng(seed);
  std::vector<double> t(op.k), y(op.n);
  const long hits = count_hits(op, e, x.data(), region, samples_t, rng, t, y);
  return binomial_estimate(volume, hits, samples_t);
}

ExponentPair critical_exponents(const ModelOperator& op) {
  validate(op);
  const double n = op.n, k = op.k;
  switch (op.kind) {
    case OperatorKind::moment_curve:
      return {(n + 1.0) / 2.0, n * (n + 1.0) / (2.0 * (n - 1.0))};
    case OperatorKind::quadratic:
      return {(2.0 * n - k) / n, (2.0 * n - k) / (n - k)};
    case OperatorKind::max_codim:
      return {(2.0 * k + 1.0) / (k + 1.0), (2.0 * k + 1.0) / k};
  }
  return {};
}

Box knapp_box(const ModelOperator& op, double delta) {
  validate(op);
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("knapp_box: delta must lie in (0, 1)");
  Vector hi(op.n);
  switch (op.kind) {
    case OperatorKind::moment_curve:
      for (int i = 0; i < op.n; ++i) hi(i) = std::pow(delta, i + 1);
      break;
    case OperatorKind::quadratic: {
      const double c_lambda = 0.5 * op.quad.lambda.cwiseAbs().maxCoeff();
      if (!(c_lambda > 0.0)) throw InputError("knapp_box: lambda vanishes");
      hi.head(op.k).setConstant(delta);
      hi.tail(op.n - op.k).setConstant(c_lambda * delta * delta);
      break;
    }
    case OperatorKind::max_codim:
      hi.head(op.k).setConstant(delta);
      hi.tail(op.n - op.k).setConstant(delta * delta);
      break;
  }
  return make_box(Vector::Zero(op.n), hi);
}

double RadonExperimentResult::ratio_band() const {
  if (records.empty()) return 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : records) {
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

double RadonExperimentResult::shifted_growth() const {
  if (records.size() < 2 || records.front().shifted_ratio <= 0.0) return 0.0;
  return records.back().shifted_ratio / records.front().shifted_ratio;
}

bool RadonExperimentResult::shifted_monotone() const {
  for (std::size_t i = 1; i < records.size(); ++i)
    if (!(records[i].shifted_ratio > records[i - 1].shifted_ratio)) return false;
  return true;
}

std::vector<double> dyadic_deltas(int count) {
  if (count < 1 || count > 40) throw InputError("dyadic_deltas: count must lie in 1..40");
  std::vector<double> out;
  for (int i = 1; i <= count; ++i) out.push_back(std::ldexp(1.0, -i));
  return out;
}

void validate(const KnappExperiment& exp) {
  validate(exp.op);
  if (exp.deltas.empty()) throw InputError("knapp experiment: no deltas");
  for (std::size_t i = 0; i < exp.deltas.size(); ++i) {
    if (!(exp.deltas[i] > 0.0 && exp.deltas[i] < 1.0)) throw InputError("knapp experiment: deltas must lie in (0, 1)");
    if (i > 0 && !(exp.deltas[i] < exp.deltas[i - 1])) {
      throw InputError("knapp experiment: deltas must be strictly decreasing");
    }
  }
  if (exp.samples_x < 1000) throw InputError("knapp experiment: samples_x must be at least 1000");
  if (exp.samples_t < 16) throw InputError("knapp experiment: samples_t must be at least 16");
  if (!(exp.exponents.p >= 1.0) || !(exp.exponents.q >= exp.exponents.p)) {
    throw InputError("knapp experiment: need 1 <= p <= q");
  }
  for (int i = 0; i < exp.op.k; ++i)
    if (exp.op.t_box.lo(i) != -exp.op.t_box.hi(i) || exp.op.t_box.hi(i) != exp.op.t_box.hi(0)) {
      throw InputError("knapp experiment: parameter box must be a centered cube");
    }
}

namespace {

// E[C(H, r)] / C(N, r) = P(hit)^r for N independent trials.
double binomial_power(long hits, long samples, int r) {
  if (hits < r) return 0.0;
  double v = 1.0;
  for (int i = 0; i < r; ++i) v *= static_cast<double>(hits - i) / static_cast<double>(samples - i);
  return v;
}

struct ShellJob {
  int shell = 0;
  int count = 0;
};

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

}  // namespace

// With y = graph(x, t) (a measure-preserving change of x for fixed t),
//   int T chi_E(x)^q dx = |E| int_{t_box} E_{y ~ U(E)} [T chi_E(source(y, t))^{q-1}] dt.
// The t integral is stratified into shells |t|_inf in [0, 2d], [2d, 4d], ...
// so that the samples concentrate where the integrand is largest.
RadonExperimentResult knapp_sweep(const KnappExperiment& exp) {
  validate(exp);
  const ModelOperator& op = exp.op;
  RadonExperimentResult result;
  const ExponentPair crit = critical_exponents(op);
  if (relative_difference(crit.p, exp.exponents.p) > 1e-9 || relative_difference(crit.q, exp.exponents.q) > 1e-9) {
    result.exponent_warning = true;
    result.warning = "exponent pair differs from the critical pair (" + std::to_string(crit.p) + ", " +
                     std::to_string(crit.q) + ") for " + to_string(op.kind);
  }
  const double q = exp.exponents.q;
  const double r_real = q - 1.0;
  const int r_int = static_cast<int>(std::lround(r_real));
  const bool integral_power = std::abs(r_real - r_int) < 1e-12 && r_int >= 1;
  const double half_width = op.t_box.hi(0);
  constexpr int kChunk = 1024;

  for (std::size_t di = 0; di < exp.deltas.size(); ++di) {
    const double delta = exp.deltas[di];
    const Box e = knapp_box(op, delta);
    const double e_volume = e.volume();

    std::vector<double> shell_lo, shell_hi;
    for (double a = 0.0, b = std::min(2.0 * delta, half_width);; a = b, b = std::min(2.0 * b, half_width)) {
      shell_lo.push_back(a);
      shell_hi.push_back(b);
      if (b >= half_width) break;
    }
    const int shells = static_cast<int>(shell_lo.size());
    std::vector<int> per_shell(shells, exp.samples_x / shells);
    for (int s = 0; s < exp.samples_x % shells; ++s) ++per_shell[s];

    std::vector<ShellJob> jobs;
    for (int s = 0; s < shells; ++s)
      for (int done = 0; done < per_shell[s]; done += kChunk) jobs.push_back({s, std::min(kChunk, per_shell[s] - done)});

    std::vector<Moments> partial(jobs.size());
    const uint64_t delta_seed = derive_seed(exp.seed, di);
    parallel_for(jobs.size(), [&](std::size_t j) {
      Rng rng(delta_seed, j);
      const ShellJob& job = jobs[j];
      const double a = shell_lo[job.shell], b = shell_hi[job.shell];
      std::vector<double> t0(op.k), y(op.n), x(op.n), t(op.k), yy(op.n);
      std::vector<double> g(job.count);
      for (int i = 0; i < job.count; ++i) {
        double norm_inf;
        do {
          norm_inf = 0.0;
          for (int c = 0; c < op.k; ++c) {
            t0[c] = rng.uniform(-b, b);
            norm_inf = std::max(norm_inf, std::abs(t0[c]));
          }
        } while (norm_inf < a);
        for (int c = 0; c < op.n; ++c) y[c] = rng.uniform(e.lo(c), e.hi(c));
        source_raw(op, y.data(), t0.data(), x.data());
        const Box region = restricted_t_box(op, e, x.data());
        const double volume = region.volume();
        const long hits = count_hits(op, e, x.data(), region, exp.samples_t, rng, t, yy);
        g[i] = integral_power ? std::pow(volume, r_int) * binomial_power(hits, exp.samples_t, r_int)
                              : std::pow(volume * hits / exp.samples_t, r_real);
      }
      Moments m;
      m.sum = pairwise_sum(g);
      for (double& v : g) v *= v;
      m.sum_sq = pairwise_sum(g);
      partial[j] = m;
    });

    std::vector<double> contrib(shells), var(shells);
    for (int s = 0; s < shells; ++s) {
      std::vector<double> sums, sqs;
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (jobs[j].shell != s) continue;
        sums.push_back(partial[j].sum);
        sqs.push_back(partial[j].sum_sq);
      }
      const double count = per_shell[s];
      const double mean = pairwise_sum(sums) / count;
      const double second = pairwise_sum(sqs) / count;
      const double shell_volume = std::pow(2.0 * shell_hi[s], op.k) - std::pow(2.0 * shell_lo[s], op.k);
      contrib[s] = shell_volume * mean;
      var[s] = shell_volume * shell_volume * std::max(0.0, second - mean * mean) / std::max(1.0, count - 1.0);
    }
    const double integral = e_volume * pairwise_sum(contrib);
    const double integral_se = e_volume * std::sqrt(pairwise_sum(var));

    KnappRecord rec;
    rec.delta = delta;
    rec.set_measure = e_volume;
    rec.norm_estimate = integral > 0.0 ? std::pow(integral, 1.0 / q) : 0.0;
    rec.stderr = integral > 0.0 ? rec.norm_estimate / q * integral_se / integral : 0.0;
    const double power = 1.0 / exp.exponents.p;
    rec.ratio = rec.norm_estimate / std::pow(e_volume, power);
    rec.ratio_stderr = rec.stderr / std::pow(e_volume, power);
    rec.shifted_ratio = rec.norm_estimate / std::pow(e_volume, power + exp.power_shift);
    result.records.push_back(rec);
  }
  return result;
}

Matrix left_derivative_matrix(const QuadraticModel& model, const Vector& x, const Vector& y) {
  validate(model);
  if (x.size() != model.n || y.size() != model.n) throw InputError("left_derivative_matrix: points must lie in R^n");
  const int c = model.c();
  Matrix out = Matrix::Zero(c, model.n);
  out.leftCols(c).setIdentity();
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < model.k; ++i) out(j, c + i) = (x(i) - y(i)) * model.lambda(j, i);
  return out;
}

namespace {

double tuple_weight(const QuadraticModel& model, const Vector& x, const FiberSample& f, const std::vector<int>& tuple,
                    const BLOptions& opts) {
  EqualExpDatum d;
  d.n = model.n;
  d.k = model.k;
  for (int idx : tuple) {
    Vector y = Vector::Zero(model.n);
    y.head(model.k) = x.head(model.k) + f.t[idx];
    d.maps.push_back(left_derivative_matrix(model, x, y));
  }
  try {
    return bl_weight_root(d, opts).value;
  } catch (const NumericalError&) {
    return 0.0;
  }
}

}  // namespace

ProbeResult hypothesis_probe(const QuadraticModel& model, const Vector& x, const FiberSample& f, double s,
                             const ProbeOptions& opts) {
  validate(model);
  if (f.t.empty()) throw InputError("hypothesis_probe: fiber sample is empty");
  if (f.weights.size() != f.t.size()) throw InputError("hypothesis_probe: one weight per fiber point required");
  if (x.size() != model.n) throw InputError("hypothesis_probe: x must lie in R^n");
  for (std::size_t i = 0; i < f.t.size(); ++i) {
    if (f.t[i].size() != model.k) throw InputError("hypothesis_probe: fiber parameters must lie in R^k");
    if (!(f.weights[i] >= 0.0)) throw InputError("hypothesis_probe: weights must be nonnegative");
  }
  const int m = model.n;
  const int count = static_cast<int>(f.t.size());
  BLOptions bl;
  bl.max_iters = opts.bl_max_iters;

  ProbeResult out;
  out.bound = std::pow(std::accumulate(f.weights.begin(), f.weights.end(), 0.0), s);
  const std::vector<double> minors = minor_condition(model);
  const double lscale = model.lambda.cwiseAbs().maxCoeff();
  out.minor_condition_holds = lscale > 0.0;
  for (double mv : minors)
    if (std::abs(mv) <= 1e-12 * std::pow(lscale, model.c())) out.minor_condition_holds = false;

  std::set<std::vector<int>> seen;
  auto consider = [&](std::vector<int> tuple) {
    if (!seen.insert(tuple).second) return;
    ++out.tuples_tried;
    const double w = tuple_weight(model, x, f, tuple, bl);
    if (out.best_tuple.empty() || w > out.sup_estimate) {
      out.sup_estimate = w;
      out.best_tuple = tuple;
    }
  };

  long exhaustive = 1;
  for (int i = 0; i < m && exhaustive <= 4096; ++i) exhaustive *= count;
  if (exhaustive <= 4096) {
    // small samples: every tuple (repetitions included)
    std::vector<int> tuple(m, 0);
    for (long idx = 0; idx < exhaustive; ++idx) {
      long rest = idx;
      for (int i = 0; i < m; ++i) {
        tuple[i] = static_cast<int>(rest % count);
        rest /= count;
      }
      consider(tuple);
    }
  } else {
    if (model.k == 1) {
      // well separated parameters: cover F by intervals of its own weights
      std::vector<std::pair<double, double>> intervals;
      for (int i = 0; i < count; ++i) {
        const double w = std::max(f.weights[i], 1e-12);
        intervals.push_back({f.t[i](0) - 0.5 * w, f.t[i](0) + 0.5 * w});
      }
      try {
        const std::vector<double> picks = separated_points(intervals, m);
        std::vector<int> tuple;
        for (double p : picks) {
          int best = 0;
          for (int i = 1; i < count; ++i)
            if (std::abs(f.t[i](0) - p) < std::abs(f.t[best](0) - p)) best = i;
          tuple.push_back(best);
        }
        consider(tuple);
      } catch (const std::exception&) {
        // no separated configuration; random search below still runs
      }
    }
    // farthest-point greedy from every tenth start
    for (int start = 0; start < count; start += std::max(1, count / 10)) {
      std::vector<int> tuple{start};
      while (static_cast<int>(tuple.size()) < m) {
        int best = 0;
        double best_dist = -1.0;
        for (int i = 0; i < count; ++i) {
          double dist = std::numeric_limits<double>::infinity();
          for (int j : tuple) dist = std::min(dist, (f.t[i] - f.t[j]).norm());
          if (dist > best_dist) {
            best_dist = dist;
            best = i;
          }
        }
        tuple.push_back(best);
      }
      consider(tuple);
    }
    Rng rng(opts.seed);
    for (int r = 0; r < opts.random_tuples; ++r) {
      std::vector<int> tuple(m);
      for (int& v : tuple) v = static_cast<int>(rng.below(count));
      consider(tuple);
    }
    // single-slot hill climbing from the best tuple found so far
    for (int round = 0; round < 2 && !out.best_tuple.empty(); ++round) {
      const std::vector<int> base = out.best_tuple;
      for (int slot = 0; slot < m; ++slot)
        for (int trial = 0; trial < 16; ++trial) {
          std::vector<int> tuple = out.best_tuple;
          tuple[slot] = static_cast<int>(rng.below(count));
          consider(tuple);
        }
      if (out.best_tuple == base) break;
    }
  }
  out.flagged = out.minor_condition_holds && out.sup_estimate < out.bound * (1.0 - opts.tolerance);
  return out;
}

double measure_identity_check(const Matrix& b) {
  const Matrix left = Matrix::Identity(b.cols(), b.cols()) + b.transpose() * b;
  const Matrix right = Matrix::Identity(b.rows(), b.rows()) + b * b.transpose();
  return relative_difference(det(left), det(right));
}

}  // namespace radonbl
