#include "radonbl/nonconc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "radonbl/invariant_poly.hpp"
#include "radonbl/linops.hpp"
#include "radonbl/parallel.hpp"

namespace radonbl {

void validate(const SampleSpace& space) {
  if (space.size() == 0) throw InputError("sample space is empty");
  if (space.dim() < 1) throw InputError("sample space needs at least one basis function");
  if (space.weights.size() != space.size()) throw InputError("sample space: one weight per point required");
  if (space.points.rows() != 0 && space.points.rows() != space.size()) {
    throw InputError("sample space: points and basis disagree on the number of points");
  }
  if (!space.basis.allFinite()) throw InputError("sample space: non-finite basis values");
  Eigen::JacobiSVD<Matrix> svd(space.basis);
  const Vector& sv = svd.singularValues();
  if (sv.size() < space.dim() || !(sv(sv.size() - 1) > 1e-10 * sv(0))) {
    throw InputError("sample space: basis functions are linearly dependent");
  }
  for (Eigen::Index i = 0; i < space.weights.size(); ++i) {
    if (!(space.weights(i) >= 0.0) || !std::isfinite(space.weights(i))) {
      throw InputError("sample space: weights must be finite and nonnegative");
    }
  }
}

double upper_quantile(const Vector& values, const Vector& weights, double eps) {
  const Eigen::Index n = values.size();
  if (n == 0) return 0.0;
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double va = std::abs(values(a));
    const double vb = std::abs(values(b));
    return va > vb || (va == vb && a < b);
  });
  double q = std::abs(values(order[0]));
  double above = 0.0;  // mu(|f| > current value)
  Eigen::Index i = 0;
  bool exhausted = true;
  while (i < n) {
    const double v = std::abs(values(order[i]));
    double group = 0.0;
    Eigen::Index j = i;
    while (j < n && std::abs(values(order[j])) == v) group += weights(order[j++]);
    if (above > eps) {
      exhausted = false;
      break;
    }
    q = v;
    above += group;
    i = j;
  }
  if (exhausted && above <= eps) q = 0.0;
  return q;
}

namespace {

double sum_weights(const Vector& w) { return pairwise_sum(w.data(), static_cast<std::size_t>(w.size())); }

struct LineMin {
  double t = 0.0;
  double q = 0.0;
};

// Minimizes t -> q(g + t h). Candidates are the zeros of the individual
// entries; the best one is refined by golden section inside its bracket.
LineMin line_minimize(const Vector& g, const Vector& h, const Vector& w, double eps) {
  std::vector<double> zeros;
  for (Eigen::Index x = 0; x < g.size(); ++x)
    if (w(x) > 0.0 && h(x) != 0.0) zeros.push_back(-g(x) / h(x));
  LineMin best{0.0, upper_quantile(g, w, eps)};
  if (zeros.empty()) return best;
  std::sort(zeros.begin(), zeros.end());
  auto eval = [&](double t) { return upper_quantile(g + t * h, w, eps); };

  constexpr std::size_t kCandidates = 48;
  const std::size_t stride = std::max<std::size_t>(1, zeros.size() / kCandidates);
  std::size_t best_index = zeros.size();
  for (std::size_t i = 0; i < zeros.size(); i += stride) {
    const double v = eval(zeros[i]);
    if (v < best.q) {
      best = {zeros[i], v};
      best_index = i;
    }
  }
  double lo = best_index == zeros.size() ? std::min(0.0, zeros.front()) : zeros[best_index >= stride ? best_index - stride : 0];
  double hi = best_index == zeros.size() ? std::max(0.0, zeros.back())
                                         : zeros[std::min(zeros.size() - 1, best_index + stride)];
  if (best_index == zeros.size()) {
    lo = std::min(lo, -1.0);
    hi = std::max(hi, 1.0);
  }
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = eval(c), fd = eval(d);
  for (int it = 0; it < 30; ++it) {
    if (fc < best.q) best = {c, fc};
    if (fd < best.q) best = {d, fd};
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = eval(d);
    }
  }
  if (fc < best.q) best = {c, fc};
  if (fd < best.q) best = {d, fd};
  return best;
}

struct ExchangeOutcome {
  bool compact = true;
  Matrix a;      // compact: columns normalized to quantile 1
  Matrix f;      // values of those columns, tracked through the exchanges
  Vector small;  // degenerate: a direction with negligible quantile
  int exchanges = 0;
};

bool negligible(double q, const Vector& values) {
  const double scale = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  return q <= 1e-12 * scale;
}

// Greedy seeding by the L^2(mu)-whitened basis, then single exchanges: f_j
// is replaced by (f_j + sum_{i != j} c_i f_i) / q whenever that quantile q
// drops below 1, which multiplies |det| by 1/q. At a fixed point no single
// exchange raises |det|, so every Cramer coefficient is at most 1.
ExchangeOutcome exchange_search(const Matrix& v, const Vector& w, double eps) {
  const Eigen::Index d = v.cols();
  ExchangeOutcome out;
  const Matrix gram = v.transpose() * w.asDiagonal() * v;
  Matrix a = spd_inverse_sqrt(0.5 * (gram + gram.transpose()), Tolerances{1e-14, 1e-9});
  Matrix f = v * a;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double q = upper_quantile(f.col(j), w, eps);
    if (negligible(q, f.col(j))) {
      out.compact = false;
      out.small = a.col(j);
      return out;
    }
    a.col(j) /= q;
    f.col(j) /= q;
  }
  for (int round = 0; round < 40; ++round) {
    bool improved = false;
    for (Eigen::Index j = 0; j < d; ++j) {
      Vector coeff = Vector::Unit(d, j);
      Vector current = f.col(j);
      double q = upper_quantile(current, w, eps);
      for (int sweep = 0; sweep < 4; ++sweep) {
        bool changed = false;
        for (Eigen::Index i = 0; i < d; ++i) {
          if (i == j) continue;
          const LineMin lm = line_minimize(current, f.col(i), w, eps);
          if (lm.q < q * (1.0 - 1e-12)) {
            current += lm.t * f.col(i);
            coeff(i) += lm.t;
            q = lm.q;
            changed = true;
          }
        }
        if (!changed) break;
      }
      if (negligible(q, current)) {
        out.compact = false;
        out.small = a * coeff;
        return out;
      }
      if (q < 1.0 - 1e-9) {
        a.col(j) = a * coeff / q;
        f.col(j) = current / q;
        improved = true;
        ++out.exchanges;
      }
    }
    if (!improved) break;
  }
  out.a = a;
  out.f = f;
  return out;
}

struct Split {
  Matrix kernel;  // columns spanning the null space
  Matrix range;   // complement
};

Split split_by_rank(const Matrix& values, Eigen::Index dim) {
  Split s;
  if (values.rows() == 0) {
    s.kernel = Matrix::Identity(dim, dim);
    s.range = Matrix(dim, 0);
    return s;
  }
  Eigen::JacobiSVD<Matrix> svd(values, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * top && top > 0.0) ++rank;
  s.range = svd.matrixV().leftCols(rank);
  s.kernel = svd.matrixV().rightCols(dim - rank);
  return s;
}

}  // namespace

ConvpropCertificate convprop_construct(const SampleSpace& space, double delta) {
  validate(space);
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("convprop_construct: delta must lie in (0, 1)");
  const double total = sum_weights(space.weights);
  if (!(total > 0.0)) throw InputError("convprop_construct: total weight is zero");
  const int d = space.dim();

  ConvpropCertificate cert;
  cert.delta = delta;
  cert.total_measure = total;
  std::vector<Vector> vanishing;
  Matrix bounded;
  std::vector<int> points(space.size());
  std::iota(points.begin(), points.end(), 0);
  Matrix coeffs = Matrix::Identity(d, d);  // current functions in basis coordinates
  double level_delta = delta;

  for (;;) {
    const Eigen::Index dcur = coeffs.cols();
    if (dcur == 0) {
      cert.selected = points;
      bounded = Matrix(d, 0);
      break;
    }
    Matrix v(points.size(), dcur);
    Vector w(points.size());
    for (std::size_t r = 0; r < points.size(); ++r) {
      v.row(r) = space.basis.row(points[r]) * coeffs;
      w(r) = space.weights(points[r]);
    }
    const double eps = level_delta / static_cast<double>(dcur) * sum_weights(w) * (1.0 - 1e-12);
    const double scale = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;

    // restrict to `keep`, dropping functions that vanish there
    auto reduce = [&](const std::vector<int>& keep) {
      Matrix kept(keep.size(), dcur);
      for (std::size_t r = 0; r < keep.size(); ++r) kept.row(r) = v.row(keep[r]);
      const Split s = split_by_rank(kept, dcur);
      if (s.kernel.cols() == 0) return false;
      for (Eigen::Index c = 0; c < s.kernel.cols(); ++c) vanishing.push_back(coeffs * s.kernel.col(c));
      std::vector<int> next;
      for (int r : keep) next.push_back(points[r]);
      points = std::move(next);
      const double reduced_dim = static_cast<double>(s.range.cols());
      level_delta = reduced_dim * level_delta / (static_cast<double>(dcur) - level_delta);
      coeffs = coeffs * s.range;
      return true;
    };

    // functions that vanish on every point of positive weight
    std::vector<int> support;
    for (Eigen::Index r = 0; r < w.size(); ++r)
      if (w(r) > 0.0) support.push_back(static_cast<int>(r));
    {
      Matrix vs(support.size(), dcur);
      for (std::size_t r = 0; r < support.size(); ++r) vs.row(r) = v.row(support[r]);
      const Split s = split_by_rank(vs, dcur);
      if (s.kernel.cols() > 0) {
        const Matrix kv = v * s.kernel;
        std::vector<int> keep;
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
          if (w(r) > 0.0 || kv.row(r).cwiseAbs().maxCoeff() <= 1e-9 * std::max(scale, 1e-300)) {
            keep.push_back(static_cast<int>(r));
          }
        }
        if (reduce(keep)) continue;
      }
    }

    ExchangeOutcome ex = exchange_search(v, w, eps);
    cert.exchanges += ex.exchanges;
    if (!ex.compact) {
      // a nonzero function supported on a set of measure <= eps
      const Vector fv = v * ex.small;
      const double fmax = fv.cwiseAbs().maxCoeff();
      std::vector<int> keep;
      for (Eigen::Index r = 0; r < fv.size(); ++r)
        if (std::abs(fv(r)) <= 1e-12 * fmax) keep.push_back(static_cast<int>(r));
      if (reduce(keep)) continue;
      throw NumericalError("convprop_construct: degenerate direction did not reduce the dimension");
    }
    // the tracked values were normalized by exactly the quantile that was
    // tested, so rounding in v * a cannot push a point past the threshold
    const Matrix& f = ex.f;
    for (Eigen::Index r = 0; r < f.rows(); ++r)
      if (f.row(r).cwiseAbs().maxCoeff() <= 1.0 + 1e-12) cert.selected.push_back(points[r]);
    bounded = coeffs * ex.a;
    break;
  }

  cert.j0 = static_cast<int>(vanishing.size());
  cert.witness.resize(d, d);
  for (int j = 0; j < cert.j0; ++j) cert.witness.col(j) = vanishing[j];
  for (Eigen::Index j = 0; j < bounded.cols(); ++j) cert.witness.col(cert.j0 + j) = bounded.col(j);
  if (cert.j0 + bounded.cols() != d) throw NumericalError("convprop_construct: witness count mismatch");
  std::vector<double> sel;
  for (int i : cert.selected) sel.push_back(space.weights(i));
  cert.selected_measure = pairwise_sum(sel);
  return cert;
}

std::vector<double> separated_points(const std::vector<std::pair<double, double>>& intervals, int count) {
  if (count < 1) throw InputError("separated_points: count must be positive");
  std::vector<std::pair<double, double>> pieces;
  for (const auto& [a, b] : intervals) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw InputError("separated_points: non-finite endpoint");
    if (b > a) pieces.push_back({a, b});
  }
  std::sort(pieces.begin(), pieces.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& piece : pieces) {
    if (!merged.empty() && piece.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, piece.second);
    } else {
      merged.push_back(piece);
    }
  }
  double length = 0.0;
  for (const auto& [a, b] : merged) length += b - a;
  if (!(length > 0.0)) throw InputError("separated_points: F has zero measure");

  // cells [m h, (m+1) h); F meets at least 2 count - 1 of them in positive measure
  const double h = length / (2.0 * count - 1.0);
  std::map<long long, double> occupied;  // cell -> a point of F inside it
  for (const auto& [a, b] : merged) {
    const long long first = static_cast<long long>(std::floor(a / h));
    const long long last = static_cast<long long>(std::floor(b / h));
    for (long long m = first; m <= last; ++m) {
      const double lo = std::max(a, m * h);
      const double hi = std::min(b, (m + 1) * h);
      if (hi > lo && !occupied.count(m)) occupied[m] = 0.5 * (lo + hi);
    }
  }
  std::vector<double> out;
  long long previous = std::numeric_limits<long long>::min() / 2;
  for (const auto& [m, x] : occupied) {
    if (static_cast<int>(out.size()) == count) break;
    if (m >= previous + 2) {
      out.push_back(x);
      previous = m;
    }
  }
  if (static_cast<int>(out.size()) < count) {
    throw NumericalError("separated_points: found only " + std::to_string(out.size()) + " non-adjacent cells");
  }
  return out;
}

namespace {

double periodic_minor(const Matrix& lambda, int start, int c) {
  const int k = static_cast<int>(lambda.cols());
  Matrix sub(c, c);
  for (int a = 0; a < c; ++a) sub.col(a) = lambda.col((start + a) % k);
  return det(sub);
}

}  // namespace

std::vector<double> minor_condition(const QuadraticModel& model) {
  validate(model);
  std::vector<double> minors;
  for (int i = 0; i < model.k; ++i) minors.push_back(periodic_minor(model.lambda, i, model.c()));
  return minors;
}

double signed_minor_product(const QuadraticModel& model) {
  validate(model);
  double product = 1.0;
  for (int j = 0; j < model.k; ++j) product *= periodic_minor(model.lambda, (j * model.c()) % model.k, model.c());
  return product;
}

double density_K(const QuadraticModel& model) { return std::abs(signed_minor_product(model)); }

double upper_right_phi(const QuadraticModel& model, const std::vector<Vector>& t, const Vector& base) {
  validate(model);
  if (static_cast<int>(t.size()) != model.k) throw InputError("upper_right_phi: need k parameter vectors");
  std::vector<Matrix> blocks;
  for (const Vector& ti : t) blocks.push_back(quadratic_b(model, ti - base));
  return det(quadratic_upper_right(model.k, model.c(), blocks));
}

double upper_right_derivative(const QuadraticModel& model, const Matrix& u, const Vector& base,
                              const std::vector<int>& order) {
  validate(model);
  const int k = model.k;
  const int c = model.c();
  if (k * c > 6) throw InputError("upper_right_derivative: k c exceeds the exact-evaluation budget of 6");
  if (u.rows() != k || u.cols() != k) throw InputError("upper_right_derivative: U must be k x k");
  if (base.size() != k) throw InputError("upper_right_derivative: base point must have length k");
  if (static_cast<int>(order.size()) != k) throw InputError("upper_right_derivative: need one order per variable");

  struct Direction {
    int variable;
    Vector v;
  };
  std::vector<Direction> dirs;
  for (int i = 0; i < k; ++i) {
    if (order[i] < 0 || order[i] > c) throw InputError("upper_right_derivative: orders must lie in 0..c");
    for (int a = 0; a < order[i]; ++a) dirs.push_back({i, u.col((i * c + a) % k)});
  }
  const int r = static_cast<int>(dirs.size());

  // phi is a polynomial of degree <= c in each s; the coefficient of s^1 of
  // the interpolant through nodes 0..c is a fixed combination of values
  Matrix vand(c + 1, c + 1);
  for (int x = 0; x <= c; ++x)
    for (int p = 0; p <= c; ++p) vand(x, p) = std::pow(static_cast<double>(x), p);
  const Vector lin = vand.inverse().row(1).transpose();

  long total = 1;
  for (int a = 0; a < r; ++a) total *= (c + 1);
  std::vector<double> terms(total);
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    std::vector<Vector> t(k, base);
    double weight = 1.0;
    for (int a = 0; a < r; ++a) {
      const int node = static_cast<int>(rest % (c + 1));
      rest /= (c + 1);
      weight *= lin(node);
      if (node != 0) t[dirs[a].variable] += node * dirs[a].v;
    }
    terms[idx] = weight == 0.0 ? 0.0 : weight * upper_right_phi(model, t, base);
  }
  return pairwise_sum(terms);
}

DerivativeCheck derivative_identity_check(const QuadraticModel& model, const Matrix& u, const Vector& base) {
  validate(model);
  const int k = model.k;
  const int c = model.c();
  if (u.rows() != k || u.cols() != k) throw InputError("derivative_identity_check: U must be k x k");
  const double uscale = std::max(u.cwiseAbs().maxCoeff(), 1e-300);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(u(i, j)) > 1e-12 * uscale) throw InputError("derivative_identity_check: U must be upper-triangular");
  DerivativeCheck out;
  out.lhs = upper_right_derivative(model, u, base, std::vector<int>(k, c));
  out.rhs = std::pow(det(u), c) * signed_minor_product(model);
  const double lscale = model.lambda.cwiseAbs().maxCoeff();
  out.discrepancy = relative_difference(out.lhs, out.rhs, 1e-14 * std::pow(uscale * lscale, k * c));
  return out;
}

}  // namespace radonbl
