#include "radonbl/invariant_poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <utility>

#include "radonbl/linops.hpp"
#include "radonbl/parallel.hpp"
#include "radonbl/rng.hpp"

namespace radonbl {

BlockPolySpec::BlockPolySpec(int n, int k, int m, int s, std::vector<Placement> placements)
    : n_(n), k_(k), m_(m), s_(s), placements_(std::move(placements)) {
  if (n_ < 1 || k_ < 0 || k_ >= n_ || m_ < 1 || s_ < 1) {
    throw InputError("block spec: need n >= 1, 0 <= k < n, m >= 1, s >= 1");
  }
  const int h = n_ - k_;
  if ((n_ * s_) % h != 0) throw InputError("block spec: ns is not a multiple of the row height n-k");
  block_rows_ = n_ * s_ / h;

  row_map_.assign(block_rows_, -1);
  std::vector<int> row_nonzero(block_rows_, 0);
  std::vector<int> col_nonzero(s_, 0);
  std::set<std::pair<int, int>> seen;
  for (const Placement& p : placements_) {
    if (p.map < 0 || p.map >= m_ || p.block_row < 0 || p.block_row >= block_rows_ || p.block_col < 0 ||
        p.block_col >= s_) {
      throw InputError("block spec: placement (" + std::to_string(p.map) + "," + std::to_string(p.block_row) +
                       "," + std::to_string(p.block_col) + ") out of range");
    }
    if (!std::isfinite(p.coeff)) throw InputError("block spec: non-finite coefficient");
    if (!seen.insert({p.block_row, p.block_col}).second) {
      throw InputError("block spec: duplicate placement at block (" + std::to_string(p.block_row) + "," +
                       std::to_string(p.block_col) + ")");
    }
    int& owner = row_map_[p.block_row];
    if (owner >= 0 && owner != p.map) {
      throw InputError("block spec: block row " + std::to_string(p.block_row) + " mixes maps");
    }
    owner = p.map;
    if (p.coeff != 0.0) {
      ++row_nonzero[p.block_row];
      ++col_nonzero[p.block_col];
    }
  }
  std::vector<int> rows_per_map(m_, 0);
  for (int r = 0; r < block_rows_; ++r) {
    if (row_map_[r] < 0) throw InputError("block spec: block row " + std::to_string(r) + " is empty");
    if (row_nonzero[r] > h) {
      throw InputError("block spec: block row " + std::to_string(r) + " has more than n-k nonzero blocks");
    }
    ++rows_per_map[row_map_[r]];
  }
  for (int c = 0; c < s_; ++c) {
    if (col_nonzero[c] > n_) {
      throw InputError("block spec: block column " + std::to_string(c) + " has more than n nonzero blocks");
    }
  }
  // each map owns p s block rows with p = n / (m (n-k))
  for (int j = 0; j < m_; ++j) {
    if (static_cast<long>(rows_per_map[j]) * m_ * h != static_cast<long>(n_) * s_) {
      throw InputError("block spec: map " + std::to_string(j) + " owns " + std::to_string(rows_per_map[j]) +
                       " block rows; the exponent balance requires n s / (m (n-k))");
    }
    degrees_.push_back(rows_per_map[j] * h);
  }
}

int BlockPolySpec::common_degree() const {
  for (int d : degrees_)
    if (d != degrees_.front()) return -1;
  return degrees_.front();
}

namespace {

void check_maps(const BlockPolySpec& spec, const std::vector<Matrix>& maps) {
  if (static_cast<int>(maps.size()) != spec.m()) {
    throw InputError("block spec expects " + std::to_string(spec.m()) + " maps, got " +
                     std::to_string(maps.size()));
  }
  for (std::size_t j = 0; j < maps.size(); ++j) {
    if (maps[j].rows() != spec.row_height() || maps[j].cols() != spec.n()) {
      throw InputError("block spec: map " + std::to_string(j) + " must be " + std::to_string(spec.row_height()) +
                       "x" + std::to_string(spec.n()));
    }
  }
}

// Product of HS norms raised to the degrees: the natural magnitude of Phi.
double phi_scale(const BlockPolySpec& spec, const std::vector<Matrix>& maps) {
  double scale = 1.0;
  double coeff = 0.0;
  for (const Placement& p : spec.placements()) coeff = std::max(coeff, std::abs(p.coeff));
  for (int j = 0; j < spec.m(); ++j) scale *= std::pow(std::max(coeff, 1.0) * hs_norm(maps[j]), spec.degrees()[j]);
  return scale;
}

}  // namespace

Matrix assemble(const BlockPolySpec& spec, const std::vector<Matrix>& maps) {
  check_maps(spec, maps);
  const int h = spec.row_height();
  Matrix out = Matrix::Zero(spec.size(), spec.size());
  for (const Placement& p : spec.placements()) {
    out.block(p.block_row * h, p.block_col * spec.n(), h, spec.n()) = p.coeff * maps[p.map];
  }
  return out;
}

double eval_phi(const BlockPolySpec& spec, const std::vector<Matrix>& maps) {
  return det(assemble(spec, maps));
}

BlockPolySpec staircase_spec(int n, int k, int m) {
  std::vector<Placement> placements;
  for (int j = 0; j + 1 < m; ++j) placements.push_back({j, j, j, 1.0});
  for (int col = 0; col + 1 < m; ++col) placements.push_back({m - 1, m - 1, col, 1.0});
  return BlockPolySpec(n, k, m, m - 1, std::move(placements));
}

BlockPolySpec moment_curve_spec(int n) {
  if (n < 2) throw InputError("moment_curve_spec: n must be at least 2");
  return staircase_spec(n, 1, n);
}

Matrix moment_curve_pi(double t, int n) {
  if (n < 2) throw InputError("moment_curve_pi: n must be at least 2");
  Matrix pi = Matrix::Zero(n - 1, n);
  double power = t;  // t^{i-1} for row i = 2..n
  for (int i = 2; i <= n; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    pi(i - 2, 0) = sign * i * power;
    pi(i - 2, i - 1) = 1.0;
    power *= t;
  }
  return pi;
}

std::vector<Matrix> moment_curve_maps(const std::vector<double>& t, int n) {
  if (static_cast<int>(t.size()) != n) throw InputError("moment_curve_maps: need n parameters");
  std::vector<Matrix> maps;
  for (double ti : t) maps.push_back(moment_curve_pi(ti, n));
  return maps;
}

bool upper_right_on_diagonal(int k, int c, int i, int j) {
  // entries (r, r) with r in block row i are r = i c .. i c + c - 1;
  // they fall in block column floor(r / k)
  for (int r = i * c; r < (i + 1) * c; ++r)
    if (r / k == j) return true;
  return false;
}

BlockPolySpec quadratic_model_spec(const QuadraticModel& model) {
  validate(model);
  const int k = model.k;
  const int c = model.c();
  std::vector<Placement> placements;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < c; ++j)
      if (upper_right_on_diagonal(k, c, i, j)) placements.push_back({i, i, j, 1.0});
  for (int i = 0; i < c; ++i) placements.push_back({k + i, k + i, i, 1.0});
  return BlockPolySpec(model.n, k, model.n, c, std::move(placements));
}

Matrix quadratic_layout(const QuadraticModel& model, const std::vector<Matrix>& maps) {
  validate(model);
  const int n = model.n;
  const int k = model.k;
  const int c = model.c();
  if (static_cast<int>(maps.size()) != n) throw InputError("quadratic_layout: need n maps");
  for (const Matrix& pi : maps) {
    if (pi.rows() != c || pi.cols() != n) throw InputError("quadratic_layout: maps must be c x n");
  }
  Matrix out = Matrix::Zero(n * c, n * c);
  const int b_offset = c * c;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < c; ++j) {
      if (!upper_right_on_diagonal(k, c, i, j)) continue;
      out.block(i * c, j * c, c, c) = maps[i].leftCols(c);
      out.block(i * c, b_offset + j * k, c, k) = maps[i].rightCols(k);
    }
  }
  for (int i = 0; i < c; ++i) {
    out.block(k * c + i * c, i * c, c, c) = maps[k + i].leftCols(c);
    out.block(k * c + i * c, b_offset + i * k, c, k) = maps[k + i].rightCols(k);
  }
  return out;
}

Matrix quadratic_upper_right(int k, int c, const std::vector<Matrix>& b) {
  if (static_cast<int>(b.size()) != k) throw InputError("quadratic_upper_right: need k blocks");
  Matrix out = Matrix::Zero(k * c, k * c);
  for (int i = 0; i < k; ++i) {
    if (b[i].rows() != c || b[i].cols() != k) throw InputError("quadratic_upper_right: blocks must be c x k");
    for (int j = 0; j < c; ++j)
      if (upper_right_on_diagonal(k, c, i, j)) out.block(i * c, j * k, c, k) = b[i];
  }
  return out;
}

BlockPolySpec max_codim_spec(int k) {
  if (k < 1) throw InputError("max_codim_spec: k must be positive");
  return staircase_spec(k + k * k, k, k + 1);
}

double check_homogeneity(const BlockPolySpec& spec, const std::vector<Matrix>& maps,
                         const std::vector<double>& scalars) {
  check_maps(spec, maps);
  if (static_cast<int>(scalars.size()) != spec.m()) throw InputError("check_homogeneity: need one scalar per map");
  std::vector<Matrix> scaled = maps;
  double factor = 1.0;
  for (int j = 0; j < spec.m(); ++j) {
    scaled[j] *= scalars[j];
    factor *= std::pow(scalars[j], spec.degrees()[j]);
  }
  const double lhs = eval_phi(spec, scaled);
  const double rhs = factor * eval_phi(spec, maps);
  return relative_difference(lhs, rhs, 1e-13 * phi_scale(spec, scaled));
}

double check_sl_invariance(const BlockPolySpec& spec, const std::vector<Matrix>& maps, uint64_t seed, int trials) {
  check_maps(spec, maps);
  const double base = eval_phi(spec, maps);
  Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const Matrix a = random_unimodular(spec.n(), rng);
    std::vector<Matrix> moved = maps;
    for (int j = 0; j < spec.m(); ++j) {
      moved[j] = random_unimodular(spec.row_height(), rng) * maps[j] * a.transpose();
    }
    const double floor = 1e-13 * std::max(phi_scale(spec, maps), phi_scale(spec, moved));
    worst = std::max(worst, relative_difference(eval_phi(spec, moved), base, floor));
  }
  return worst;
}

namespace {

void normalize_maps(std::vector<Matrix>& maps) {
  for (Matrix& pi : maps) {
    const double norm = hs_norm(pi);
    if (norm > 0.0) pi /= norm;
  }
}

// Riemannian ascent of log|Phi| on the product of HS unit spheres.
double polish(const BlockPolySpec& spec, std::vector<Matrix> maps) {
  const int h = spec.row_height();
  double value = std::abs(eval_phi(spec, maps));
  double step = 0.5;
  for (int iter = 0; iter < 400 && value > 0.0; ++iter) {
    const Matrix mat = assemble(spec, maps);
    Eigen::PartialPivLU<Matrix> lu(mat);
    const Matrix inv_t = lu.inverse().transpose();
    std::vector<Matrix> grad(spec.m());
    for (int j = 0; j < spec.m(); ++j) grad[j] = Matrix::Zero(h, spec.n());
    for (const Placement& p : spec.placements()) {
      grad[p.map] += p.coeff * inv_t.block(p.block_row * h, p.block_col * spec.n(), h, spec.n());
    }
    double gnorm2 = 0.0;
    for (int j = 0; j < spec.m(); ++j) {
      grad[j] -= (grad[j].cwiseProduct(maps[j]).sum()) * maps[j];
      gnorm2 += grad[j].squaredNorm();
    }
    if (!(gnorm2 > 1e-28)) break;
    bool improved = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      std::vector<Matrix> trial = maps;
      for (int j = 0; j < spec.m(); ++j) trial[j] += step * grad[j];
      normalize_maps(trial);
      const double v = std::abs(eval_phi(spec, trial));
      if (v > value) {
        maps = std::move(trial);
        improved = v > value * (1.0 + 1e-15);
        value = v;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return value;
}

}  // namespace

double estimate_phi_norm(const BlockPolySpec& spec, uint64_t seed, int budget) {
  if (budget < 1) throw InputError("estimate_phi_norm: budget must be at least 1");
  bool any_nonzero = false;
  for (const Placement& p : spec.placements()) any_nonzero = any_nonzero || p.coeff != 0.0;
  if (!any_nonzero) return 0.0;

  // fixed-size chunks with their own streams: a larger budget replays the
  // chunks of a smaller one, so the running max is monotone in the budget
  constexpr int kChunk = 100;
  const int chunks = (budget + kChunk - 1) / kChunk;
  std::vector<double> best(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    Rng rng(seed, c);
    const int count = std::min(kChunk, budget - static_cast<int>(c) * kChunk);
    std::vector<Matrix> best_maps;
    double best_value = -1.0;
    for (int s = 0; s < count; ++s) {
      std::vector<Matrix> maps(spec.m());
      for (Matrix& pi : maps) {
        pi.resize(spec.row_height(), spec.n());
        for (Eigen::Index i = 0; i < pi.size(); ++i) pi.data()[i] = rng.normal();
      }
      normalize_maps(maps);
      const double v = std::abs(eval_phi(spec, maps));
      if (v > best_value) {
        best_value = v;
        best_maps = std::move(maps);
      }
    }
    best[c] = std::max(best_value, polish(spec, best_maps));
  });
  return *std::max_element(best.begin(), best.end());
}

double weight_lower_bound(const BlockPolySpec& spec, const std::vector<Matrix>& maps, double phi_norm) {
  const int d = spec.common_degree();
  if (d <= 0) throw InputError("weight_lower_bound: the maps must share one degree");
  if (!(phi_norm > 0.0)) throw InputError("weight_lower_bound: the norm of Phi must be positive");
  const double value = std::abs(eval_phi(spec, maps));
  if (value == 0.0) return 0.0;
  const double c = spec.row_height();
  const double ratio = c / d;
  return std::pow(c, -spec.m() * c / 2.0) * std::pow(value / phi_norm, ratio);
}

namespace {

struct Grouping {
  std::vector<int> group;
  std::vector<int> rank;
};

Grouping grouping(const std::vector<std::vector<int>>& parts, int size, const char* name) {
  Grouping g{std::vector<int>(size, -1), std::vector<int>(size, -1)};
  for (std::size_t p = 0; p < parts.size(); ++p) {
    std::vector<int> members = parts[p];
    std::sort(members.begin(), members.end());
    for (std::size_t r = 0; r < members.size(); ++r) {
      const int l = members[r];
      if (l < 0 || l >= size || g.group[l] >= 0) {
        throw InputError(std::string("contraction: partition ") + name + " is not a partition of the index set");
      }
      g.group[l] = static_cast<int>(p);
      g.rank[l] = static_cast<int>(r);
    }
  }
  for (int l = 0; l < size; ++l)
    if (g.group[l] < 0) throw InputError(std::string("contraction: partition ") + name + " misses an index");
  return g;
}

int validate_family(const ContractionFamily& f) {
  const int size = static_cast<int>(f.map_of.size());
  if (size < 1 || size > 8) throw InputError("contraction: index set must have 1..8 elements");
  if (f.maps.empty()) throw InputError("contraction: no maps");
  const Eigen::Index n = f.maps.front().cols();
  for (const Matrix& pi : f.maps)
    if (pi.cols() != n) throw InputError("contraction: maps must share the column count n");
  for (int j : f.map_of)
    if (j < 0 || j >= static_cast<int>(f.maps.size())) throw InputError("contraction: bad map index");
  grouping(f.I, size, "I");
  grouping(f.J, size, "J");
  for (const auto& part : f.I) {
    const int j = f.map_of[part.front()];
    for (int l : part)
      if (f.map_of[l] != j) throw InputError("contraction: an I group mixes maps");
    if (static_cast<Eigen::Index>(part.size()) != f.maps[j].rows()) {
      throw InputError("contraction: I group size must equal the row count of its map");
    }
  }
  for (const auto& part : f.J)
    if (static_cast<Eigen::Index>(part.size()) != n) throw InputError("contraction: J groups must have size n");
  return size;
}

int permutation_sign(const std::vector<int>& perm) {
  std::vector<bool> seen(perm.size(), false);
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = perm[j]) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

// All permutations of 0..size-1 that map every part into itself.
std::vector<std::pair<std::vector<int>, int>> group_permutations(const std::vector<std::vector<int>>& parts,
                                                                 int size) {
  std::vector<std::pair<std::vector<int>, int>> out;
  std::vector<int> perm(size);
  std::iota(perm.begin(), perm.end(), 0);
  auto recurse = [&](auto&& self, std::size_t p) -> void {
    if (p == parts.size()) {
      out.emplace_back(perm, permutation_sign(perm));
      return;
    }
    std::vector<int> members = parts[p];
    std::sort(members.begin(), members.end());
    std::vector<int> images = members;
    do {
      for (std::size_t r = 0; r < members.size(); ++r) perm[members[r]] = images[r];
      self(self, p + 1);
    } while (std::next_permutation(images.begin(), images.end()));
  };
  recurse(recurse, 0);
  return out;
}

}  // namespace

namespace {

constexpr double kTermBudget = 5e7;

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

}  // namespace

double contraction_term_count(const ContractionFamily& f) {
  double count = 1.0;
  for (const auto& part : f.I) count *= factorial(part.size());
  for (const auto& part : f.J) count *= factorial(part.size());
  return count;
}

std::vector<ContractionFamily> contraction_families(int max_size, uint64_t seed) {
  if (max_size < 1 || max_size > 8) throw InputError("contraction_families: max_size must lie in 1..8");
  std::vector<ContractionFamily> out;
  Rng rng(seed);
  for (int n = 1; n <= max_size; ++n)
    for (int k = 0; k < n; ++k)
      for (int s = 1; n * s <= max_size; ++s) {
        const int rows = n - k;
        const int size = n * s;
        if (size % rows != 0) continue;
        const int groups = size / rows;
        for (int m = 1; m <= groups; ++m) {
          ContractionFamily f;
          for (int j = 0; j < m; ++j) {
            Matrix pi(rows, n);
            for (int a = 0; a < rows; ++a)
              for (int b = 0; b < n; ++b) pi(a, b) = rng.normal();
            f.maps.push_back(pi);
          }
          std::vector<int> labels_i(size), labels_j(size);
          std::iota(labels_i.begin(), labels_i.end(), 0);
          std::iota(labels_j.begin(), labels_j.end(), 0);
          for (int a = size - 1; a > 0; --a) {
            std::swap(labels_i[a], labels_i[rng.below(a + 1)]);
            std::swap(labels_j[a], labels_j[rng.below(a + 1)]);
          }
          f.map_of.assign(size, 0);
          for (int g = 0; g < groups; ++g) {
            std::vector<int> part(labels_i.begin() + g * rows, labels_i.begin() + (g + 1) * rows);
            for (int l : part) f.map_of[l] = g % m;
            f.I.push_back(part);
          }
          for (int g = 0; g < s; ++g) f.J.emplace_back(labels_j.begin() + g * n, labels_j.begin() + (g + 1) * n);
          if (contraction_term_count(f) <= kTermBudget) out.push_back(std::move(f));
        }
      }
  return out;
}

namespace {

// Partial-pivoting LU determinant in long double.
long double det_extended(Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> a) {
  const Eigen::Index n = a.rows();
  long double result = 1.0L;
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (a(pivot, col) == 0.0L) return 0.0L;
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      result = -result;
    }
    result *= a(col, col);
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const long double factor = a(r, col) / a(col, col);
      a.row(r).tail(n - col - 1) -= factor * a.row(col).tail(n - col - 1);
    }
  }
  return result;
}

}  // namespace

double contraction_enumerate(const ContractionFamily& f) {
  const int size = validate_family(f);
  const Grouping gi = grouping(f.I, size, "I");
  const Grouping gj = grouping(f.J, size, "J");
  const auto sigmas = group_permutations(f.I, size);
  const auto taus = group_permutations(f.J, size);
  if (static_cast<double>(sigmas.size()) * static_cast<double>(taus.size()) > kTermBudget) {
    throw InputError("contraction: enumeration exceeds the term budget");
  }
  // extended precision keeps the cancellation error well below the identity tolerance
  long double total = 0.0L;
  for (const auto& [sigma, s_sign] : sigmas) {
    long double inner = 0.0L;
    for (const auto& [tau, t_sign] : taus) {
      long double term = s_sign * t_sign;
      for (int l = 0; l < size && term != 0.0L; ++l) {
        term *= f.maps[f.map_of[l]](gi.rank[sigma[l]], gj.rank[tau[l]]);
      }
      inner += term;
    }
    total += inner;
  }
  return static_cast<double>(total);
}

double contraction_polarize(const ContractionFamily& f) {
  const int size = validate_family(f);
  const Grouping gi = grouping(f.I, size, "I");
  const Grouping gj = grouping(f.J, size, "J");
  // pi_lambda as size x size matrices
  std::vector<Matrix> lifted(size, Matrix::Zero(size, size));
  for (int l = 0; l < size; ++l) {
    const Matrix& pi = f.maps[f.map_of[l]];
    for (int row = 0; row < size; ++row) {
      if (gi.group[row] != gi.group[l]) continue;
      for (int col = 0; col < size; ++col) {
        if (gj.group[col] != gj.group[l]) continue;
        lifted[l](row, col) = pi(gi.rank[row], gj.rank[col]);
      }
    }
  }
  // the coefficient of t_1 ... t_L in the degree-L form det(sum t_l pi_l)
  using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  long double total = 0.0L;
  for (unsigned mask = 1; mask < (1u << size); ++mask) {
    MatrixL sum = MatrixL::Zero(size, size);
    int bits = 0;
    for (int l = 0; l < size; ++l) {
      if (mask & (1u << l)) {
        sum += lifted[l].cast<long double>();
        ++bits;
      }
    }
    const long double sign = ((size - bits) % 2 == 0) ? 1.0L : -1.0L;
    total += sign * det_extended(sum);
  }
  return static_cast<double>(total);
}

ContractionResult contraction_identity_check(const ContractionFamily& f) {
  ContractionResult r;
  r.enumerated = contraction_enumerate(f);
  r.polarized = contraction_polarize(f);
  r.difference = std::abs(r.enumerated - r.polarized);
  return r;
}

}  // namespace radonbl
