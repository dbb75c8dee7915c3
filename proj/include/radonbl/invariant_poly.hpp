#ifndef RADONBL_INVARIANT_POLY_HPP
#define RADONBL_INVARIANT_POLY_HPP

#include <cstdint>
#include <vector>

#include "radonbl/common.hpp"
#include "radonbl/models.hpp"

namespace radonbl {

struct Placement {
  int map = 0;
  int block_row = 0;
  int block_col = 0;
  double coeff = 1.0;
};

// Layout of an ns x ns block matrix whose blocks are scalar multiples of
// the maps pi_j (each (n-k) x n). Block rows have height n-k, block columns
// width n. Placement rules are checked on construction; the degree of the
// determinant in each map is derived from the layout.
class BlockPolySpec {
 public:
  BlockPolySpec(int n, int k, int m, int s, std::vector<Placement> placements);

  int n() const { return n_; }
  int k() const { return k_; }
  int m() const { return m_; }
  int s() const { return s_; }
  int row_height() const { return n_ - k_; }
  int block_rows() const { return block_rows_; }
  int size() const { return n_ * s_; }
  const std::vector<Placement>& placements() const { return placements_; }
  const std::vector<int>& degrees() const { return degrees_; }
  int row_map(int block_row) const { return row_map_[block_row]; }
  // The common degree when all maps have the same degree, otherwise -1.
  int common_degree() const;

 private:
  int n_, k_, m_, s_;
  int block_rows_ = 0;
  std::vector<Placement> placements_;
  std::vector<int> degrees_;
  std::vector<int> row_map_;
};

Matrix assemble(const BlockPolySpec& spec, const std::vector<Matrix>& maps);
double eval_phi(const BlockPolySpec& spec, const std::vector<Matrix>& maps);

// Diagonal blocks for maps 0..m-2 and a bottom block row repeating the
// last map across every block column. Used for the moment curve and the
// maximal-codimension operator.
BlockPolySpec staircase_spec(int n, int k, int m);

BlockPolySpec moment_curve_spec(int n);
// (n-1) x n: first column (2t, -3t^2, ..., (-1)^n n t^{n-1}), identity to the right.
Matrix moment_curve_pi(double t, int n);
std::vector<Matrix> moment_curve_maps(const std::vector<double>& t, int n);

// Blocks of the quadratic-model determinant. Map j is split as
// [A_j | B_j] (first c columns, last k columns).
BlockPolySpec quadratic_model_spec(const QuadraticModel& model);
// The nc x nc matrix with the upper-left / upper-right / lower-left /
// lower-right sub-block arrangement (columns grouped A-parts first).
Matrix quadratic_layout(const QuadraticModel& model, const std::vector<Matrix>& maps);
// Upper-right kc x kc part built from B_1..B_k.
Matrix quadratic_upper_right(int k, int c, const std::vector<Matrix>& b);
// True when the literal diagonal of the kc x kc upper-right part crosses
// block (i, j) (block rows of height c, block columns of width k).
bool upper_right_on_diagonal(int k, int c, int i, int j);

BlockPolySpec max_codim_spec(int k);

double check_homogeneity(const BlockPolySpec& spec, const std::vector<Matrix>& maps,
                         const std::vector<double>& scalars);
double check_sl_invariance(const BlockPolySpec& spec, const std::vector<Matrix>& maps, uint64_t seed,
                           int trials = 50);

// Lower estimate of max |Phi| over tuples with every |||pi_j||| <= 1.
double estimate_phi_norm(const BlockPolySpec& spec, uint64_t seed, int budget);

// (n-k)^{-m(n-k)/2} |||Phi|||^{-(n-k)/d} |Phi(maps)|^{(n-k)/d}
double weight_lower_bound(const BlockPolySpec& spec, const std::vector<Matrix>& maps, double phi_norm);

// Indices lambda in 0..L-1; map_of[lambda] picks the map. I groups share a
// map and have size = rows of that map; J groups have size n.
struct ContractionFamily {
  std::vector<Matrix> maps;
  std::vector<int> map_of;
  std::vector<std::vector<int>> I;
  std::vector<std::vector<int>> J;
};

struct ContractionResult {
  double enumerated = 0.0;
  double polarized = 0.0;
  double difference = 0.0;
};

double contraction_enumerate(const ContractionFamily& f);
double contraction_polarize(const ContractionFamily& f);
ContractionResult contraction_identity_check(const ContractionFamily& f);

// Number of (sigma, tau) pairs in the direct enumeration.
double contraction_term_count(const ContractionFamily& f);
// Seeded random families for every (n, k, s, m) with |Lambda| = n s <= max_size
// whose direct enumeration stays within the term budget. Index labels are
// shuffled so the I and J partitions interleave.
std::vector<ContractionFamily> contraction_families(int max_size, uint64_t seed);

}  // namespace radonbl

#endif  // RADONBL_INVARIANT_POLY_HPP
