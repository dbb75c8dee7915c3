#ifndef RADONBL_RNG_HPP
#define RADONBL_RNG_HPP

#include <cstdint>

namespace radonbl {

uint64_t mix64(uint64_t z);

// Derive an independent stream key from a parent key and a stream index.
uint64_t derive_seed(uint64_t seed, uint64_t stream);

// Counter-based generator: the i-th draw is mix64(key + i * golden), so a
// stream is fully determined by (seed, stream index) and can be split
// across workers without shared state.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0) : key_(derive_seed(seed, stream)) {}

  uint64_t next_u64();
  double uniform();  // [0, 1)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal();
  uint64_t below(uint64_t bound);  // uniform integer in [0, bound)

  Rng split(uint64_t stream) const;

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace radonbl

#endif  // RADONBL_RNG_HPP
