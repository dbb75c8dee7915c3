#include "radonbl/rng.hpp"

#include <cmath>
#include <numbers>

namespace radonbl {

namespace {
constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  return mix64(mix64(seed + kGolden) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

uint64_t Rng::next_u64() { return mix64(key_ + (++counter_) * kGolden); }

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

uint64_t Rng::below(uint64_t bound) {
  if (bound <= 1) return 0;
  // rejection to avoid modulo bias
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t v = next_u64();
  while (v >= limit) v = next_u64();
  return v % bound;
}

Rng Rng::split(uint64_t stream) const {
  Rng child(0);
  child.key_ = derive_seed(key_, stream);
  return child;
}

}  // namespace radonbl
