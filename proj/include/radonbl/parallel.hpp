#ifndef RADONBL_PARALLEL_HPP
#define RADONBL_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace radonbl {

// Number of worker threads: hardware concurrency, capped by RADONBL_THREADS.
int worker_count();

// Runs body(i) for i in [0, count). Work is split into contiguous index
// ranges; callers write results into per-index slots so the outcome does
// not depend on the number of workers.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Pairwise (cascade) summation.
double pairwise_sum(const double* values, std::size_t count);
inline double pairwise_sum(const std::vector<double>& values) {
  return pairwise_sum(values.data(), values.size());
}

}  // namespace radonbl

#endif  // RADONBL_PARALLEL_HPP
