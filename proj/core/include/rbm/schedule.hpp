// Random batch selection: uniform p-subsets (with-replacement scheme) and
// random partitions into N/p disjoint batches (without-replacement scheme).

#ifndef RBM_SCHEDULE_HPP
#define RBM_SCHEDULE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "rbm/rng.hpp"

namespace rbm {

// Realized batch sequence for one replica, flat storage (batch k occupies
// [k*p, (k+1)*p), indices ascending within a batch).
struct BatchSchedule {
  int particles = 0;
  int batch_size = 0;
  std::vector<int> flat;

  long intervals() const {
    return batch_size > 0 ? static_cast<long>(flat.size()) / batch_size : 0;
  }
  std::span<const int> batch(long k) const {
    return {flat.data() + static_cast<std::size_t>(k) * batch_size,
            static_cast<std::size_t>(batch_size)};
  }
};

// Uniform p-subset of {0..N-1} by partial Fisher-Yates; consumes exactly p
// draws from the stream. Output sorted ascending. Requires 2 <= p <= N.
void sample_batch(int particles, int batch_size, StreamRng& rng, std::span<int> out);
std::vector<int> sample_batch(int particles, int batch_size, StreamRng& rng);

// Uniform random partition of {0..N-1} into N/p batches of size p: full
// Fisher-Yates permutation (N-1 draws), chunked, each chunk sorted.
// Requires p | N.
std::vector<std::vector<int>> sample_partition(int particles, int batch_size,
                                               StreamRng& rng);

// i.i.d. uniform p-subsets for the given number of intervals.
BatchSchedule sample_schedule(int particles, int batch_size, long intervals,
                              StreamRng& rng);

}  // namespace rbm

#endif  // RBM_SCHEDULE_HPP
