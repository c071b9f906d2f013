#include "rbm/schedule.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rbm {

namespace {

void check_batch_args(int particles, int batch_size) {
  if (batch_size < 2) throw std::invalid_argument("sample_batch: batch_size must be >= 2");
  if (batch_size > particles) {
    throw std::invalid_argument("sample_batch: batch_size must be <= particle count");
  }
}

}  // namespace

void sample_batch(int particles, int batch_size, StreamRng& rng, std::span<int> out) {
  check_batch_args(particles, batch_size);
  // Partial Fisher-Yates over a scratch identity array; exactly p index draws.
  thread_local std::vector<int> pool;
  pool.resize(static_cast<std::size_t>(particles));
  std::iota(pool.begin(), pool.end(), 0);
  for (int j = 0; j < batch_size; ++j) {
    const auto offset = static_cast<int>(rng.next_index(static_cast<std::uint64_t>(particles - j)));
    std::swap(pool[j], pool[j + offset]);
    out[j] = pool[j];
  }
  std::sort(out.begin(), out.end());
}

std::vector<int> sample_batch(int particles, int batch_size, StreamRng& rng) {
  std::vector<int> out(static_cast<std::size_t>(batch_size));
  sample_batch(particles, batch_size, rng, out);
  return out;
}

std::vector<std::vector<int>> sample_partition(int particles, int batch_size,
                                               StreamRng& rng) {
  check_batch_args(particles, batch_size);
  if (particles % batch_size != 0) {
    throw std::invalid_argument("sample_partition: batch_size must divide particle count");
  }
  std::vector<int> perm(static_cast<std::size_t>(particles));
  std::iota(perm.begin(), perm.end(), 0);
  for (int j = particles - 1; j > 0; --j) {
    const auto k = static_cast<int>(rng.next_index(static_cast<std::uint64_t>(j + 1)));
    std::swap(perm[j], perm[k]);
  }
  const int count = particles / batch_size;
  std::vector<std::vector<int>> batches(static_cast<std::size_t>(count));
  for (int q = 0; q < count; ++q) {
    batches[q].assign(perm.begin() + static_cast<std::ptrdiff_t>(q) * batch_size,
                      perm.begin() + static_cast<std::ptrdiff_t>(q + 1) * batch_size);
    std::sort(batches[q].begin(), batches[q].end());
  }
  return batches;
}

BatchSchedule sample_schedule(int particles, int batch_size, long intervals,
                              StreamRng& rng) {
  check_batch_args(particles, batch_size);
  if (intervals < 0) throw std::invalid_argument("sample_schedule: intervals must be >= 0");
  BatchSchedule schedule;
  schedule.particles = particles;
  schedule.batch_size = batch_size;
  schedule.flat.resize(static_cast<std::size_t>(intervals) * batch_size);
  for (long k = 0; k < intervals; ++k) {
    std::span<int> slot{schedule.flat.data() + static_cast<std::size_t>(k) * batch_size,
                        static_cast<std::size_t>(batch_size)};
    sample_batch(particles, batch_size, rng, slot);
  }
  return schedule;
}

}  // namespace rbm
