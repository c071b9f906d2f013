// Counter-based random number generation for reproducible replica studies.
//
// Every stream is identified by a 64-bit key derived from (master seed,
// purpose, replica, ...) words, so adding replicas or reordering work items
// never perturbs the draws of existing ones. Streams are cheap to construct
// and hold no heap state.

#ifndef RBM_RNG_HPP
#define RBM_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <span>

namespace rbm {

// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Folds a sequence of words into a stream key.
constexpr std::uint64_t derive_key(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> words) {
  std::uint64_t key = mix64(seed);
  for (std::uint64_t w : words) key = mix64(key ^ w);
  return key;
}

// Stream purposes; part of the key so each consumer owns an independent
// substream.
enum class StreamPurpose : std::uint64_t {
  kBatch = 1,      // batch / partition sampling
  kNoise = 2,      // Gaussian increments of the dynamics
  kInitial = 3,    // initial particle positions
  kAudit = 4,      // assumption-audit sample points
  kDirection = 5,  // random projection directions
  kGeneric = 6,
};

constexpr std::uint64_t replica_key(std::uint64_t master_seed, StreamPurpose purpose,
                                    std::uint64_t replica, std::uint64_t stratum = 0) {
  return derive_key(master_seed,
                    {static_cast<std::uint64_t>(purpose), replica, stratum});
}

// Sequential SplitMix64 stream. One logical Gaussian draw may consume two
// uniforms (Box-Muller pair, spare cached).
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64() {
    ++draws_;
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in (0, 1]; never zero, so log() in Box-Muller is safe.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform in [0, 1).
  double next_unit_open() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit_open(); }

  // Uniform integer in [0, n); exactly one u64 draw (multiply-shift bound,
  // bias below 2^-53 for any n that fits a simulation index).
  std::uint64_t next_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  double next_gaussian();
  void fill_gaussian(std::span<double> out);

  // Count of logical draws (u64 or Gaussian) made so far; used by tests that
  // pin the noise budget.
  std::uint64_t draw_count() const { return draws_; }
  std::uint64_t gaussian_count() const { return gaussians_; }

 private:
  std::uint64_t state_;
  std::uint64_t draws_ = 0;
  std::uint64_t gaussians_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rbm

#endif  // RBM_RNG_HPP
