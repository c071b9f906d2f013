#ifndef RBM_ENSEMBLE_HPP
#define RBM_ENSEMBLE_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace rbm {

// Positions of one replica's particles at a time point (physical time for the
// full system, pseudo-time for the with-replacement scheme).
struct Ensemble {
  int particles = 0;
  int dimension = 0;
  double time = 0.0;
  std::int64_t replica_id = 0;
  std::vector<double> positions;  // particles x dimension, row-major

  Ensemble() = default;
  Ensemble(int n, int d, double t = 0.0, std::int64_t replica = 0)
      : particles(n), dimension(d), time(t), replica_id(replica),
        positions(static_cast<std::size_t>(n) * static_cast<std::size_t>(d), 0.0) {}

  std::span<double> position(int i) {
    return {positions.data() + static_cast<std::size_t>(i) * dimension,
            static_cast<std::size_t>(dimension)};
  }
  std::span<const double> position(int i) const {
    return {positions.data() + static_cast<std::size_t>(i) * dimension,
            static_cast<std::size_t>(dimension)};
  }

  bool all_finite() const {
    for (double v : positions) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

}  // namespace rbm

#endif  // RBM_ENSEMBLE_HPP
