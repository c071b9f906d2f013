// Distance and regularity estimators: empirical Wasserstein-2 (exact sorted
// form in 1-D, sliced in higher dimension), moment tracking, mean-squared
// displacement probes, and log-log slope fits.

#ifndef RBM_METRICS_HPP
#define RBM_METRICS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rbm/ensemble.hpp"
#include "rbm/stats.hpp"

namespace rbm {

// Sample set of one marginal (e.g. first-particle positions across replicas).
struct EmpiricalMarginal {
  int dimension = 1;
  std::vector<double> samples;  // count x dimension, row-major
  std::string label;

  int count() const {
    return dimension > 0 ? static_cast<int>(samples.size()) / dimension : 0;
  }
};

// Exact empirical W2 between equal-size 1-D sample sets: sort both, root mean
// squared difference of order statistics.
double wasserstein2_1d(const EmpiricalMarginal& a, const EmpiricalMarginal& b);

// Sliced W2 for dimension >= 2: average squared 1-D W2 of projections onto
// uniformly random unit directions, square-rooted. Deterministic given seed.
double wasserstein2_sliced(const EmpiricalMarginal& a, const EmpiricalMarginal& b,
                           int directions, std::uint64_t seed);

struct MomentPoint {
  double time = 0.0;
  double value = 0.0;  // q-th moment pooled over particles and replicas
  double se = 0.0;     // from replica-to-replica variation
};

// q-th absolute moment time series; snapshots[replica][time_index] must share
// one time grid across replicas. q in {2, 4}.
std::vector<MomentPoint> moment_track(const std::vector<std::vector<Ensemble>>& snapshots,
                                      int q);

struct DisplacementPoint {
  double dt = 0.0;
  double value = 0.0;  // mean |X(t2) - X(t1)|^2 pooled over particles/replicas
  double se = 0.0;
};

// Mean squared displacement for the requested snapshot index pairs.
std::vector<DisplacementPoint> holder_probe(
    const std::vector<std::vector<Ensemble>>& snapshots,
    const std::vector<std::pair<int, int>>& index_pairs);

struct SlopeFit {
  std::vector<double> kappas;
  std::vector<double> errors;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least-squares fit of log(error) against log(kappa). Requires >= 3 points,
// kappa strictly decreasing, all errors positive.
SlopeFit fit_slope(std::span<const double> kappas, std::span<const double> errors);

}  // namespace rbm

#endif  // RBM_METRICS_HPP
