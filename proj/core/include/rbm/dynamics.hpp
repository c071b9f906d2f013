// Time steppers for the three dynamics: the full pairwise system, the
// random-batch scheme that advances everyone batch-wise each interval, and
// the with-replacement scheme that advances one picked batch per interval.
//
// Within an interval the flow is discretized by Euler-Maruyama substeps.
// Gaussian draws are consumed per interval in particle-major, substep-minor,
// ascending order; frozen particles consume none, and sigma = 0 consumes no
// draws at all. This fixed budget is what lets the coupled runner share
// increments between schemes.

#ifndef RBM_DYNAMICS_HPP
#define RBM_DYNAMICS_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbm/ensemble.hpp"
#include "rbm/model.hpp"
#include "rbm/rng.hpp"
#include "rbm/schedule.hpp"

namespace rbm {

enum class Scheme { kIps, kRbm1, kRbmr };

Scheme scheme_from_name(const std::string& name);
std::string scheme_name(Scheme scheme);

struct StepConfig {
  double kappa = 0.1;   // interval length
  int substeps = 1;     // Euler-Maruyama substeps per interval
  double horizon = 1.0; // physical horizon T
  Scheme scheme = Scheme::kIps;

  void validate() const;
};

// Thrown when a position goes non-finite.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(std::int64_t replica, double time)
      : std::runtime_error("trajectory blow-up: non-finite position in replica " +
                           std::to_string(replica) + " at time " + std::to_string(time)),
        replica_id(replica), time(time) {}
  std::int64_t replica_id;
  double time;
};

// Supplier of the standard-normal draws one particle consumes over one
// interval (substeps * dimension values). Called once per advancing particle
// per interval, ascending.
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual void interval_draws(int particle, std::span<double> out) = 0;
};

// Sequential stream adapter for plain (uncoupled) runs.
class StreamNoise final : public NoiseSource {
 public:
  explicit StreamNoise(std::uint64_t key) : rng_(key) {}
  void interval_draws(int /*particle*/, std::span<double> out) override {
    rng_.fill_gaussian(out);
  }
  StreamRng& stream() { return rng_; }

 private:
  StreamRng rng_;
};

// Batch interaction force on particle i: (1/(p-1)) sum_{j in batch, j != i}
// K(x^j - x^i), ascending j. Throws if i is not a batch member.
void batch_force(const ModelSpec& model, const Ensemble& ensemble,
                 std::span<const int> batch, int i, std::span<double> out,
                 ForceScratch& scratch);
std::vector<double> batch_force(const ModelSpec& model, const Ensemble& ensemble,
                                std::span<const int> batch, int i);

// In-place one-interval advancer with reusable buffers; the interval loops of
// the runners allocate nothing. Groups are sorted index sets whose members
// interact only with group mates at strength 1/(|group|-1); the
// all-particles group reproduces the full pairwise force, which is what makes
// the p = N degeneracies bit-exact.
class IntervalStepper {
 public:
  IntervalStepper(const ModelSpec& model, int particles, int substeps);

  void advance_all(Ensemble& ensemble, double kappa, NoiseSource* noise);
  void advance_batch(Ensemble& ensemble, double kappa, std::span<const int> batch,
                     NoiseSource* noise);
  void advance_groups(Ensemble& ensemble, double kappa,
                      std::span<const std::span<const int>> groups, NoiseSource* noise);

 private:
  const ModelSpec* model_;
  int substeps_;
  std::vector<double> forces_;
  std::vector<double> noise_block_;
  std::vector<double> grad_;
  std::vector<int> all_indices_;
  ForceScratch scratch_;
};

// One interval of the full dynamics: all particles advance under the full
// pairwise force.
Ensemble step_ips(const ModelSpec& model, const Ensemble& ensemble,
                  const StepConfig& config, NoiseSource* noise);

// One interval of the with-replacement scheme: batch members advance under
// the batch force, everyone else keeps its position bit-for-bit and consumes
// no noise.
Ensemble step_rbmr(const ModelSpec& model, const Ensemble& ensemble,
                   const StepConfig& config, std::span<const int> batch,
                   NoiseSource* noise);

// One interval of the without-replacement scheme: every particle advances
// under its own batch's force over the same physical interval.
Ensemble step_rbm1(const ModelSpec& model, const Ensemble& ensemble,
                   const StepConfig& config,
                   const std::vector<std::vector<int>>& partition,
                   NoiseSource* noise);

struct TrajectoryOptions {
  // Times at which to record snapshots, on the scheme's own clock (pseudo
  // time for the with-replacement scheme); each must be a grid multiple of
  // kappa within the run.
  std::vector<double> record_times;
  // Test seam: forced batch sequence for the with-replacement scheme.
  const BatchSchedule* forced_batches = nullptr;
  // Test seam: forced partitions, one list of batches per interval.
  const std::vector<std::vector<std::vector<int>>>* forced_partitions = nullptr;
};

// Runs a full trajectory. Total intervals are horizon/kappa for the full and
// without-replacement schemes and (N/p) * horizon/kappa for the
// with-replacement scheme. Deterministic given streams: same inputs give
// bit-identical snapshots.
std::vector<Ensemble> run_trajectory(const ModelSpec& model, const Ensemble& initial,
                                     const StepConfig& config, int batch_size,
                                     StreamRng* batch_rng, NoiseSource* noise,
                                     const TrajectoryOptions& options);

// Nearest grid index of `time` on a grid of spacing `kappa`; throws if the
// time is off-grid beyond a 1e-9 relative tolerance.
long grid_index(double time, double kappa);

// Scheme-aware interval count for one run.
long interval_count(const StepConfig& config, int particles, int batch_size);

}  // namespace rbm

#endif  // RBM_DYNAMICS_HPP
