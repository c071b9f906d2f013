// Coupled construction of the with-replacement scheme and the full system
// driven by shared Gaussian increments through per-particle selection clocks.
//
// The increments are keyed by (particle, selection index, substep): the full
// system consumes block (i, n) during its n-th physical interval, while the
// with-replacement scheme consumes the same block when particle i enters a
// batch for the (n+1)-th time. The intermediate time-changed copies of the
// full system are never materialized; they are recoverable views, which
// time_change_check replays and verifies bit-for-bit.

#ifndef RBM_COUPLING_HPP
#define RBM_COUPLING_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "rbm/dynamics.hpp"
#include "rbm/ensemble.hpp"
#include "rbm/model.hpp"
#include "rbm/schedule.hpp"

namespace rbm {

// Selection clocks derived from a batch schedule: for each particle, the
// interval indices of its successive selections.
struct ClockState {
  int particles = 0;
  // stopping_times[i][n] = interval index of particle i's (n+1)-th selection;
  // strictly increasing in n.
  std::vector<std::vector<long>> stopping_times;

  long total_selections(int particle) const {
    return static_cast<long>(stopping_times[static_cast<std::size_t>(particle)].size());
  }
  // Number of selections of `particle` among intervals 0..interval inclusive.
  long selections_through(int particle, long interval) const;
  // Gap between consecutive selections in intervals, counting the selection
  // interval itself (so the first gap is stopping_times[i][0] + 1); always >= 1.
  long gap(int particle, long n) const;
};

ClockState build_clock(const BatchSchedule& schedule);

// Lazily generated store of standard-normal increment blocks, keyed by
// (particle, selection index). Generation order does not matter: each block
// comes from its own counter-derived stream.
class IncrementStore {
 public:
  IncrementStore(std::uint64_t noise_key, int particles, int dimension, int substeps,
                 std::vector<int> relabel = {});

  // Block of substeps * dimension draws for particle i's n-th advancing
  // interval.
  std::span<const double> block(int particle, long n);

  int block_length() const { return block_; }
  long generated_for(int particle) const {
    return generated_[static_cast<std::size_t>(particle)];
  }
  long blocks_generated() const;

 private:
  std::uint64_t key_;
  int dimension_;
  int substeps_;
  int block_;
  std::vector<std::vector<double>> data_;
  std::vector<long> generated_;
  std::vector<int> relabel_;  // particle label used in key derivation
};

struct CoupledParams {
  double kappa = 0.1;
  double horizon = 1.0;  // physical horizon T
  int substeps = 1;
  int batch_size = 2;
  std::vector<double> eval_times;  // physical times, grid multiples of kappa
  // Store every grid state of the full system (needed by time_change_check)
  // instead of only the evaluation times.
  bool keep_full_states = false;
};

struct CoupledRun {
  ModelSpec model;
  CoupledParams params;
  int time_ratio = 1;  // N / p: pseudo-time intervals per physical interval
  Ensemble initial;
  BatchSchedule schedule;
  ClockState clock;
  std::shared_ptr<IncrementStore> noise;   // null when sigma == 0
  std::vector<long> final_counts;          // selections per particle over the run
  std::map<long, Ensemble> ips_at;         // keyed by physical interval index
  std::map<long, Ensemble> rbmr_at;        // keyed by pseudo interval index
};

// Simulates the coupled pair from a shared initial state. The
// with-replacement scheme runs (N/p) * (T/kappa) intervals; the full system
// runs as far as the evaluation times (and, with keep_full_states, as far as
// the realized selection clocks) require. Deterministic given the two keys.
CoupledRun run_coupled(const ModelSpec& model, const Ensemble& initial,
                       const CoupledParams& params, std::uint64_t batch_key,
                       std::uint64_t noise_key);

// Same, with an injected schedule and increment store (test seam).
CoupledRun run_coupled_with(const ModelSpec& model, const Ensemble& initial,
                            const CoupledParams& params, BatchSchedule schedule,
                            std::shared_ptr<IncrementStore> store);

// Per-particle squared deviations |X_rbmr((N/p) t) - X_full(t)|^2 at the
// requested physical times.
struct StrongErrorSample {
  std::int64_t replica_id = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> squared_deviation;  // [time][particle]
};

StrongErrorSample strong_error(const CoupledRun& run, std::span<const double> eval_times);

// Replays the time-changed view induced by particle i through the schedule
// and verifies, bit for bit, that its state at the pseudo-time of i's
// (n+1)-th selection equals the full system after n intervals. Requires a run
// with keep_full_states.
bool time_change_check(const CoupledRun& run, int particle, long n);

// Checks every (particle, selection index) pair of the run.
bool time_change_check_all(const CoupledRun& run);

// Batch force minus full force at the given ensemble; the conditionally
// mean-zero fluctuation that drives the method's error.
std::vector<double> batch_fluctuation(const ModelSpec& model, const Ensemble& ensemble,
                                      std::span<const int> batch, int i);

}  // namespace rbm

#endif  // RBM_COUPLING_HPP
