#include "rbm/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <stdexcept>

namespace rbm {

long ClockState::selections_through(int particle, long interval) const {
  const auto& taus = stopping_times[static_cast<std::size_t>(particle)];
  const auto it = std::upper_bound(taus.begin(), taus.end(), interval);
  return static_cast<long>(it - taus.begin());
}

long ClockState::gap(int particle, long n) const {
  const auto& taus = stopping_times[static_cast<std::size_t>(particle)];
  if (n < 0 || n >= static_cast<long>(taus.size())) {
    throw std::invalid_argument("ClockState::gap: selection index out of range");
  }
  if (n == 0) return taus[0] + 1;
  return taus[static_cast<std::size_t>(n)] - taus[static_cast<std::size_t>(n - 1)];
}

ClockState build_clock(const BatchSchedule& schedule) {
  if (schedule.intervals() == 0 && schedule.flat.empty() && schedule.particles == 0) {
    throw std::invalid_argument("build_clock: empty schedule");
  }
  ClockState clock;
  clock.particles = schedule.particles;
  clock.stopping_times.assign(static_cast<std::size_t>(schedule.particles), {});
  const long intervals = schedule.intervals();
  for (long k = 0; k < intervals; ++k) {
    for (int i : schedule.batch(k)) {
      clock.stopping_times[static_cast<std::size_t>(i)].push_back(k);
    }
  }
  return clock;
}

IncrementStore::IncrementStore(std::uint64_t noise_key, int particles, int dimension,
                               int substeps, std::vector<int> relabel)
    : key_(noise_key), dimension_(dimension), substeps_(substeps),
      block_(substeps * dimension),
      data_(static_cast<std::size_t>(particles)),
      generated_(static_cast<std::size_t>(particles), 0),
      relabel_(std::move(relabel)) {
  if (!relabel_.empty() && relabel_.size() != static_cast<std::size_t>(particles)) {
    throw std::invalid_argument("IncrementStore: relabel size mismatch");
  }
}

std::span<const double> IncrementStore::block(int particle, long n) {
  auto& blocks = data_[static_cast<std::size_t>(particle)];
  long& done = generated_[static_cast<std::size_t>(particle)];
  if (n >= done) {
    blocks.resize(static_cast<std::size_t>(n + 1) * block_);
    const std::uint64_t label = static_cast<std::uint64_t>(
        relabel_.empty() ? particle : relabel_[static_cast<std::size_t>(particle)]);
    for (long m = done; m <= n; ++m) {
      StreamRng rng(derive_key(key_, {label, static_cast<std::uint64_t>(m)}));
      rng.fill_gaussian({blocks.data() + static_cast<std::size_t>(m) * block_,
                         static_cast<std::size_t>(block_)});
    }
    done = n + 1;
  }
  return {blocks.data() + static_cast<std::size_t>(n) * block_,
          static_cast<std::size_t>(block_)};
}

long IncrementStore::blocks_generated() const {
  long total = 0;
  for (long g : generated_) total += g;
  return total;
}

namespace {

// Serves the full system's draws for one physical interval: every particle
// reads block (particle, interval_index).
class FullSystemNoise final : public NoiseSource {
 public:
  FullSystemNoise(IncrementStore* store, long interval) : store_(store), interval_(interval) {}
  void set_interval(long interval) { interval_ = interval; }
  void interval_draws(int particle, std::span<double> out) override {
    const auto src = store_->block(particle, interval_);
    std::copy(src.begin(), src.end(), out.begin());
  }

 private:
  IncrementStore* store_;
  long interval_;
};

// Serves the with-replacement scheme's draws: particle i reads the block of
// its current selection count, maintained by the runner from the schedule.
class SelectionNoise final : public NoiseSource {
 public:
  SelectionNoise(IncrementStore* store, const std::vector<long>& counts)
      : store_(store), counts_(&counts) {}
  void interval_draws(int particle, std::span<double> out) override {
    const auto src = store_->block(particle, (*counts_)[static_cast<std::size_t>(particle)]);
    std::copy(src.begin(), src.end(), out.begin());
  }

 private:
  IncrementStore* store_;
  const std::vector<long>* counts_;
};

void validate_coupled_inputs(const ModelSpec& model, const Ensemble& initial,
                             const CoupledParams& params) {
  model.validate();
  if (!model.contraction_declared) {
    throw std::invalid_argument(
        "run_coupled: model does not satisfy the declared contraction condition");
  }
  if (initial.particles < 2) throw std::invalid_argument("run_coupled: need >= 2 particles");
  if (initial.dimension != model.dimension) {
    throw std::invalid_argument("run_coupled: ensemble/model dimension mismatch");
  }
  if (!initial.all_finite()) throw BlowUpError(initial.replica_id, initial.time);
  if (params.batch_size < 2 || params.batch_size > initial.particles) {
    throw std::invalid_argument("run_coupled: batch_size must be in [2, N]");
  }
  if (initial.particles % params.batch_size != 0) {
    throw std::invalid_argument("run_coupled: batch_size must divide particle count");
  }
  if (params.substeps < 1) throw std::invalid_argument("run_coupled: substeps must be >= 1");
  for (double t : params.eval_times) {
    if (t > params.horizon * (1.0 + 1e-9)) {
      throw std::invalid_argument("run_coupled: eval time beyond horizon");
    }
    grid_index(t, params.kappa);  // throws when off-grid
  }
}

}  // namespace

CoupledRun run_coupled_with(const ModelSpec& model, const Ensemble& initial,
                            const CoupledParams& params, BatchSchedule schedule,
                            std::shared_ptr<IncrementStore> store) {
  validate_coupled_inputs(model, initial, params);
  const int n_particles = initial.particles;
  const int ratio = n_particles / params.batch_size;
  const long physical_intervals = grid_index(params.horizon, params.kappa);
  const long pseudo_intervals = static_cast<long>(ratio) * physical_intervals;
  if (schedule.intervals() != pseudo_intervals) {
    throw std::invalid_argument("run_coupled: schedule length != (N/p) T/kappa");
  }
  if (model.sigma > 0.0 && store == nullptr) {
    throw std::invalid_argument("run_coupled: increment store required when sigma > 0");
  }

  CoupledRun run;
  run.model = model;
  run.params = params;
  run.time_ratio = ratio;
  run.initial = initial;
  run.initial.time = 0.0;
  run.schedule = std::move(schedule);
  run.clock = build_clock(run.schedule);
  run.noise = std::move(store);
  run.final_counts.assign(static_cast<std::size_t>(n_particles), 0);

  // Evaluation grid: physical interval indices and their pseudo images. The
  // pseudo-time scaling happens here and only here.
  std::set<long> eval_physical;
  for (double t : params.eval_times) eval_physical.insert(grid_index(t, params.kappa));
  std::set<long> eval_pseudo;
  for (long n : eval_physical) eval_pseudo.insert(static_cast<long>(ratio) * n);

  // --- with-replacement side ---
  Ensemble rbmr_state = run.initial;
  IntervalStepper stepper(run.model, n_particles, params.substeps);
  std::vector<long> counts(static_cast<std::size_t>(n_particles), 0);
  SelectionNoise rbmr_noise(run.noise.get(), counts);
  auto rbmr_record = [&](long k) {
    if (params.keep_full_states || eval_pseudo.count(k) != 0 || k == 0) {
      Ensemble snap = rbmr_state;
      snap.time = static_cast<double>(k) * params.kappa;
      run.rbmr_at.emplace(k, std::move(snap));
    }
  };
  rbmr_record(0);
  for (long k = 0; k < pseudo_intervals; ++k) {
    const auto members = run.schedule.batch(k);
    stepper.advance_batch(rbmr_state, params.kappa, members,
                          run.noise ? static_cast<NoiseSource*>(&rbmr_noise) : nullptr);
    for (int i : members) ++counts[static_cast<std::size_t>(i)];
    rbmr_record(k + 1);
  }
  run.final_counts = counts;

  // --- full-system side ---
  long ips_horizon = eval_physical.empty() ? 0 : *eval_physical.rbegin();
  if (params.keep_full_states) {
    long max_count = 0;
    for (long c : counts) max_count = std::max(max_count, c);
    ips_horizon = std::max(ips_horizon, max_count);
  }
  Ensemble ips_state = run.initial;
  FullSystemNoise ips_noise(run.noise.get(), 0);
  auto ips_record = [&](long n) {
    if (params.keep_full_states || eval_physical.count(n) != 0 || n == 0) {
      Ensemble snap = ips_state;
      snap.time = static_cast<double>(n) * params.kappa;
      run.ips_at.emplace(n, std::move(snap));
    }
  };
  ips_record(0);
  for (long n = 0; n < ips_horizon; ++n) {
    ips_noise.set_interval(n);
    stepper.advance_all(ips_state, params.kappa,
                        run.noise ? static_cast<NoiseSource*>(&ips_noise) : nullptr);
    ips_record(n + 1);
  }
  return run;
}

CoupledRun run_coupled(const ModelSpec& model, const Ensemble& initial,
                       const CoupledParams& params, std::uint64_t batch_key,
                       std::uint64_t noise_key) {
  validate_coupled_inputs(model, initial, params);
  const int ratio = initial.particles / params.batch_size;
  const long pseudo_intervals = static_cast<long>(ratio) * grid_index(params.horizon, params.kappa);
  StreamRng batch_rng(batch_key);
  BatchSchedule schedule =
      sample_schedule(initial.particles, params.batch_size, pseudo_intervals, batch_rng);
  std::shared_ptr<IncrementStore> store;
  if (model.sigma > 0.0) {
    store = std::make_shared<IncrementStore>(noise_key, initial.particles, model.dimension,
                                             params.substeps);
  }
  return run_coupled_with(model, initial, params, std::move(schedule), std::move(store));
}

StrongErrorSample strong_error(const CoupledRun& run, std::span<const double> eval_times) {
  StrongErrorSample sample;
  sample.replica_id = run.initial.replica_id;
  const int n_particles = run.initial.particles;
  const int d = run.initial.dimension;
  for (double t : eval_times) {
    if (t > run.params.horizon * (1.0 + 1e-9)) {
      throw std::logic_error(
          "strong_error: eval time exceeds the physical horizon; pseudo-time scaling "
          "is applied internally exactly once");
    }
    const long n = grid_index(t, run.params.kappa);
    const long pseudo = static_cast<long>(run.time_ratio) * n;
    const auto ips_it = run.ips_at.find(n);
    const auto rbmr_it = run.rbmr_at.find(pseudo);
    if (ips_it == run.ips_at.end() || rbmr_it == run.rbmr_at.end()) {
      throw std::invalid_argument("strong_error: time " + std::to_string(t) +
                                  " was not recorded by the coupled run");
    }
    std::vector<double> per_particle(static_cast<std::size_t>(n_particles), 0.0);
    for (int i = 0; i < n_particles; ++i) {
      const auto a = rbmr_it->second.position(i);
      const auto b = ips_it->second.position(i);
      double acc = 0.0;
      for (int c = 0; c < d; ++c) {
        const double diff = a[c] - b[c];
        acc += diff * diff;
      }
      per_particle[static_cast<std::size_t>(i)] = acc;
    }
    sample.times.push_back(t);
    sample.squared_deviation.push_back(std::move(per_particle));
  }
  return sample;
}

namespace {

bool positions_equal(const Ensemble& a, const Ensemble& b) {
  if (a.positions.size() != b.positions.size()) return false;
  return std::memcmp(a.positions.data(), b.positions.data(),
                     a.positions.size() * sizeof(double)) == 0;
}

}  // namespace

bool time_change_check(const CoupledRun& run, int particle, long n) {
  if (!run.params.keep_full_states) {
    throw std::logic_error("time_change_check: run must be built with keep_full_states");
  }
  const long total = run.clock.total_selections(particle);
  if (n < 0 || n >= total) {
    throw std::invalid_argument("time_change_check: selection index out of clock range");
  }

  // Replay the time-changed view induced by `particle`: the whole N-body
  // system advances one full-force interval whenever the particle is
  // selected, consuming the increments of the matching physical interval.
  Ensemble state = run.initial;
  IntervalStepper stepper(run.model, run.initial.particles, run.params.substeps);
  FullSystemNoise noise(run.noise.get(), 0);
  long advances = 0;
  const long stop_interval = run.clock.stopping_times[static_cast<std::size_t>(particle)]
                                                     [static_cast<std::size_t>(n)];
  for (long k = 0; k < stop_interval; ++k) {
    const auto members = run.schedule.batch(k);
    if (std::find(members.begin(), members.end(), particle) == members.end()) continue;
    noise.set_interval(advances);
    stepper.advance_all(state, run.params.kappa,
                        run.noise ? static_cast<NoiseSource*>(&noise) : nullptr);
    ++advances;
  }
  if (advances != n) throw std::logic_error("time_change_check: clock inconsistency");
  const auto it = run.ips_at.find(n);
  if (it == run.ips_at.end()) {
    throw std::logic_error("time_change_check: full-system state missing at interval " +
                           std::to_string(n));
  }
  return positions_equal(state, it->second);
}

bool time_change_check_all(const CoupledRun& run) {
  if (!run.params.keep_full_states) {
    throw std::logic_error("time_change_check_all: run must be built with keep_full_states");
  }
  const int n_particles = run.initial.particles;
  IntervalStepper stepper(run.model, n_particles, run.params.substeps);
  FullSystemNoise noise(run.noise.get(), 0);
  for (int i = 0; i < n_particles; ++i) {
    Ensemble state = run.initial;
    long advances = 0;
    const long total = run.clock.total_selections(i);
    if (total == 0) continue;
    // Check at each selection: state at pseudo-time tau_n * kappa must equal
    // the full system after n intervals.
    for (long k = 0; advances < total && k < run.schedule.intervals(); ++k) {
      const auto members = run.schedule.batch(k);
      if (std::find(members.begin(), members.end(), i) == members.end()) continue;
      const auto it = run.ips_at.find(advances);
      if (it == run.ips_at.end() || !positions_equal(state, it->second)) return false;
      noise.set_interval(advances);
      stepper.advance_all(state, run.params.kappa,
                          run.noise ? static_cast<NoiseSource*>(&noise) : nullptr);
      ++advances;
    }
  }
  return true;
}

std::vector<double> batch_fluctuation(const ModelSpec& model, const Ensemble& ensemble,
                                      std::span<const int> batch, int i) {
  std::vector<double> fluctuation = batch_force(model, ensemble, batch, i);
  const std::vector<double> full = pairwise_force(model, ensemble, i);
  for (std::size_t c = 0; c < fluctuation.size(); ++c) fluctuation[c] -= full[c];
  return fluctuation;
}

}  // namespace rbm
