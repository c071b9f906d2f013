#include "rbm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rbm {

Scheme scheme_from_name(const std::string& name) {
  if (name == "ips") return Scheme::kIps;
  if (name == "rbm1") return Scheme::kRbm1;
  if (name == "rbmr") return Scheme::kRbmr;
  throw std::invalid_argument("unknown scheme: " + name);
}

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::kIps: return "ips";
    case Scheme::kRbm1: return "rbm1";
    case Scheme::kRbmr: return "rbmr";
  }
  throw std::logic_error("scheme_name: bad enum");
}

void StepConfig::validate() const {
  if (!(kappa > 0.0)) throw std::invalid_argument("StepConfig.kappa must be > 0");
  if (substeps < 1) throw std::invalid_argument("StepConfig.substeps must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("StepConfig.horizon must be > 0");
}

long grid_index(double time, double kappa) {
  const double ratio = time / kappa;
  const long index = std::lround(ratio);
  if (std::abs(ratio - static_cast<double>(index)) > 1e-9 * std::max(1.0, std::abs(ratio))) {
    throw std::invalid_argument("time " + std::to_string(time) +
                                " is not a grid multiple of kappa " + std::to_string(kappa));
  }
  if (index < 0) throw std::invalid_argument("grid_index: negative time");
  return index;
}

long interval_count(const StepConfig& config, int particles, int batch_size) {
  const long base = grid_index(config.horizon, config.kappa);
  if (config.scheme != Scheme::kRbmr) return base;
  if (batch_size < 2 || particles % batch_size != 0) {
    throw std::invalid_argument("interval_count: batch_size must divide particle count");
  }
  return base * (particles / batch_size);
}

namespace {

// Group force without membership validation; callers guarantee i is a group
// member and |group| >= 2.
void group_force_unchecked(const ModelSpec& model, const Ensemble& ensemble,
                           std::span<const int> group, int i, std::span<double> out,
                           ForceScratch& scratch) {
  const int d = ensemble.dimension;
  std::span<double> diff = scratch.diff;
  std::span<double> k = scratch.kernel_value;
  const auto xi = ensemble.position(i);
  for (int c = 0; c < d; ++c) out[c] = 0.0;
  for (int j : group) {
    if (j == i) continue;
    const auto xj = ensemble.position(j);
    for (int c = 0; c < d; ++c) diff[c] = xj[c] - xi[c];
    model.kernel(diff, k);
    for (int c = 0; c < d; ++c) out[c] += k[c];
  }
  const double scale = 1.0 / static_cast<double>(group.size() - 1);
  for (int c = 0; c < d; ++c) out[c] *= scale;
}

void check_partition(const std::vector<std::vector<int>>& partition, int particles) {
  std::vector<char> seen(static_cast<std::size_t>(particles), 0);
  int covered = 0;
  for (const auto& batch : partition) {
    for (int i : batch) {
      if (i < 0 || i >= particles || seen[static_cast<std::size_t>(i)]) {
        throw std::invalid_argument("step_rbm1: batches do not form a partition");
      }
      seen[static_cast<std::size_t>(i)] = 1;
      ++covered;
    }
  }
  if (covered != particles) {
    throw std::invalid_argument("step_rbm1: partition does not cover all particles");
  }
}

}  // namespace

void batch_force(const ModelSpec& model, const Ensemble& ensemble,
                 std::span<const int> batch, int i, std::span<double> out,
                 ForceScratch& scratch) {
  if (batch.size() < 2) throw std::invalid_argument("batch_force: batch must have >= 2 members");
  if (std::find(batch.begin(), batch.end(), i) == batch.end()) {
    throw std::invalid_argument("batch_force: particle " + std::to_string(i) +
                                " is not a member of the batch");
  }
  scratch.resize(ensemble.dimension);
  group_force_unchecked(model, ensemble, batch, i, out, scratch);
}

std::vector<double> batch_force(const ModelSpec& model, const Ensemble& ensemble,
                                std::span<const int> batch, int i) {
  std::vector<double> out(ensemble.dimension, 0.0);
  ForceScratch scratch;
  batch_force(model, ensemble, batch, i, out, scratch);
  return out;
}

IntervalStepper::IntervalStepper(const ModelSpec& model, int particles, int substeps)
    : model_(&model), substeps_(substeps) {
  if (substeps < 1) throw std::invalid_argument("IntervalStepper: substeps must be >= 1");
  const int d = model.dimension;
  forces_.resize(static_cast<std::size_t>(particles) * d);
  noise_block_.resize(static_cast<std::size_t>(particles) * substeps * d);
  grad_.resize(static_cast<std::size_t>(d));
  all_indices_.resize(static_cast<std::size_t>(particles));
  std::iota(all_indices_.begin(), all_indices_.end(), 0);
  scratch_.resize(d);
}

void IntervalStepper::advance_groups(Ensemble& ensemble, double kappa,
                                     std::span<const std::span<const int>> groups,
                                     NoiseSource* noise) {
  const int d = ensemble.dimension;
  const double h = kappa / static_cast<double>(substeps_);
  const double sigma_step = model_->sigma * std::sqrt(h);
  const int block = substeps_ * d;

  if (model_->sigma > 0.0) {
    if (noise == nullptr) {
      throw std::invalid_argument("IntervalStepper: noise source required when sigma > 0");
    }
    for (const auto& group : groups) {
      for (int i : group) {
        noise->interval_draws(i, {noise_block_.data() + static_cast<std::size_t>(i) * block,
                                  static_cast<std::size_t>(block)});
      }
    }
  }

  for (int s = 0; s < substeps_; ++s) {
    // Synchronous substep: forces from the pre-substep state, then updates.
    for (const auto& group : groups) {
      for (int i : group) {
        group_force_unchecked(*model_, ensemble, group, i,
                              {forces_.data() + static_cast<std::size_t>(i) * d,
                               static_cast<std::size_t>(d)},
                              scratch_);
      }
    }
    for (const auto& group : groups) {
      for (int i : group) {
        auto x = ensemble.position(i);
        model_->grad_potential(x, grad_);
        const double* f = forces_.data() + static_cast<std::size_t>(i) * d;
        const double* z = noise_block_.data() + static_cast<std::size_t>(i) * block +
                          static_cast<std::size_t>(s) * d;
        for (int c = 0; c < d; ++c) {
          x[c] += h * (f[c] - grad_[c]);
          if (sigma_step > 0.0) x[c] += sigma_step * z[c];
        }
      }
    }
  }
  ensemble.time += kappa;
  if (!ensemble.all_finite()) throw BlowUpError(ensemble.replica_id, ensemble.time);
}

void IntervalStepper::advance_all(Ensemble& ensemble, double kappa, NoiseSource* noise) {
  const std::span<const int> all{all_indices_};
  advance_groups(ensemble, kappa, {&all, 1}, noise);
}

void IntervalStepper::advance_batch(Ensemble& ensemble, double kappa,
                                    std::span<const int> batch, NoiseSource* noise) {
  if (batch.size() < 2) throw std::invalid_argument("advance_batch: batch must have >= 2 members");
  advance_groups(ensemble, kappa, {&batch, 1}, noise);
}

Ensemble step_ips(const ModelSpec& model, const Ensemble& ensemble,
                  const StepConfig& config, NoiseSource* noise) {
  config.validate();
  Ensemble next = ensemble;
  IntervalStepper stepper(model, ensemble.particles, config.substeps);
  stepper.advance_all(next, config.kappa, noise);
  return next;
}

Ensemble step_rbmr(const ModelSpec& model, const Ensemble& ensemble,
                   const StepConfig& config, std::span<const int> batch,
                   NoiseSource* noise) {
  config.validate();
  Ensemble next = ensemble;
  IntervalStepper stepper(model, ensemble.particles, config.substeps);
  stepper.advance_batch(next, config.kappa, batch, noise);
  return next;
}

Ensemble step_rbm1(const ModelSpec& model, const Ensemble& ensemble,
                   const StepConfig& config,
                   const std::vector<std::vector<int>>& partition,
                   NoiseSource* noise) {
  config.validate();
  check_partition(partition, ensemble.particles);
  Ensemble next = ensemble;
  IntervalStepper stepper(model, ensemble.particles, config.substeps);
  std::vector<std::span<const int>> groups;
  groups.reserve(partition.size());
  for (const auto& batch : partition) groups.emplace_back(batch);
  stepper.advance_groups(next, config.kappa, groups, noise);
  return next;
}

std::vector<Ensemble> run_trajectory(const ModelSpec& model, const Ensemble& initial,
                                     const StepConfig& config, int batch_size,
                                     StreamRng* batch_rng, NoiseSource* noise,
                                     const TrajectoryOptions& options) {
  config.validate();
  if (!initial.all_finite()) throw BlowUpError(initial.replica_id, initial.time);
  if (initial.particles < 2) throw std::invalid_argument("run_trajectory: need >= 2 particles");

  const long total = interval_count(config, initial.particles, batch_size);
  std::vector<long> record_at;
  record_at.reserve(options.record_times.size());
  for (double t : options.record_times) {
    const long idx = grid_index(t, config.kappa);
    if (idx > total) {
      throw std::invalid_argument("record time " + std::to_string(t) + " beyond horizon");
    }
    record_at.push_back(idx);
  }

  std::vector<Ensemble> snapshots;
  snapshots.reserve(record_at.size());
  Ensemble state = initial;
  IntervalStepper stepper(model, state.particles, config.substeps);

  auto record_if_requested = [&](long k) {
    for (long at : record_at) {
      if (at == k) {
        Ensemble snap = state;
        snap.time = static_cast<double>(k) * config.kappa;
        snapshots.push_back(std::move(snap));
      }
    }
  };

  record_if_requested(0);

  std::vector<int> batch(static_cast<std::size_t>(batch_size));
  for (long k = 0; k < total; ++k) {
    switch (config.scheme) {
      case Scheme::kIps:
        stepper.advance_all(state, config.kappa, noise);
        break;
      case Scheme::kRbmr: {
        std::span<const int> members;
        if (options.forced_batches != nullptr) {
          members = options.forced_batches->batch(k);
        } else {
          if (batch_rng == nullptr) throw std::invalid_argument("run_trajectory: batch stream required");
          sample_batch(state.particles, batch_size, *batch_rng, batch);
          members = batch;
        }
        stepper.advance_batch(state, config.kappa, members, noise);
        break;
      }
      case Scheme::kRbm1: {
        std::vector<std::vector<int>> sampled;
        const std::vector<std::vector<int>>* part = nullptr;
        if (options.forced_partitions != nullptr) {
          part = &(*options.forced_partitions)[static_cast<std::size_t>(k)];
        } else {
          if (batch_rng == nullptr) throw std::invalid_argument("run_trajectory: batch stream required");
          sampled = sample_partition(state.particles, batch_size, *batch_rng);
          part = &sampled;
        }
        check_partition(*part, state.particles);
        std::vector<std::span<const int>> groups;
        groups.reserve(part->size());
        for (const auto& b : *part) groups.emplace_back(b);
        stepper.advance_groups(state, config.kappa, groups, noise);
        break;
      }
    }
    record_if_requested(k + 1);
  }
  return snapshots;
}

}  // namespace rbm
