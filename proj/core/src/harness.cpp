#include "rbm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rbm/csv.hpp"
#include "rbm/stats.hpp"

namespace rbm {

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void require_conforming(const ModelSpec& model) {
  model.validate();
  if (!model.contraction_declared) {
    throw std::invalid_argument("model '" + model.name +
                                "' violates the contraction condition; simulation refused");
  }
}

std::uint64_t kappa_stratum(const ExperimentConfig& config, std::size_t kappa_index) {
  return config.common_random_numbers ? 0 : kappa_index + 1;
}

std::filesystem::path output_file(const ExperimentConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.output_dir);
  return std::filesystem::path(config.output_dir) / name;
}

}  // namespace

ModelSpec model_from_config(const ExperimentConfig& config) {
  BuiltinModel builtin;
  builtin.name = config.model;
  builtin.lambda = config.lambda;
  builtin.amplitude = config.kernel_amplitude;
  builtin.dimension = config.dimension;
  builtin.sigma = config.sigma;
  return builtin.to_spec();
}

Ensemble initial_ensemble(const ExperimentConfig& config, long replica,
                          std::uint64_t stratum) {
  Ensemble ensemble(config.particles, config.dimension, 0.0, replica);
  StreamRng rng(replica_key(config.seed, StreamPurpose::kInitial,
                            static_cast<std::uint64_t>(replica), stratum));
  for (double& v : ensemble.positions) {
    v = config.initial.mean + config.initial.stddev * rng.next_gaussian();
  }
  return ensemble;
}

int resolve_threads(const ExperimentConfig& config) {
  if (config.threads > 0) return config.threads;
  if (const char* env = std::getenv("RBM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_replicas(long replicas, int threads, const std::function<void(long)>& body) {
  threads = static_cast<int>(std::min<long>(std::max(threads, 1), replicas));
  if (threads <= 1) {
    for (long r = 0; r < replicas; ++r) body(r);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      const long r = next.fetch_add(1);
      if (r >= replicas) return;
      try {
        body(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ConvergeOutcome run_converge_experiment(const ExperimentConfig& config,
                                        bool collect_marginals) {
  config.validate();
  const ModelSpec model = model_from_config(config);
  require_conforming(model);
  if (config.particles % config.batch_size != 0) {
    throw std::invalid_argument("config.batch_size: must divide particles for coupled runs");
  }
  const int threads = resolve_threads(config);
  const long replicas = config.replicas;
  const std::size_t n_times = config.eval_times.size();
  if (n_times == 0) throw std::invalid_argument("config.eval_times: must be nonempty");
  const int d = config.dimension;

  ConvergeOutcome outcome;
  outcome.rows.reserve(config.kappas.size());

  for (std::size_t ki = 0; ki < config.kappas.size(); ++ki) {
    const double kappa = config.kappas[ki];
    CoupledParams params;
    params.kappa = kappa;
    params.horizon = config.horizon;
    params.substeps = config.substeps;
    params.batch_size = config.batch_size;
    params.eval_times = config.eval_times;

    // Per-replica pooled squared deviation, one column per eval time.
    std::vector<std::vector<double>> replica_means(
        n_times, std::vector<double>(static_cast<std::size_t>(replicas), 0.0));
    std::vector<std::vector<double>> rbmr_first, ips_first;
    if (collect_marginals) {
      rbmr_first.assign(n_times,
                        std::vector<double>(static_cast<std::size_t>(replicas) * d, 0.0));
      ips_first.assign(n_times,
                       std::vector<double>(static_cast<std::size_t>(replicas) * d, 0.0));
    }

    const std::uint64_t stratum = kappa_stratum(config, ki);
    const auto started = std::chrono::steady_clock::now();
    parallel_replicas(replicas, threads, [&](long r) {
      const Ensemble init = initial_ensemble(config, r, stratum);
      const std::uint64_t batch_key = replica_key(config.seed, StreamPurpose::kBatch,
                                                  static_cast<std::uint64_t>(r), stratum);
      const std::uint64_t noise_key = replica_key(config.seed, StreamPurpose::kNoise,
                                                  static_cast<std::uint64_t>(r), stratum);
      const CoupledRun run = run_coupled(model, init, params, batch_key, noise_key);
      const StrongErrorSample sample = strong_error(run, config.eval_times);
      for (std::size_t t = 0; t < n_times; ++t) {
        CompensatedSum acc;
        for (double sq : sample.squared_deviation[t]) acc.add(sq);
        replica_means[t][static_cast<std::size_t>(r)] =
            acc.value() / static_cast<double>(config.particles);
      }
      if (collect_marginals) {
        for (std::size_t t = 0; t < n_times; ++t) {
          const long n = grid_index(config.eval_times[t], kappa);
          const long pseudo = static_cast<long>(run.time_ratio) * n;
          const auto rbmr = run.rbmr_at.at(pseudo).position(0);
          const auto ips = run.ips_at.at(n).position(0);
          for (int c = 0; c < d; ++c) {
            rbmr_first[t][static_cast<std::size_t>(r) * d + c] = rbmr[c];
            ips_first[t][static_cast<std::size_t>(r) * d + c] = ips[c];
          }
        }
      }
    });

    KappaErrorRow row;
    row.kappa = kappa;
    row.wall_seconds = elapsed_seconds(started);
    for (std::size_t t = 0; t < n_times; ++t) {
      const MomentSummary sum = summarize(replica_means[t]);
      const double error = sum.mean > 0.0 ? std::sqrt(sum.mean) : 0.0;
      const double se = error > 0.0 ? sum.se_mean / (2.0 * error) : 0.0;
      row.times.push_back(config.eval_times[t]);
      row.errors.push_back(error);
      row.ses.push_back(se);
      if (error >= row.sup_error) {
        row.sup_error = error;
        row.sup_se = se;
      }
    }
    if (collect_marginals) {
      for (std::size_t t = 0; t < n_times; ++t) {
        EmpiricalMarginal rm{d, std::move(rbmr_first[t]),
                             "rbmr@" + std::to_string(config.eval_times[t])};
        EmpiricalMarginal im{d, std::move(ips_first[t]),
                             "ips@" + std::to_string(config.eval_times[t])};
        row.rbmr_marginals.push_back(std::move(rm));
        row.ips_marginals.push_back(std::move(im));
      }
    }
    outcome.rows.push_back(std::move(row));
  }

  std::vector<double> kappas(config.kappas.begin(), config.kappas.end());
  std::vector<double> errors;
  errors.reserve(outcome.rows.size());
  for (const auto& row : outcome.rows) errors.push_back(row.sup_error);
  outcome.degenerate_zero_error =
      std::any_of(errors.begin(), errors.end(), [](double e) { return !(e > 0.0); });
  if (!outcome.degenerate_zero_error) {
    outcome.fit = fit_slope(kappas, errors);
  }
  return outcome;
}

MomentExperiment run_moment_experiment(const ExperimentConfig& config, Scheme scheme,
                                       std::span<const double> record_times) {
  config.validate();
  const ModelSpec model = model_from_config(config);
  require_conforming(model);
  if (record_times.size() < 4) {
    throw std::invalid_argument("run_moment_experiment: need >= 4 record times");
  }
  const double kappa = config.kappas.front();
  const int ratio = config.particles / config.batch_size;
  const long replicas = config.replicas;

  StepConfig step;
  step.kappa = kappa;
  step.substeps = config.substeps;
  step.horizon = config.horizon;
  step.scheme = scheme;

  // The with-replacement scheme is probed at pseudo-times (N/p) t so all
  // schemes report on one physical grid.
  std::vector<double> run_times(record_times.begin(), record_times.end());
  if (scheme == Scheme::kRbmr) {
    for (double& t : run_times) t *= static_cast<double>(ratio);
  }

  std::vector<std::vector<Ensemble>> snapshots(static_cast<std::size_t>(replicas));
  parallel_replicas(replicas, resolve_threads(config), [&](long r) {
    const Ensemble init = initial_ensemble(config, r, 1);
    StreamRng batch_rng(replica_key(config.seed, StreamPurpose::kBatch,
                                    static_cast<std::uint64_t>(r), 1));
    StreamNoise noise(replica_key(config.seed, StreamPurpose::kNoise,
                                  static_cast<std::uint64_t>(r), 1));
    TrajectoryOptions options;
    options.record_times = run_times;
    snapshots[static_cast<std::size_t>(r)] =
        run_trajectory(model, init, step, config.batch_size, &batch_rng, &noise, options);
  });

  MomentExperiment experiment;
  experiment.scheme = scheme;
  experiment.series = moment_track(snapshots, 2);
  for (std::size_t t = 0; t < experiment.series.size(); ++t) {
    experiment.series[t].time = record_times[t];  // report on the physical grid
  }

  // Stationary envelope for the quadratic potential with a bounded kernel:
  // lambda m2 <= ||K||inf sqrt(m2) + sigma^2 d / 2, solved for m2, with the
  // explicit-Euler variance inflation 1/(1 - lambda h / 2).
  const double h = kappa / static_cast<double>(config.substeps);
  if (model.lambda * h >= 2.0) {
    throw std::invalid_argument("run_moment_experiment: unstable step (lambda h >= 2)");
  }
  const double sigma2_eff =
      model.sigma * model.sigma * config.dimension / (1.0 - model.lambda * h / 2.0);
  const double a = model.kernel_bound;
  const double root = (a + std::sqrt(a * a + 2.0 * model.lambda * sigma2_eff)) /
                      (2.0 * model.lambda);
  experiment.bound = root * root;

  const double half_time = record_times.back() / 2.0;
  std::vector<std::size_t> tail;
  for (std::size_t t = 0; t < record_times.size(); ++t) {
    if (record_times[t] >= half_time - 1e-12) tail.push_back(t);
  }
  experiment.bounded = true;
  for (std::size_t t : tail) {
    if (experiment.series[t].value > experiment.bound + 3.0 * experiment.series[t].se) {
      experiment.bounded = false;
    }
  }

  // Trend over the final half from replica-wise regression slopes.
  std::vector<double> xs;
  for (std::size_t t : tail) xs.push_back(record_times[t]);
  std::vector<double> slopes(static_cast<std::size_t>(replicas), 0.0);
  std::vector<double> ys(tail.size());
  for (long r = 0; r < replicas; ++r) {
    for (std::size_t j = 0; j < tail.size(); ++j) {
      const Ensemble& ens = snapshots[static_cast<std::size_t>(r)][tail[j]];
      CompensatedSum acc;
      for (int i = 0; i < ens.particles; ++i) {
        double norm2 = 0.0;
        for (double v : ens.position(i)) norm2 += v * v;
        acc.add(norm2);
      }
      ys[j] = acc.value() / static_cast<double>(ens.particles);
    }
    slopes[static_cast<std::size_t>(r)] = least_squares(xs, ys).slope;
  }
  const MomentSummary slope_sum = summarize(slopes);
  experiment.trend_slope = slope_sum.mean;
  experiment.trend_se = slope_sum.se_mean;
  experiment.trend_flat = std::abs(slope_sum.mean) <= 3.0 * slope_sum.se_mean;
  return experiment;
}

HolderExperiment run_holder_experiment(const ExperimentConfig& config, Scheme scheme,
                                       std::span<const double> anchors,
                                       std::span<const double> deltas) {
  config.validate();
  const ModelSpec model = model_from_config(config);
  require_conforming(model);
  if (anchors.empty() || deltas.size() < 2) {
    throw std::invalid_argument("run_holder_experiment: need anchors and >= 2 deltas");
  }
  const double kappa = config.kappas.front();
  const long replicas = config.replicas;

  StepConfig step;
  step.kappa = kappa;
  step.substeps = config.substeps;
  step.horizon = config.horizon;
  step.scheme = scheme;

  // Record times and pair indices on the scheme's own clock.
  std::set<long> grid_set;
  struct Pair {
    long from, to;
    double dt;
  };
  std::vector<Pair> pairs;
  for (double a : anchors) {
    const long ia = grid_index(a, kappa);
    grid_set.insert(ia);
    for (double delta : deltas) {
      const long ib = grid_index(a + delta, kappa);
      grid_set.insert(ib);
      pairs.push_back({ia, ib, static_cast<double>(ib - ia) * kappa});
    }
  }
  std::vector<long> grid(grid_set.begin(), grid_set.end());
  std::vector<double> record;
  record.reserve(grid.size());
  for (long g : grid) record.push_back(static_cast<double>(g) * kappa);
  auto grid_pos = [&](long idx) {
    return static_cast<int>(std::lower_bound(grid.begin(), grid.end(), idx) - grid.begin());
  };

  std::vector<std::vector<Ensemble>> snapshots(static_cast<std::size_t>(replicas));
  parallel_replicas(replicas, resolve_threads(config), [&](long r) {
    const Ensemble init = initial_ensemble(config, r, 2);
    StreamRng batch_rng(replica_key(config.seed, StreamPurpose::kBatch,
                                    static_cast<std::uint64_t>(r), 2));
    StreamNoise noise(replica_key(config.seed, StreamPurpose::kNoise,
                                  static_cast<std::uint64_t>(r), 2));
    TrajectoryOptions options;
    options.record_times = record;
    snapshots[static_cast<std::size_t>(r)] =
        run_trajectory(model, init, step, config.batch_size, &batch_rng, &noise, options);
  });

  std::vector<double> x1(pairs.size()), x2(pairs.size()), y(pairs.size());
  std::vector<double> c1(static_cast<std::size_t>(replicas));
  std::vector<double> c2(static_cast<std::size_t>(replicas));
  for (long r = 0; r < replicas; ++r) {
    const auto& traj = snapshots[static_cast<std::size_t>(r)];
    for (std::size_t pidx = 0; pidx < pairs.size(); ++pidx) {
      const Ensemble& from = traj[static_cast<std::size_t>(grid_pos(pairs[pidx].from))];
      const Ensemble& to = traj[static_cast<std::size_t>(grid_pos(pairs[pidx].to))];
      CompensatedSum acc;
      for (int i = 0; i < from.particles; ++i) {
        const auto xa = from.position(i);
        const auto xb = to.position(i);
        double norm2 = 0.0;
        for (int c = 0; c < from.dimension; ++c) {
          const double diff = xb[c] - xa[c];
          norm2 += diff * diff;
        }
        acc.add(norm2);
      }
      x1[pidx] = pairs[pidx].dt;
      x2[pidx] = pairs[pidx].dt * pairs[pidx].dt;
      y[pidx] = acc.value() / static_cast<double>(from.particles);
    }
    const TwoTermFit fit = least_squares_two_term(x1, x2, y);
    c1[static_cast<std::size_t>(r)] = fit.c1;
    c2[static_cast<std::size_t>(r)] = fit.c2;
  }

  HolderExperiment experiment;
  experiment.scheme = scheme;
  const MomentSummary s1 = summarize(c1);
  const MomentSummary s2 = summarize(c2);
  experiment.dt_coefficient = s1.mean;
  experiment.dt_se = s1.se_mean;
  experiment.dt2_coefficient = s2.mean;
  const double sigma2 = model.sigma * model.sigma;
  experiment.linear_bounded = s1.mean <= 3.0 * sigma2 + 3.0 * s1.se_mean;
  experiment.linear_zero = std::abs(s1.mean) <= 3.0 * s1.se_mean;
  return experiment;
}

std::vector<DominanceRow> dominance_rows(const ConvergeOutcome& outcome, int dimension,
                                         std::uint64_t seed) {
  std::vector<DominanceRow> rows;
  for (const auto& row : outcome.rows) {
    if (row.rbmr_marginals.size() != row.times.size()) {
      throw std::invalid_argument("dominance_rows: marginals were not collected");
    }
    for (std::size_t t = 0; t < row.times.size(); ++t) {
      DominanceRow out;
      out.kappa = row.kappa;
      out.time = row.times[t];
      out.w2 = dimension == 1
                   ? wasserstein2_1d(row.rbmr_marginals[t], row.ips_marginals[t])
                   : wasserstein2_sliced(row.rbmr_marginals[t], row.ips_marginals[t], 128, seed);
      out.strong_error = row.errors[t];
      out.se = row.ses[t];
      out.dominated = out.w2 <= out.strong_error + 3.0 * out.se;
      rows.push_back(out);
    }
  }
  return rows;
}

CostScalingResult measure_cost_scaling(std::span<const int> sizes, int batch_size,
                                       double kappa, double horizon, int substeps,
                                       std::uint64_t seed) {
  if (sizes.size() < 3) throw std::invalid_argument("measure_cost_scaling: need >= 3 sizes");
  CostScalingResult result;
  result.sizes.assign(sizes.begin(), sizes.end());

  auto time_run = [&](const ModelSpec& model, const Ensemble& init, Scheme scheme) {
    StepConfig step;
    step.kappa = kappa;
    step.substeps = substeps;
    step.horizon = horizon;
    step.scheme = scheme;
    TrajectoryOptions options;  // no snapshots; timing only
    double best = std::numeric_limits<double>::infinity();
    constexpr int kMinReps = 3;
    double spent = 0.0;
    for (int rep = 0; rep < kMinReps || (spent < 0.2 && rep < 200); ++rep) {
      StreamRng batch_rng(derive_key(seed, {static_cast<std::uint64_t>(init.particles),
                                            static_cast<std::uint64_t>(rep)}));
      const auto started = std::chrono::steady_clock::now();
      run_trajectory(model, init, step, batch_size, &batch_rng, nullptr, options);
      const double elapsed = elapsed_seconds(started);
      best = std::min(best, elapsed);
      spent += elapsed;
    }
    return best / horizon;  // seconds per unit physical time
  };

  for (int n : sizes) {
    const ModelSpec model = saturating_model(1.0, 0.4, 1, 0.0);
    Ensemble init(n, 1, 0.0, 0);
    StreamRng rng(derive_key(seed, {static_cast<std::uint64_t>(n), 777}));
    for (double& v : init.positions) v = rng.next_gaussian();
    result.ips_seconds.push_back(time_run(model, init, Scheme::kIps));
    result.rbmr_seconds.push_back(time_run(model, init, Scheme::kRbmr));
  }

  // Exponents from the log-log slope over descending sizes.
  std::vector<double> descending(sizes.rbegin(), sizes.rend());
  std::vector<double> ips_desc(result.ips_seconds.rbegin(), result.ips_seconds.rend());
  std::vector<double> rbmr_desc(result.rbmr_seconds.rbegin(), result.rbmr_seconds.rend());
  result.ips_exponent = fit_slope(descending, ips_desc).slope;
  result.rbmr_exponent = fit_slope(descending, rbmr_desc).slope;
  return result;
}

void cmd_simulate(const ExperimentConfig& config) {
  config.validate();
  const ModelSpec model = model_from_config(config);
  require_conforming(model);
  const double kappa = config.kappas.front();

  CsvWriter csv(output_file(config, "simulate.csv").string(),
                {"scheme", "replica", "time", "particle", "coordinate", "value"});
  for (const auto& scheme_name_str : config.schemes) {
    const Scheme scheme = scheme_from_name(scheme_name_str);
    StepConfig step;
    step.kappa = kappa;
    step.substeps = config.substeps;
    step.horizon = config.horizon;
    step.scheme = scheme;

    std::vector<std::vector<Ensemble>> snapshots(static_cast<std::size_t>(config.replicas));
    parallel_replicas(config.replicas, resolve_threads(config), [&](long r) {
      const Ensemble init = initial_ensemble(config, r, 1);
      StreamRng batch_rng(replica_key(config.seed, StreamPurpose::kBatch,
                                      static_cast<std::uint64_t>(r), 1));
      StreamNoise noise(replica_key(config.seed, StreamPurpose::kNoise,
                                    static_cast<std::uint64_t>(r), 1));
      TrajectoryOptions options;
      options.record_times = config.eval_times;  // on the scheme's own clock
      snapshots[static_cast<std::size_t>(r)] =
          run_trajectory(model, init, step, config.batch_size, &batch_rng, &noise, options);
    });
    for (long r = 0; r < config.replicas; ++r) {
      for (const Ensemble& snap : snapshots[static_cast<std::size_t>(r)]) {
        for (int i = 0; i < snap.particles; ++i) {
          const auto x = snap.position(i);
          for (int c = 0; c < snap.dimension; ++c) {
            csv.write_row({scheme_name_str, std::to_string(r), CsvWriter::num(snap.time),
                           std::to_string(i), std::to_string(c), CsvWriter::num(x[c])});
          }
        }
      }
    }
  }
}

RunRecord cmd_converge(const ExperimentConfig& config) {
  const ConvergeOutcome outcome = run_converge_experiment(config, false);

  CsvWriter csv(output_file(config, "converge.csv").string(),
                {"row", "kappa", "error", "se", "wall_seconds", "slope", "r_squared"});
  for (const auto& row : outcome.rows) {
    csv.write_row({"data", CsvWriter::num(row.kappa), CsvWriter::num(row.sup_error),
                   CsvWriter::num(row.sup_se), CsvWriter::num(row.wall_seconds), "", ""});
  }
  if (!outcome.degenerate_zero_error) {
    csv.write_row({"summary", "", "", "", "", CsvWriter::num(outcome.fit.slope),
                   CsvWriter::num(outcome.fit.r_squared)});
  }

  std::ofstream summary(output_file(config, "summary.txt"));
  if (outcome.degenerate_zero_error) {
    summary << "slope: degenerate: zero error (schemes coincide; no fit)\n";
  } else {
    summary << "slope: " << outcome.fit.slope << "\n";
    summary << "intercept: " << outcome.fit.intercept << "\n";
    summary << "r_squared: " << outcome.fit.r_squared << "\n";
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < outcome.rows.size(); ++i) {
      decreasing = decreasing && outcome.rows[i].sup_error > outcome.rows[i + 1].sup_error;
    }
    summary << "errors_strictly_decreasing: " << (decreasing ? "pass" : "fail") << "\n";
  }

  RunRecord record;
  record.config_digest = config_digest(config);
  record.converge = outcome;
  return record;
}

std::vector<ClockLawReport> cmd_lemmas(const ExperimentConfig& config) {
  config.validate();
  const ModelSpec model = model_from_config(config);
  require_conforming(model);

  std::vector<std::pair<std::string, ClockLawReport>> rows;
  const long clock_samples = 100000;
  const std::string group =
      "N=" + std::to_string(config.particles) + ",p=" + std::to_string(config.batch_size);
  for (auto& report : validate_geometric_clock(config.particles, config.batch_size,
                                               clock_samples, config.seed)) {
    rows.emplace_back(group, std::move(report));
  }
  for (auto& report : validate_lln_variance(config.particles, config.batch_size,
                                            config.kappas.front(), config.horizon,
                                            clock_samples, config.seed)) {
    rows.emplace_back(group, std::move(report));
  }
  for (auto& report : validate_binomial_counts(config.particles, config.batch_size, 19,
                                               clock_samples, config.seed)) {
    rows.emplace_back(group, std::move(report));
  }
  for (auto& report : validate_clock_gap_integral(config.particles, config.batch_size,
                                                  config.kappas.front(), config.horizon,
                                                  2000, config.seed)) {
    rows.emplace_back(group, std::move(report));
  }

  // Short dynamics runs: moment boundedness/trend and the displacement law.
  const double kappa = config.kappas.front();
  const long steps = grid_index(config.horizon, kappa);
  std::vector<double> record;
  for (int j = 0; j <= 20; ++j) {
    const long idx = std::lround(static_cast<double>(j) * static_cast<double>(steps) / 20.0);
    const double t = static_cast<double>(idx) * kappa;
    if (record.empty() || t > record.back()) record.push_back(t);
  }
  std::vector<double> anchors = {static_cast<double>(grid_index(config.horizon / 2.0, kappa)) *
                                 kappa};
  std::vector<double> deltas;
  for (double delta = kappa; anchors.front() + delta <= config.horizon * (1 + 1e-12);
       delta *= 2.0) {
    deltas.push_back(delta);
  }
  for (const auto& scheme_str : config.schemes) {
    const Scheme scheme = scheme_from_name(scheme_str);
    const MomentExperiment moment = run_moment_experiment(config, scheme, record);
    double tail_max = 0.0;
    for (const MomentPoint& point : moment.series) {
      if (point.time >= record.back() / 2.0 - 1e-12) tail_max = std::max(tail_max, point.value);
    }
    ClockLawReport bound_row =
        ClockLawReport::upper_bound("moment_bound_" + scheme_str, tail_max, moment.bound);
    bound_row.pass = moment.bounded;  // bound check carries the 3 SE allowance
    rows.emplace_back(scheme_str, bound_row);

    ClockLawReport trend_row = ClockLawReport::two_sided(
        "moment_trend_" + scheme_str, moment.trend_slope, 0.0, moment.trend_se);
    rows.emplace_back(scheme_str, trend_row);

    if (deltas.size() >= 2) {
      const HolderExperiment holder = run_holder_experiment(config, scheme, anchors, deltas);
      ClockLawReport holder_row;
      holder_row.statistic = "holder_dt_" + scheme_str;
      holder_row.empirical = holder.dt_coefficient;
      holder_row.standard_error = holder.dt_se;
      if (model.sigma > 0.0) {
        holder_row.analytic = 3.0 * model.sigma * model.sigma;
        holder_row.one_sided = true;
        holder_row.pass = holder.linear_bounded;
      } else {
        holder_row.analytic = 0.0;
        holder_row.one_sided = false;
        holder_row.pass = holder.linear_zero;
      }
      rows.emplace_back(scheme_str, holder_row);
    }
  }

  CsvWriter csv(output_file(config, "lemmas.csv").string(),
                {"group", "statistic", "empirical", "analytic", "se", "one_sided", "pass"});
  std::vector<ClockLawReport> reports;
  reports.reserve(rows.size());
  for (auto& [grp, report] : rows) {
    csv.write_row({grp, report.statistic, CsvWriter::num(report.empirical),
                   CsvWriter::num(report.analytic), CsvWriter::num(report.standard_error),
                   report.one_sided ? "true" : "false", report.pass ? "pass" : "fail"});
    reports.push_back(std::move(report));
  }
  return reports;
}

std::vector<DominanceRow> cmd_wasserstein(const ExperimentConfig& config) {
  const ConvergeOutcome outcome = run_converge_experiment(config, true);
  const std::vector<DominanceRow> rows = dominance_rows(outcome, config.dimension, config.seed);
  CsvWriter csv(output_file(config, "wasserstein.csv").string(),
                {"kappa", "time", "w2", "strong_error", "se", "dominated"});
  for (const auto& row : rows) {
    csv.write_row({CsvWriter::num(row.kappa), CsvWriter::num(row.time), CsvWriter::num(row.w2),
                   CsvWriter::num(row.strong_error), CsvWriter::num(row.se),
                   row.dominated ? "true" : "false"});
  }
  return rows;
}

std::string config_digest(const ExperimentConfig& config) {
  const std::string text = config.to_json();
  std::uint64_t hash = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << hash;
  return os.str();
}

}  // namespace rbm
