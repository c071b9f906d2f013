// Experiment harness: replica orchestration, pseudo-time alignment,
// aggregation, and CSV/report emission behind the CLI subcommands.

#ifndef RBM_HARNESS_HPP
#define RBM_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rbm/config.hpp"
#include "rbm/coupling.hpp"
#include "rbm/dynamics.hpp"
#include "rbm/lemma_lab.hpp"
#include "rbm/metrics.hpp"
#include "rbm/model.hpp"

namespace rbm {

// Builds the configured model; simulation commands reject models that violate
// the declared contraction condition.
ModelSpec model_from_config(const ExperimentConfig& config);

// i.i.d. Gaussian initial positions for one replica. The stratum enters the
// stream key; the converge sweep uses it to decouple kappa points unless
// common random numbers are requested.
Ensemble initial_ensemble(const ExperimentConfig& config, long replica,
                          std::uint64_t stratum = 0);

// Effective worker count: config value, else the RBM_THREADS environment
// variable, else hardware concurrency.
int resolve_threads(const ExperimentConfig& config);

// Runs body(replica) for every replica id on a bounded worker pool. Bodies
// must only touch replica-indexed state; any merge happens afterwards in
// replica order, so results are independent of the worker count.
void parallel_replicas(long replicas, int threads, const std::function<void(long)>& body);

struct KappaErrorRow {
  double kappa = 0.0;
  std::vector<double> times;
  std::vector<double> errors;      // sqrt(pooled mean squared deviation) per time
  std::vector<double> ses;         // delta-method standard error per time
  double sup_error = 0.0;          // sup over eval times
  double sup_se = 0.0;
  double wall_seconds = 0.0;
  // First-particle marginal samples per eval time (replicas x dimension),
  // collected when requested for distance cross-checks.
  std::vector<EmpiricalMarginal> rbmr_marginals;
  std::vector<EmpiricalMarginal> ips_marginals;
};

struct ConvergeOutcome {
  std::vector<KappaErrorRow> rows;
  bool degenerate_zero_error = false;  // slope fit refused (all-zero errors)
  SlopeFit fit;                        // valid when not degenerate
};

ConvergeOutcome run_converge_experiment(const ExperimentConfig& config,
                                        bool collect_marginals);

struct RunRecord {
  std::string config_digest;
  ConvergeOutcome converge;
};

struct MomentExperiment {
  Scheme scheme = Scheme::kIps;
  std::vector<MomentPoint> series;  // pooled second moment over the grid
  double bound = 0.0;               // stationary oracle bound with Euler inflation
  bool bounded = false;             // final-half series under bound + 3 SE
  double trend_slope = 0.0;         // regression slope over the final half
  double trend_se = 0.0;            // from replica-wise slopes
  bool trend_flat = false;          // |slope| <= 3 SE
};

MomentExperiment run_moment_experiment(const ExperimentConfig& config, Scheme scheme,
                                       std::span<const double> record_times);

struct HolderExperiment {
  Scheme scheme = Scheme::kIps;
  double dt_coefficient = 0.0;   // linear coefficient of the displacement law
  double dt_se = 0.0;            // from replica-wise fits
  double dt2_coefficient = 0.0;
  bool linear_bounded = false;   // dt coefficient <= 3 sigma^2 + 3 SE
  bool linear_zero = false;      // |dt coefficient| <= 3 SE
};

HolderExperiment run_holder_experiment(const ExperimentConfig& config, Scheme scheme,
                                       std::span<const double> anchors,
                                       std::span<const double> deltas);

struct DominanceRow {
  double kappa = 0.0;
  double time = 0.0;
  double w2 = 0.0;
  double strong_error = 0.0;
  double se = 0.0;
  bool dominated = false;  // w2 <= strong_error + 3 SE
};

std::vector<DominanceRow> dominance_rows(const ConvergeOutcome& outcome, int dimension,
                                         std::uint64_t seed);

struct CostScalingResult {
  std::vector<int> sizes;
  std::vector<double> ips_seconds;   // wall seconds per unit physical time
  std::vector<double> rbmr_seconds;
  double ips_exponent = 0.0;
  double rbmr_exponent = 0.0;
};

// Times one physical-time unit of the full and with-replacement dynamics over
// a particle-count sweep and fits the cost exponents. Single-threaded.
CostScalingResult measure_cost_scaling(std::span<const int> sizes, int batch_size,
                                       double kappa, double horizon, int substeps,
                                       std::uint64_t seed);

// CLI subcommand bodies; each writes its CSV (and converge a summary.txt)
// under config.output_dir and returns the structured result.
void cmd_simulate(const ExperimentConfig& config);
RunRecord cmd_converge(const ExperimentConfig& config);
std::vector<ClockLawReport> cmd_lemmas(const ExperimentConfig& config);
std::vector<DominanceRow> cmd_wasserstein(const ExperimentConfig& config);

std::string config_digest(const ExperimentConfig& config);

}  // namespace rbm

#endif  // RBM_HARNESS_HPP
