// Experiment configuration: a single human-readable JSON file drives every
// subcommand; print-config dumps the effective settings so each run is
// self-describing.

#ifndef RBM_CONFIG_HPP
#define RBM_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace rbm {

struct InitialCondition {
  std::string kind = "gaussian";  // i.i.d. per coordinate
  double mean = 0.0;
  double stddev = 1.0;
};

struct ExperimentConfig {
  // model
  std::string model = "quadratic-saturating";
  double lambda = 1.0;
  double kernel_amplitude = 0.4;

  // system
  int dimension = 1;
  int particles = 16;
  int batch_size = 2;
  double sigma = 0.0;

  // discretization
  double horizon = 1.0;
  std::vector<double> kappas = {0.1, 0.05, 0.025, 0.0125, 0.00625};  // descending
  int substeps = 4;

  // sampling
  long replicas = 100;
  std::uint64_t seed = 2024;
  std::vector<double> eval_times = {0.25, 0.5, 0.75, 1.0};
  std::vector<std::string> schemes = {"ips", "rbm1", "rbmr"};
  InitialCondition initial;

  // execution
  std::string output_dir = "out";
  bool common_random_numbers = false;
  int threads = 0;  // 0: RBM_THREADS env var, else hardware concurrency

  void validate() const;  // throws std::invalid_argument naming the field

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::string& path);
};

}  // namespace rbm

#endif  // RBM_CONFIG_HPP
