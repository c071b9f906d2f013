#include "rbm/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rbm/dynamics.hpp"

namespace rbm {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (model != "quadratic-saturating" && model != "quadratic-linear-test" &&
      model != "zero-kernel") {
    throw std::invalid_argument("config.model: unknown model '" + model + "'");
  }
  if (dimension < 1) throw std::invalid_argument("config.dimension: must be >= 1");
  if (particles < 2) throw std::invalid_argument("config.particles: must be >= 2");
  if (batch_size < 2) throw std::invalid_argument("config.batch_size: must be >= 2");
  if (batch_size > particles) {
    throw std::invalid_argument("config.batch_size: must be <= particles");
  }
  if (sigma < 0.0) throw std::invalid_argument("config.sigma: must be >= 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("config.horizon: must be > 0");
  if (substeps < 1) throw std::invalid_argument("config.substeps: must be >= 1");
  if (replicas < 2) throw std::invalid_argument("config.replicas: must be >= 2");
  if (kappas.empty()) throw std::invalid_argument("config.kappas: must be nonempty");
  for (std::size_t i = 0; i + 1 < kappas.size(); ++i) {
    if (!(kappas[i] > kappas[i + 1])) {
      throw std::invalid_argument("config.kappas: must be strictly decreasing");
    }
  }
  for (double kappa : kappas) {
    if (!(kappa > 0.0)) throw std::invalid_argument("config.kappas: must be positive");
    try {
      grid_index(horizon, kappa);
    } catch (const std::exception&) {
      throw std::invalid_argument("config.kappas: kappa " + std::to_string(kappa) +
                                  " does not divide the horizon");
    }
    for (double t : eval_times) {
      if (t > horizon * (1.0 + 1e-9)) {
        throw std::invalid_argument("config.eval_times: time beyond horizon");
      }
      try {
        grid_index(t, kappa);
      } catch (const std::exception&) {
        throw std::invalid_argument("config.eval_times: time " + std::to_string(t) +
                                    " is off the kappa " + std::to_string(kappa) + " grid");
      }
    }
  }
  if (schemes.empty()) throw std::invalid_argument("config.schemes: must be nonempty");
  bool uses_batches = false;
  for (const auto& name : schemes) {
    scheme_from_name(name);  // throws on unknown
    if (name != "ips") uses_batches = true;
  }
  if (uses_batches && particles % batch_size != 0) {
    throw std::invalid_argument("config.batch_size: must divide particles for batch schemes");
  }
  if (initial.kind != "gaussian") {
    throw std::invalid_argument("config.initial.kind: only 'gaussian' is supported");
  }
  if (!(initial.stddev >= 0.0)) {
    throw std::invalid_argument("config.initial.stddev: must be >= 0");
  }
  if (threads < 0) throw std::invalid_argument("config.threads: must be >= 0");
}

namespace {

json to_json_value(const ExperimentConfig& c) {
  return json{
      {"model", {{"name", c.model}, {"lambda", c.lambda}, {"kernel_amplitude", c.kernel_amplitude}}},
      {"dimension", c.dimension},
      {"particles", c.particles},
      {"batch_size", c.batch_size},
      {"sigma", c.sigma},
      {"horizon", c.horizon},
      {"kappas", c.kappas},
      {"substeps", c.substeps},
      {"replicas", c.replicas},
      {"seed", c.seed},
      {"eval_times", c.eval_times},
      {"schemes", c.schemes},
      {"initial",
       {{"kind", c.initial.kind}, {"mean", c.initial.mean}, {"stddev", c.initial.stddev}}},
      {"output_dir", c.output_dir},
      {"common_random_numbers", c.common_random_numbers},
      {"threads", c.threads},
  };
}

}  // namespace

std::string ExperimentConfig::to_json() const {
  return to_json_value(*this).dump(2) + "\n";
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig c;
  if (j.contains("model")) {
    const auto& m = j.at("model");
    if (m.contains("name")) c.model = m.at("name").get<std::string>();
    if (m.contains("lambda")) c.lambda = m.at("lambda").get<double>();
    if (m.contains("kernel_amplitude")) c.kernel_amplitude = m.at("kernel_amplitude").get<double>();
  }
  if (j.contains("dimension")) c.dimension = j.at("dimension").get<int>();
  if (j.contains("particles")) c.particles = j.at("particles").get<int>();
  if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<int>();
  if (j.contains("sigma")) c.sigma = j.at("sigma").get<double>();
  if (j.contains("horizon")) c.horizon = j.at("horizon").get<double>();
  if (j.contains("kappas")) c.kappas = j.at("kappas").get<std::vector<double>>();
  if (j.contains("substeps")) c.substeps = j.at("substeps").get<int>();
  if (j.contains("replicas")) c.replicas = j.at("replicas").get<long>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("eval_times")) c.eval_times = j.at("eval_times").get<std::vector<double>>();
  if (j.contains("schemes")) c.schemes = j.at("schemes").get<std::vector<std::string>>();
  if (j.contains("initial")) {
    const auto& init = j.at("initial");
    if (init.contains("kind")) c.initial.kind = init.at("kind").get<std::string>();
    if (init.contains("mean")) c.initial.mean = init.at("mean").get<double>();
    if (init.contains("stddev")) c.initial.stddev = init.at("stddev").get<double>();
  }
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("common_random_numbers")) {
    c.common_random_numbers = j.at("common_random_numbers").get<bool>();
  }
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

}  // namespace rbm
