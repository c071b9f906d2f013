// Model definitions: confining potential gradient, interaction kernel, and
// the constants (lambda, L, ||K||inf, sigma) the error analysis rests on,
// plus a sampled audit of those constants.

#ifndef RBM_MODEL_HPP
#define RBM_MODEL_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "rbm/ensemble.hpp"

namespace rbm {

using VectorField = std::function<void(std::span<const double> x, std::span<double> out)>;

struct ModelSpec {
  std::string name = "custom";
  int dimension = 1;
  VectorField grad_potential;  // gradient of the confining potential
  VectorField kernel;          // pairwise interaction kernel K

  double lambda = 0.0;       // strong-convexity constant of the potential
  double lipschitz_k = 0.0;  // Lipschitz constant of the kernel
  double kernel_bound = 0.0; // sup-norm bound of the kernel
  double sigma = 0.0;        // diffusion constant

  // False for test-only models (unbounded kernel, flat potential). Simulation
  // entry points refuse such models; force evaluation still works.
  bool contraction_declared = true;

  void validate() const;  // throws std::invalid_argument naming the field
};

// Builtin model selection, constructible by name from harness configs.
struct BuiltinModel {
  std::string name;           // "quadratic-saturating" | "quadratic-linear-test"
  double lambda = 1.0;        // potential curvature
  double amplitude = 0.4;     // kernel amplitude a
  int dimension = 1;
  double sigma = 0.0;

  // Throws unless the contraction condition lambda > 2a holds for the
  // saturating kernel; the linear test kernel is always flagged non-conforming.
  ModelSpec to_spec() const;
};

// V(x) = lambda/2 |x|^2, K(x) = a x / sqrt(1 + |x|^2); then ||K||inf = L = a.
// No contraction gate: callers that need lambda > 2a enforced should go
// through BuiltinModel.
ModelSpec saturating_model(double lambda, double amplitude, int dimension, double sigma);

// V(x) = |x|^2 / 2, K(x) = x. Unbounded kernel, test-only: exists so that
// batch-force identities have hand-checkable numbers.
ModelSpec linear_kernel_test_model(int dimension);

// V(x) = lambda/2 |x|^2, K = 0.
ModelSpec zero_kernel_model(double lambda, int dimension, double sigma);

struct AuditReport {
  double lambda_hat = 0.0;        // min sampled convexity quotient
  double lipschitz_hat = 0.0;     // max sampled kernel difference quotient
  double kernel_bound_hat = 0.0;  // max sampled |K|
  bool strongly_convex = false;   // lambda_hat > 0
  bool contraction = false;       // lambda_hat > 2 lipschitz_hat
  bool bound_consistent = false;  // kernel_bound_hat <= declared bound
  bool pass = false;              // == contraction
};

// Samples point pairs in the ball of the given radius and estimates the
// model constants. Throws on non-finite model output, naming the offending
// input point.
AuditReport audit_assumptions(const ModelSpec& model, long sample_count,
                              double radius, std::uint64_t seed);

// Reusable buffers for force evaluation; keeps the per-substep inner loops
// allocation-free.
struct ForceScratch {
  std::vector<double> diff;
  std::vector<double> kernel_value;
  void resize(int dimension) {
    diff.resize(static_cast<std::size_t>(dimension));
    kernel_value.resize(static_cast<std::size_t>(dimension));
  }
};

// Full interaction force on particle i: (1/(N-1)) sum_{j != i} K(x^j - x^i),
// summed in ascending j. Throws if N < 2.
void pairwise_force(const ModelSpec& model, const Ensemble& ensemble, int i,
                    std::span<double> out, ForceScratch& scratch);
void pairwise_force(const ModelSpec& model, const Ensemble& ensemble, int i,
                    std::span<double> out);
std::vector<double> pairwise_force(const ModelSpec& model, const Ensemble& ensemble, int i);

}  // namespace rbm

#endif  // RBM_MODEL_HPP
