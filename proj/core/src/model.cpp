#include "rbm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "rbm/rng.hpp"

namespace rbm {

void ModelSpec::validate() const {
  if (dimension < 1) throw std::invalid_argument("ModelSpec.dimension must be >= 1");
  if (sigma < 0.0) throw std::invalid_argument("ModelSpec.sigma must be >= 0");
  if (lambda <= 0.0) throw std::invalid_argument("ModelSpec.lambda must be > 0");
  if (lipschitz_k < 0.0) throw std::invalid_argument("ModelSpec.lipschitz_k must be >= 0");
  if (kernel_bound < 0.0) throw std::invalid_argument("ModelSpec.kernel_bound must be >= 0");
  if (!grad_potential || !kernel) {
    throw std::invalid_argument("ModelSpec.grad_potential/kernel must be set");
  }
  if (contraction_declared && !(lambda > 2.0 * lipschitz_k)) {
    throw std::invalid_argument("ModelSpec: contraction condition lambda > 2 L violated");
  }
}

ModelSpec saturating_model(double lambda, double amplitude, int dimension, double sigma) {
  ModelSpec m;
  m.name = "quadratic-saturating";
  m.dimension = dimension;
  m.lambda = lambda;
  m.lipschitz_k = amplitude;
  m.kernel_bound = amplitude;
  m.sigma = sigma;
  m.contraction_declared = lambda > 2.0 * amplitude;
  m.grad_potential = [lambda](std::span<const double> x, std::span<double> out) {
    for (std::size_t c = 0; c < x.size(); ++c) out[c] = lambda * x[c];
  };
  m.kernel = [amplitude](std::span<const double> x, std::span<double> out) {
    double norm2 = 0.0;
    for (double v : x) norm2 += v * v;
    const double scale = amplitude / std::sqrt(1.0 + norm2);
    for (std::size_t c = 0; c < x.size(); ++c) out[c] = scale * x[c];
  };
  return m;
}

ModelSpec linear_kernel_test_model(int dimension) {
  ModelSpec m;
  m.name = "quadratic-linear-test";
  m.dimension = dimension;
  m.lambda = 1.0;
  m.lipschitz_k = 1.0;
  m.kernel_bound = std::numeric_limits<double>::infinity();
  m.sigma = 0.0;
  m.contraction_declared = false;  // unbounded kernel, 1 <= 2*1
  m.grad_potential = [](std::span<const double> x, std::span<double> out) {
    for (std::size_t c = 0; c < x.size(); ++c) out[c] = x[c];
  };
  m.kernel = [](std::span<const double> x, std::span<double> out) {
    for (std::size_t c = 0; c < x.size(); ++c) out[c] = x[c];
  };
  return m;
}

ModelSpec zero_kernel_model(double lambda, int dimension, double sigma) {
  ModelSpec m;
  m.name = "zero-kernel";
  m.dimension = dimension;
  m.lambda = lambda;
  m.lipschitz_k = 0.0;
  m.kernel_bound = 0.0;
  m.sigma = sigma;
  m.contraction_declared = lambda > 0.0;
  m.grad_potential = [lambda](std::span<const double> x, std::span<double> out) {
    for (std::size_t c = 0; c < x.size(); ++c) out[c] = lambda * x[c];
  };
  m.kernel = [](std::span<const double> x, std::span<double> out) {
    for (std::size_t c = 0; c < x.size(); ++c) out[c] = 0.0;
  };
  return m;
}

ModelSpec BuiltinModel::to_spec() const {
  if (name == "quadratic-saturating") {
    if (!(lambda > 2.0 * amplitude)) {
      std::ostringstream msg;
      msg << "quadratic-saturating requires lambda > 2a; got lambda=" << lambda
          << " a=" << amplitude;
      throw std::invalid_argument(msg.str());
    }
    return saturating_model(lambda, amplitude, dimension, sigma);
  }
  if (name == "quadratic-linear-test") {
    return linear_kernel_test_model(dimension);
  }
  if (name == "zero-kernel") {
    return zero_kernel_model(lambda, dimension, sigma);
  }
  throw std::invalid_argument("unknown builtin model: " + name);
}

namespace {

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t c = 0; c < x.size(); ++c) {
    if (c) os << ", ";
    os << x[c];
  }
  os << ")";
  return os.str();
}

void require_finite(std::span<const double> value, std::span<const double> input,
                    const char* what) {
  for (double v : value) {
    if (!std::isfinite(v)) {
      throw std::runtime_error(std::string("audit_assumptions: non-finite ") + what +
                               " at input " + format_point(input));
    }
  }
}

// Uniform point in the ball of the given radius.
void sample_in_ball(StreamRng& rng, double radius, std::span<double> out) {
  double norm2 = 0.0;
  for (double& v : out) {
    v = rng.next_gaussian();
    norm2 += v * v;
  }
  const double norm = std::sqrt(norm2);
  const double d = static_cast<double>(out.size());
  const double r = radius * std::pow(rng.next_unit(), 1.0 / d);
  const double scale = norm > 0.0 ? r / norm : 0.0;
  for (double& v : out) v *= scale;
}

}  // namespace

AuditReport audit_assumptions(const ModelSpec& model, long sample_count,
                              double radius, std::uint64_t seed) {
  if (sample_count < 2) throw std::invalid_argument("audit_assumptions: sample_count must be >= 2");
  if (!(radius > 0.0)) throw std::invalid_argument("audit_assumptions: radius must be > 0");

  const int d = model.dimension;
  StreamRng rng(derive_key(seed, {static_cast<std::uint64_t>(StreamPurpose::kAudit)}));

  std::vector<double> x(d), y(d), gx(d), gy(d), kx(d), ky(d);
  double lambda_hat = std::numeric_limits<double>::infinity();
  double lipschitz_hat = 0.0;
  double bound_hat = 0.0;

  for (long s = 0; s < sample_count; ++s) {
    sample_in_ball(rng, radius, x);
    sample_in_ball(rng, radius, y);
    model.grad_potential(x, gx);
    model.grad_potential(y, gy);
    model.kernel(x, kx);
    model.kernel(y, ky);
    require_finite(gx, x, "grad_potential");
    require_finite(gy, y, "grad_potential");
    require_finite(kx, x, "kernel");
    require_finite(ky, y, "kernel");

    double dist2 = 0.0, grad_dot = 0.0, kdiff2 = 0.0, kx2 = 0.0, ky2 = 0.0;
    for (int c = 0; c < d; ++c) {
      const double dx = x[c] - y[c];
      dist2 += dx * dx;
      grad_dot += dx * (gx[c] - gy[c]);
      const double dk = kx[c] - ky[c];
      kdiff2 += dk * dk;
      kx2 += kx[c] * kx[c];
      ky2 += ky[c] * ky[c];
    }
    bound_hat = std::max({bound_hat, std::sqrt(kx2), std::sqrt(ky2)});
    if (dist2 > 1e-24) {
      lambda_hat = std::min(lambda_hat, grad_dot / dist2);
      lipschitz_hat = std::max(lipschitz_hat, std::sqrt(kdiff2 / dist2));
    }
  }

  AuditReport report;
  report.lambda_hat = lambda_hat;
  report.lipschitz_hat = lipschitz_hat;
  report.kernel_bound_hat = bound_hat;
  report.strongly_convex = lambda_hat > 0.0;
  constexpr double kTol = 1e-12;
  report.contraction = lambda_hat > 2.0 * lipschitz_hat - kTol;
  report.bound_consistent = bound_hat <= model.kernel_bound + kTol;
  report.pass = report.contraction;
  return report;
}

void pairwise_force(const ModelSpec& model, const Ensemble& ensemble, int i,
                    std::span<double> out, ForceScratch& scratch) {
  const int n = ensemble.particles;
  const int d = ensemble.dimension;
  if (n < 2) throw std::invalid_argument("pairwise_force: need at least 2 particles");
  if (i < 0 || i >= n) throw std::invalid_argument("pairwise_force: particle index out of range");

  scratch.resize(d);
  std::span<double> diff = scratch.diff;
  std::span<double> k = scratch.kernel_value;
  const auto xi = ensemble.position(i);
  for (int c = 0; c < d; ++c) out[c] = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    const auto xj = ensemble.position(j);
    for (int c = 0; c < d; ++c) diff[c] = xj[c] - xi[c];
    model.kernel(diff, k);
    for (int c = 0; c < d; ++c) out[c] += k[c];
  }
  const double scale = 1.0 / static_cast<double>(n - 1);
  for (int c = 0; c < d; ++c) out[c] *= scale;
}

void pairwise_force(const ModelSpec& model, const Ensemble& ensemble, int i,
                    std::span<double> out) {
  ForceScratch scratch;
  pairwise_force(model, ensemble, i, out, scratch);
}

std::vector<double> pairwise_force(const ModelSpec& model, const Ensemble& ensemble, int i) {
  std::vector<double> out(ensemble.dimension, 0.0);
  pairwise_force(model, ensemble, i, out);
  return out;
}

}  // namespace rbm
