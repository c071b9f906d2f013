#include "rbm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rbm/rng.hpp"

namespace rbm {

double wasserstein2_1d(const EmpiricalMarginal& a, const EmpiricalMarginal& b) {
  if (a.dimension != 1 || b.dimension != 1) {
    throw std::invalid_argument("wasserstein2_1d: requires dimension 1");
  }
  if (a.count() != b.count() || a.count() < 2) {
    throw std::invalid_argument("wasserstein2_1d: requires equal sample counts >= 2");
  }
  std::vector<double> xs = a.samples;
  std::vector<double> ys = b.samples;
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  CompensatedSum acc;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - ys[i];
    acc.add(d * d);
  }
  return std::sqrt(acc.value() / static_cast<double>(xs.size()));
}

double wasserstein2_sliced(const EmpiricalMarginal& a, const EmpiricalMarginal& b,
                           int directions, std::uint64_t seed) {
  if (a.dimension < 2) {
    throw std::invalid_argument("wasserstein2_sliced: requires dimension >= 2; use wasserstein2_1d");
  }
  if (a.dimension != b.dimension) {
    throw std::invalid_argument("wasserstein2_sliced: dimension mismatch");
  }
  if (a.count() != b.count() || a.count() < 2) {
    throw std::invalid_argument("wasserstein2_sliced: requires equal sample counts >= 2");
  }
  if (directions < 1) throw std::invalid_argument("wasserstein2_sliced: directions must be >= 1");

  const int d = a.dimension;
  const int m = a.count();
  StreamRng rng(derive_key(seed, {static_cast<std::uint64_t>(StreamPurpose::kDirection)}));
  std::vector<double> direction(static_cast<std::size_t>(d));
  std::vector<double> pa(static_cast<std::size_t>(m));
  std::vector<double> pb(static_cast<std::size_t>(m));
  CompensatedSum total;
  for (int dir = 0; dir < directions; ++dir) {
    double norm2 = 0.0;
    for (double& v : direction) {
      v = rng.next_gaussian();
      norm2 += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : direction) v *= inv;
    for (int s = 0; s < m; ++s) {
      double da = 0.0, db = 0.0;
      for (int c = 0; c < d; ++c) {
        da += direction[static_cast<std::size_t>(c)] * a.samples[static_cast<std::size_t>(s) * d + c];
        db += direction[static_cast<std::size_t>(c)] * b.samples[static_cast<std::size_t>(s) * d + c];
      }
      pa[static_cast<std::size_t>(s)] = da;
      pb[static_cast<std::size_t>(s)] = db;
    }
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    CompensatedSum acc;
    for (int s = 0; s < m; ++s) {
      const double diff = pa[static_cast<std::size_t>(s)] - pb[static_cast<std::size_t>(s)];
      acc.add(diff * diff);
    }
    total.add(acc.value() / static_cast<double>(m));
  }
  return std::sqrt(total.value() / static_cast<double>(directions));
}

namespace {

void check_grid(const std::vector<std::vector<Ensemble>>& snapshots) {
  if (snapshots.empty() || snapshots.front().empty()) {
    throw std::invalid_argument("snapshot grid is empty");
  }
  const std::size_t times = snapshots.front().size();
  for (const auto& replica : snapshots) {
    if (replica.size() != times) {
      throw std::invalid_argument("snapshot grids differ across replicas");
    }
  }
}

}  // namespace

std::vector<MomentPoint> moment_track(const std::vector<std::vector<Ensemble>>& snapshots,
                                      int q) {
  if (q != 2 && q != 4) throw std::invalid_argument("moment_track: q must be 2 or 4");
  check_grid(snapshots);
  const std::size_t times = snapshots.front().size();
  std::vector<MomentPoint> series(times);
  std::vector<double> replica_means(snapshots.size());
  for (std::size_t t = 0; t < times; ++t) {
    for (std::size_t r = 0; r < snapshots.size(); ++r) {
      const Ensemble& ens = snapshots[r][t];
      CompensatedSum acc;
      for (int i = 0; i < ens.particles; ++i) {
        double norm2 = 0.0;
        for (double v : ens.position(i)) norm2 += v * v;
        acc.add(q == 2 ? norm2 : norm2 * norm2);
      }
      replica_means[r] = acc.value() / static_cast<double>(ens.particles);
    }
    const MomentSummary sum = summarize(replica_means);
    series[t].time = snapshots.front()[t].time;
    series[t].value = sum.mean;
    series[t].se = sum.se_mean;
  }
  return series;
}

std::vector<DisplacementPoint> holder_probe(
    const std::vector<std::vector<Ensemble>>& snapshots,
    const std::vector<std::pair<int, int>>& index_pairs) {
  check_grid(snapshots);
  std::vector<DisplacementPoint> points;
  points.reserve(index_pairs.size());
  std::vector<double> replica_means(snapshots.size());
  for (const auto& [i1, i2] : index_pairs) {
    for (std::size_t r = 0; r < snapshots.size(); ++r) {
      const Ensemble& a = snapshots[r][static_cast<std::size_t>(i1)];
      const Ensemble& b = snapshots[r][static_cast<std::size_t>(i2)];
      CompensatedSum acc;
      for (int i = 0; i < a.particles; ++i) {
        const auto xa = a.position(i);
        const auto xb = b.position(i);
        double norm2 = 0.0;
        for (int c = 0; c < a.dimension; ++c) {
          const double diff = xb[c] - xa[c];
          norm2 += diff * diff;
        }
        acc.add(norm2);
      }
      replica_means[r] = acc.value() / static_cast<double>(a.particles);
    }
    const MomentSummary sum = summarize(replica_means);
    DisplacementPoint point;
    point.dt = snapshots.front()[static_cast<std::size_t>(i2)].time -
               snapshots.front()[static_cast<std::size_t>(i1)].time;
    point.value = sum.mean;
    point.se = sum.se_mean;
    points.push_back(point);
  }
  return points;
}

SlopeFit fit_slope(std::span<const double> kappas, std::span<const double> errors) {
  if (kappas.size() != errors.size() || kappas.size() < 3) {
    throw std::invalid_argument("fit_slope: need >= 3 (kappa, error) points");
  }
  for (std::size_t i = 0; i + 1 < kappas.size(); ++i) {
    if (!(kappas[i] > kappas[i + 1])) {
      throw std::invalid_argument("fit_slope: kappas must be strictly decreasing");
    }
  }
  std::vector<double> lx(kappas.size());
  std::vector<double> ly(kappas.size());
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    if (!(errors[i] > 0.0)) {
      throw std::invalid_argument("fit_slope: errors must be positive (log undefined)");
    }
    lx[i] = std::log(kappas[i]);
    ly[i] = std::log(errors[i]);
  }
  const LinearFit fit = least_squares(lx, ly);
  SlopeFit out;
  out.kappas.assign(kappas.begin(), kappas.end());
  out.errors.assign(errors.begin(), errors.end());
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.r_squared = fit.r_squared;
  return out;
}

}  // namespace rbm
