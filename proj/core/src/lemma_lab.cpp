#include "rbm/lemma_lab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rbm/dynamics.hpp"
#include "rbm/rng.hpp"
#include "rbm/schedule.hpp"
#include "rbm/stats.hpp"

namespace rbm {

ClockLawReport ClockLawReport::two_sided(std::string name, double empirical,
                                         double analytic, double se) {
  ClockLawReport report;
  report.statistic = std::move(name);
  report.empirical = empirical;
  report.analytic = analytic;
  report.standard_error = se;
  report.one_sided = false;
  report.pass = se > 0.0 ? std::abs(empirical - analytic) <= 3.0 * se
                         : empirical == analytic;
  return report;
}

ClockLawReport ClockLawReport::upper_bound(std::string name, double empirical,
                                           double bound) {
  ClockLawReport report;
  report.statistic = std::move(name);
  report.empirical = empirical;
  report.analytic = bound;
  report.one_sided = true;
  report.pass = empirical <= bound;
  return report;
}

namespace {

void check_clock_args(int particles, int batch_size, long samples) {
  if (batch_size < 2 || batch_size > particles) {
    throw std::invalid_argument("clock validator: batch_size must be in [2, N]");
  }
  if (samples < 1) throw std::invalid_argument("clock validator: samples must be >= 1");
}

// Draws batches until the tracked particle has been selected; returns the gap
// in intervals, counting the selection interval itself (always >= 1).
long next_gap(int particles, int batch_size, StreamRng& rng, std::vector<int>& batch) {
  long gap = 0;
  while (true) {
    ++gap;
    sample_batch(particles, batch_size, rng, batch);
    if (std::find(batch.begin(), batch.end(), 0) != batch.end()) return gap;
  }
}

}  // namespace

std::vector<ClockLawReport> validate_geometric_clock(int particles, int batch_size,
                                                     long samples, std::uint64_t seed) {
  check_clock_args(particles, batch_size, samples);
  StreamRng rng(derive_key(seed, {static_cast<std::uint64_t>(StreamPurpose::kBatch),
                                  static_cast<std::uint64_t>(particles),
                                  static_cast<std::uint64_t>(batch_size)}));
  std::vector<int> batch(static_cast<std::size_t>(batch_size));
  std::vector<double> gaps(static_cast<std::size_t>(samples));
  for (long s = 0; s < samples; ++s) {
    gaps[static_cast<std::size_t>(s)] =
        static_cast<double>(next_gap(particles, batch_size, rng, batch));
  }

  const double rate = static_cast<double>(batch_size) / particles;
  const double mean_exact = static_cast<double>(particles) / batch_size;
  const double var_exact = mean_exact * mean_exact - mean_exact;
  const MomentSummary sum = summarize(gaps);

  std::vector<ClockLawReport> rows;
  rows.push_back(ClockLawReport::two_sided("gap_mean", sum.mean, mean_exact, sum.se_mean));
  rows.push_back(
      ClockLawReport::two_sided("gap_variance", sum.variance, var_exact, sum.se_variance));

  // Chi-square against the geometric pmf, binning while the expected count
  // stays >= 5, remainder lumped into a tail bin.
  std::vector<long> observed;
  double tail_prob = 1.0;
  for (int j = 1;; ++j) {
    const double pj = std::pow(1.0 - rate, j - 1) * rate;
    if (pj * static_cast<double>(samples) < 5.0 || j > 10000) break;
    observed.push_back(0);
    tail_prob -= pj;
  }
  const std::size_t bins = observed.size();
  long tail_count = 0;
  for (double g : gaps) {
    const auto j = static_cast<std::size_t>(g);
    if (j >= 1 && j <= bins) {
      ++observed[j - 1];
    } else {
      ++tail_count;
    }
  }
  double chi_p = 1.0;
  if (bins >= 2) {
    double stat = 0.0;
    for (std::size_t j = 0; j < bins; ++j) {
      const double expected =
          std::pow(1.0 - rate, static_cast<double>(j)) * rate * static_cast<double>(samples);
      const double diff = static_cast<double>(observed[j]) - expected;
      stat += diff * diff / expected;
    }
    double df = static_cast<double>(bins) - 1.0;
    if (tail_prob * static_cast<double>(samples) >= 5.0) {
      const double expected_tail = tail_prob * static_cast<double>(samples);
      const double diff = static_cast<double>(tail_count) - expected_tail;
      stat += diff * diff / expected_tail;
      df += 1.0;
    }
    chi_p = chi_square_pvalue(stat, df);
  }
  ClockLawReport chi_row;
  chi_row.statistic = "gap_chi_square";
  chi_row.empirical = chi_p;
  chi_row.analytic = 0.001;  // significance floor
  chi_row.one_sided = true;
  chi_row.pass = bins < 2 || chi_p > 0.001;  // degenerate p = N case has one bin
  rows.push_back(chi_row);
  return rows;
}

std::vector<ClockLawReport> validate_lln_variance(int particles, int batch_size,
                                                  double kappa, double t, long samples,
                                                  std::uint64_t seed) {
  check_clock_args(particles, batch_size, samples);
  const long n_t = grid_index(t, kappa);  // throws unless kappa divides t
  StreamRng rng(derive_key(seed, {static_cast<std::uint64_t>(StreamPurpose::kBatch),
                                  static_cast<std::uint64_t>(particles),
                                  static_cast<std::uint64_t>(batch_size), 7}));
  const double mean_gap = static_cast<double>(particles) / batch_size;
  std::vector<int> batch(static_cast<std::size_t>(batch_size));
  std::vector<double> squared(static_cast<std::size_t>(samples));
  for (long s = 0; s < samples; ++s) {
    // Deviation of the selection time over n_t + 1 gaps, centered term by term.
    double deviation = 0.0;
    for (long n = 0; n <= n_t; ++n) {
      deviation += static_cast<double>(next_gap(particles, batch_size, rng, batch)) - mean_gap;
    }
    deviation *= kappa;
    squared[static_cast<std::size_t>(s)] = deviation * deviation;
  }
  const double var_gap = mean_gap * mean_gap - mean_gap;
  const double analytic = var_gap * kappa * kappa * (static_cast<double>(n_t) + 1.0);
  const MomentSummary sum = summarize(squared);
  return {ClockLawReport::two_sided("lln_second_moment", sum.mean, analytic, sum.se_mean)};
}

std::vector<ClockLawReport> validate_binomial_counts(int particles, int batch_size,
                                                     long interval_index, long samples,
                                                     std::uint64_t seed) {
  check_clock_args(particles, batch_size, samples);
  if (interval_index < 0) throw std::invalid_argument("validate_binomial_counts: k must be >= 0");
  StreamRng rng(derive_key(seed, {static_cast<std::uint64_t>(StreamPurpose::kBatch),
                                  static_cast<std::uint64_t>(particles),
                                  static_cast<std::uint64_t>(batch_size), 11}));
  std::vector<int> batch(static_cast<std::size_t>(batch_size));
  std::vector<double> counts(static_cast<std::size_t>(samples));
  for (long s = 0; s < samples; ++s) {
    long count = 0;
    for (long k = 0; k <= interval_index; ++k) {
      sample_batch(particles, batch_size, rng, batch);
      if (std::find(batch.begin(), batch.end(), 0) != batch.end()) ++count;
    }
    counts[static_cast<std::size_t>(s)] = static_cast<double>(count);
  }
  const double rate = static_cast<double>(batch_size) / particles;
  const double trials = static_cast<double>(interval_index) + 1.0;
  const MomentSummary sum = summarize(counts);
  std::vector<ClockLawReport> rows;
  rows.push_back(ClockLawReport::two_sided("count_mean", sum.mean, trials * rate, sum.se_mean));
  rows.push_back(ClockLawReport::two_sided("count_variance", sum.variance,
                                           trials * rate * (1.0 - rate), sum.se_variance));
  return rows;
}

std::vector<ClockLawReport> validate_clock_gap_integral(int particles, int batch_size,
                                                        double kappa, double t,
                                                        long samples, std::uint64_t seed,
                                                        int first_particle,
                                                        int second_particle) {
  check_clock_args(particles, batch_size, samples);
  if (first_particle < 0 || first_particle >= particles || second_particle < 0 ||
      second_particle >= particles) {
    throw std::invalid_argument("validate_clock_gap_integral: particle index out of range");
  }
  const long n_t = grid_index(t, kappa);
  const long ratio = particles / batch_size;
  const long pseudo_intervals = ratio * n_t;  // grid points 0..pseudo_intervals
  StreamRng rng(derive_key(seed, {static_cast<std::uint64_t>(StreamPurpose::kBatch),
                                  static_cast<std::uint64_t>(particles),
                                  static_cast<std::uint64_t>(batch_size), 13}));
  std::vector<int> batch(static_cast<std::size_t>(batch_size));
  // Mean squared last-selection-interval difference at each pseudo grid point.
  std::vector<CompensatedSum> grid(static_cast<std::size_t>(pseudo_intervals) + 1);
  for (long s = 0; s < samples; ++s) {
    long last_i = 0;  // stands in for "no selection yet"
    long last_j = 0;
    for (long m = 0; m <= pseudo_intervals; ++m) {
      // Interval m starts at pseudo-time m kappa, so its selection counts at
      // grid point m; the final grid point sees no new interval.
      if (m < pseudo_intervals) {
        sample_batch(particles, batch_size, rng, batch);
        if (std::find(batch.begin(), batch.end(), first_particle) != batch.end()) {
          last_i = m;
        }
        if (std::find(batch.begin(), batch.end(), second_particle) != batch.end()) {
          last_j = m;
        }
      }
      const double diff = static_cast<double>(last_i - last_j);
      grid[static_cast<std::size_t>(m)].add(diff * diff);
    }
  }
  // Trapezoid over the pseudo grid.
  CompensatedSum integral;
  for (long m = 0; m <= pseudo_intervals; ++m) {
    const double mean = grid[static_cast<std::size_t>(m)].value() / static_cast<double>(samples);
    const double weight = (m == 0 || m == pseudo_intervals) ? 0.5 : 1.0;
    integral.add(weight * mean * kappa);
  }
  const double ratio_d = static_cast<double>(particles) / batch_size;
  const double bound = 6.0 * ratio_d * ratio_d * ratio_d * t * (1.0 + 2.0 * t / kappa);
  return {ClockLawReport::upper_bound("clock_gap_integral", integral.value(), bound)};
}

}  // namespace rbm
