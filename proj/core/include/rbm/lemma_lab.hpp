// Statistical validators for the selection-clock laws: gap distribution,
// law-of-large-numbers variance of the selection time, binomial selection
// counts, and the integrated clock-gap bound. These sample batch schedules
// only, so they isolate the batching laws from the particle dynamics.

#ifndef RBM_LEMMA_LAB_HPP
#define RBM_LEMMA_LAB_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace rbm {

struct ClockLawReport {
  std::string statistic;
  double empirical = 0.0;
  double analytic = 0.0;
  double standard_error = 0.0;  // zero for exact identities
  bool one_sided = false;       // pass means empirical <= analytic
  bool pass = false;

  // Two-sided reports pass at |empirical - analytic| <= 3 SE (absolute
  // equality when SE is zero); one-sided reports pass at empirical <= analytic.
  static ClockLawReport two_sided(std::string name, double empirical, double analytic,
                                  double se);
  static ClockLawReport upper_bound(std::string name, double empirical, double bound);
};

// Inter-selection gaps of one particle under i.i.d. uniform p-subsets: mean
// N/p, variance N^2/p^2 - N/p, and a chi-square test against the geometric
// law P(gap = j) = (1 - p/N)^{j-1} p/N. Rows: gap_mean, gap_variance,
// gap_chi_square (empirical = p-value, pass iff > 0.001).
std::vector<ClockLawReport> validate_geometric_clock(int particles, int batch_size,
                                                     long samples, std::uint64_t seed);

// Second moment of the centered selection-time deviation: the sum of the
// t/kappa + 1 i.i.d. gaps through the (t/kappa + 1)-th selection, centered at
// its mean, times kappa. Analytic value (N^2/p^2 - N/p) kappa^2 (t/kappa + 1).
// Requires kappa to divide t.
std::vector<ClockLawReport> validate_lln_variance(int particles, int batch_size,
                                                  double kappa, double t, long samples,
                                                  std::uint64_t seed);

// Selection count of one particle over intervals 0..k: binomial with k+1
// trials at rate p/N. Rows: count_mean, count_variance.
std::vector<ClockLawReport> validate_binomial_counts(int particles, int batch_size,
                                                     long interval_index, long samples,
                                                     std::uint64_t seed);

// Trapezoid estimate of the integrated squared difference between the
// last-selection intervals of two particles over the pseudo horizon (N/p) t,
// checked one-sided against 6 (N/p)^3 t (1 + 2 t / kappa).
std::vector<ClockLawReport> validate_clock_gap_integral(int particles, int batch_size,
                                                        double kappa, double t,
                                                        long samples, std::uint64_t seed,
                                                        int first_particle = 0,
                                                        int second_particle = 1);

}  // namespace rbm

#endif  // RBM_LEMMA_LAB_HPP
