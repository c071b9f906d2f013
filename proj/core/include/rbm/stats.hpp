// Small statistics toolbox: compensated summation, moment estimates with
// standard errors, least squares, and a chi-square tail probability.

#ifndef RBM_STATS_HPP
#define RBM_STATS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace rbm {

// Neumaier compensated accumulator; reduction order is the call order, so
// results are bit-reproducible for a fixed order.
class CompensatedSum {
 public:
  void add(double value);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_total(std::span<const double> values);

struct MomentSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;       // unbiased
  double se_mean = 0.0;        // sqrt(variance / n)
  double se_variance = 0.0;    // from the empirical fourth central moment
};

// Two-pass moments with standard errors for both the mean and the variance.
MomentSummary summarize(std::span<const double> samples);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double se_slope = 0.0;  // OLS slope standard error from residual variance
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

// Least squares for y ~ c1*x1 + c2*x2 (no intercept); returns {c1, c2}.
struct TwoTermFit {
  double c1 = 0.0;
  double c2 = 0.0;
};
TwoTermFit least_squares_two_term(std::span<const double> x1,
                                  std::span<const double> x2,
                                  std::span<const double> y);

// Upper tail P(X >= stat) for a chi-square distribution with df degrees of
// freedom, via the regularized incomplete gamma function.
double chi_square_pvalue(double stat, double df);

}  // namespace rbm

#endif  // RBM_STATS_HPP
