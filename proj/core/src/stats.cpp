#include "rbm/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rbm {

void CompensatedSum::add(double value) {
  const double t = sum_ + value;
  if (std::abs(sum_) >= std::abs(value)) {
    compensation_ += (sum_ - t) + value;
  } else {
    compensation_ += (value - t) + sum_;
  }
  sum_ = t;
}

double compensated_total(std::span<const double> values) {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

MomentSummary summarize(std::span<const double> samples) {
  MomentSummary out;
  out.count = samples.size();
  if (out.count == 0) return out;

  CompensatedSum sum;
  for (double v : samples) sum.add(v);
  out.mean = sum.value() / static_cast<double>(out.count);

  if (out.count < 2) return out;
  CompensatedSum m2;
  CompensatedSum m4;
  for (double v : samples) {
    const double d = v - out.mean;
    m2.add(d * d);
    m4.add(d * d * d * d);
  }
  const double n = static_cast<double>(out.count);
  out.variance = m2.value() / (n - 1.0);
  out.se_mean = std::sqrt(out.variance / n);
  // Var(s^2) = (m4 - s^4 (n-3)/(n-1)) / n with m4 the fourth central moment.
  const double central4 = m4.value() / n;
  const double var_of_var =
      (central4 - out.variance * out.variance * (n - 3.0) / (n - 1.0)) / n;
  out.se_variance = var_of_var > 0.0 ? std::sqrt(var_of_var) : 0.0;
  return out;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("least_squares: need >= 2 matched points");
  }
  const double n = static_cast<double>(x.size());
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / n;
  const double my = sy.value() / n;
  CompensatedSum sxx, sxy, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
    syy.add((y[i] - my) * (y[i] - my));
  }
  if (sxx.value() <= 0.0) {
    throw std::invalid_argument("least_squares: degenerate abscissa");
  }
  LinearFit fit;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = my - fit.slope * mx;
  CompensatedSum ss_res;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res.add(r * r);
  }
  fit.r_squared = syy.value() > 0.0 ? 1.0 - ss_res.value() / syy.value() : 1.0;
  if (x.size() > 2) {
    const double sigma2 = ss_res.value() / (n - 2.0);
    fit.se_slope = std::sqrt(sigma2 / sxx.value());
  }
  return fit;
}

TwoTermFit least_squares_two_term(std::span<const double> x1,
                                  std::span<const double> x2,
                                  std::span<const double> y) {
  if (x1.size() != y.size() || x2.size() != y.size() || y.size() < 2) {
    throw std::invalid_argument("least_squares_two_term: need >= 2 matched points");
  }
  CompensatedSum a11, a12, a22, b1, b2;
  for (std::size_t i = 0; i < y.size(); ++i) {
    a11.add(x1[i] * x1[i]);
    a12.add(x1[i] * x2[i]);
    a22.add(x2[i] * x2[i]);
    b1.add(x1[i] * y[i]);
    b2.add(x2[i] * y[i]);
  }
  const double det = a11.value() * a22.value() - a12.value() * a12.value();
  if (std::abs(det) < 1e-300) {
    throw std::invalid_argument("least_squares_two_term: singular normal equations");
  }
  TwoTermFit fit;
  fit.c1 = (a22.value() * b1.value() - a12.value() * b2.value()) / det;
  fit.c2 = (a11.value() * b2.value() - a12.value() * b1.value()) / det;
  return fit;
}

namespace {

// Regularized lower incomplete gamma P(a, x) by series expansion.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction.
double gamma_q_cfrac(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_square_pvalue(double stat, double df) {
  if (df <= 0.0) throw std::invalid_argument("chi_square_pvalue: df must be > 0");
  if (stat <= 0.0) return 1.0;
  const double a = 0.5 * df;
  const double x = 0.5 * stat;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cfrac(a, x);
}

}  // namespace rbm
