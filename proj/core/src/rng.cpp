#include "rbm/rng.hpp"

#include <cmath>
#include <numbers>

namespace rbm {

double StreamRng::next_gaussian() {
  ++gaussians_;
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_unit();  // in (0,1], log is finite
  const double u2 = next_unit_open();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

void StreamRng::fill_gaussian(std::span<double> out) {
  for (double& v : out) v = next_gaussian();
}

}  // namespace rbm
