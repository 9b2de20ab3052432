#include "dhdp/mathutil.hpp"

#include <limits>

namespace dhdp {

double log_sum_exp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) {
    if (x > m) m = x;
  }
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : xs) {
    acc += std::exp(x - m);
  }
  return m + std::log(acc);
}

}  // namespace dhdp
