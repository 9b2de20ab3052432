#pragma once

#include <cmath>
#include <span>

namespace dhdp {

// lnGamma for x > 0, safe to call from several chains at once
// (std::lgamma may touch the signgam global).
inline double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

// log[ base * (base+1) * ... * (base+count-1) ]
//    = lnGamma(base+count) - lnGamma(base).
// Short runs with moderate bases multiply up and take a single log; the
// product of up to 24 factors in [1e-8, 1e10] stays well inside double
// range. Longer runs go through lnGamma.
inline double log_rising_factorial(double base, long count) {
  if (count <= 0) return 0.0;
  if (count <= 24 && base > 1e-8 && base + static_cast<double>(count) < 1e10) {
    double product = base;
    for (long n = 1; n < count; ++n) {
      product *= base + static_cast<double>(n);
    }
    return std::log(product);
  }
  if (count <= 64) {
    double acc = 0.0;
    for (long n = 0; n < count; ++n) {
      acc += std::log(base + static_cast<double>(n));
    }
    return acc;
  }
  return log_gamma(base + static_cast<double>(count)) - log_gamma(base);
}

// log(sum_i exp(x_i)) with max shift. Entries of -inf contribute nothing;
// if every entry is -inf the result is -inf.
double log_sum_exp(std::span<const double> xs);

}  // namespace dhdp
