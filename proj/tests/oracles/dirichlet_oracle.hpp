#pragma once

// Direct sums over n <= N with the von Mangoldt function found by trial
// division, for the rational field.

#include <cmath>
#include <complex>
#include <cstdint>

namespace oracle {

inline double von_mangoldt(std::uint64_t n) {
  if (n < 2)
    return 0.0;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p)
      continue;
    while (n % p == 0)
      n /= p;
    return n == 1 ? std::log(static_cast<double>(p)) : 0.0;
  }
  return std::log(static_cast<double>(n));
}

// -sum_(n <= N) Lambda(n) n^(-sigma - i t).
inline std::complex<double> neg_log_derivative_partial(double sigma, double t, std::uint64_t N) {
  std::complex<double> s = 0.0;
  for (std::uint64_t n = 2; n <= N; ++n) {
    const double L = von_mangoldt(n);
    if (L == 0.0)
      continue;
    const double ln = std::log(static_cast<double>(n));
    s += L * std::exp(-sigma * ln) * std::complex<double>(std::cos(t * ln), -std::sin(t * ln));
  }
  return -s;
}

} // namespace oracle
