#pragma once

#include <cstdint>
#include <vector>

namespace oracle {

inline bool is_prime_trial(std::uint64_t n) {
  if (n < 2)
    return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0)
      return false;
  return true;
}

inline std::vector<std::uint64_t> primes_trial(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 2; n <= limit; ++n)
    if (is_prime_trial(n))
      out.push_back(n);
  return out;
}

// Euler's criterion on odd primes, 2 and -1 handled by their closed forms.
inline int legendre_brute(std::int64_t a, std::uint64_t p) {
  const auto sp = static_cast<std::int64_t>(p);
  const auto r = ((a % sp) + sp) % sp;
  if (r == 0)
    return 0;
  for (std::int64_t x = 1; x < sp; ++x)
    if ((x * x) % sp == r)
      return 1;
  return -1;
}

} // namespace oracle
