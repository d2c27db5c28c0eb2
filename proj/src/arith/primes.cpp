#include "mfun/arith.hpp"
#include "mfun/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mfun {

PrimeTable::PrimeTable(std::uint64_t limit) : limit_(limit) {
  if (limit < 2)
    throw RangeError("sieve_primes: limit must be >= 2, got " + std::to_string(limit));
  if (limit > kSieveCap)
    throw ResourceError("sieve_primes: limit " + std::to_string(limit) +
                        " exceeds sieve cap " + std::to_string(kSieveCap));

  // Odd-only sieve: index i stands for 2i+1.
  const std::uint64_t half = (limit + 1) / 2;
  std::vector<bool> composite(half, false);
  for (std::uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= limit; ++i) {
    if (composite[i])
      continue;
    const std::uint64_t q = 2 * i + 1;
    for (std::uint64_t j = q * q / 2; j < half; j += q)
      composite[j] = true;
  }
  primes_.reserve(limit > 100 ? static_cast<std::size_t>(1.3 * limit / std::log(limit)) : 32);
  primes_.push_back(2);
  for (std::uint64_t i = 1; i < half; ++i)
    if (!composite[i])
      primes_.push_back(2 * i + 1);
}

std::size_t PrimeTable::count_up_to(std::uint64_t n) const {
  return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), n) -
                                  primes_.begin());
}

bool PrimeTable::contains(std::uint64_t n) const {
  return std::binary_search(primes_.begin(), primes_.end(), n);
}

PrimeTable sieve_primes(std::uint64_t limit) { return PrimeTable(limit); }

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1)
      r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

std::uint64_t invmod(std::uint64_t a, std::uint64_t p) {
  // p prime
  return powmod(a, p - 2, p);
}

bool is_prime(std::uint64_t n) {
  if (n < 2)
    return false;
  for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % q == 0)
      return n == q;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1)
      continue;
    bool witness = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness)
      return false;
  }
  return true;
}

} // namespace mfun
