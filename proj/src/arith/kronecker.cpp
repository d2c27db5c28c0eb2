#include "mfun/arith.hpp"

#include <cstdlib>

namespace mfun {

namespace {

// Jacobi symbol (a/n) for odd n >= 1 and 0 <= a.
int jacobi(std::uint64_t a, std::uint64_t n) {
  int result = 1;
  a %= n;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      const std::uint64_t r = n & 7;
      if (r == 3 || r == 5)
        result = -result;
    }
    std::swap(a, n);
    if ((a & 3) == 3 && (n & 3) == 3)
      result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

} // namespace

int kronecker_symbol(std::int64_t D, std::uint64_t n) {
  if (n == 0)
    return (D == 1 || D == -1) ? 1 : 0;
  int result = 1;

  // Factor out powers of two from n: (D/2) is 0 for even D, else depends on D mod 8.
  int twos = 0;
  while ((n & 1) == 0) {
    n >>= 1;
    ++twos;
  }
  if (twos > 0) {
    if ((D & 1) == 0)
      return 0;
    const std::int64_t r = ((D % 8) + 8) % 8;
    if ((twos & 1) && (r == 3 || r == 5))
      result = -result;
  }
  if (n == 1)
    return result;

  // n odd > 1: Jacobi symbol, with (-1/n) handled separately for negative D.
  std::uint64_t a;
  if (D < 0) {
    a = static_cast<std::uint64_t>(-(D + 1)) + 1; // |D| without overflow
    if ((n & 3) == 3)
      result = -result;
  } else {
    a = static_cast<std::uint64_t>(D);
  }
  return result * jacobi(a % n, n);
}

} // namespace mfun
