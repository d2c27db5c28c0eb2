#pragma once

// Rational primes, the Kronecker symbol, and polynomial arithmetic over F_p.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace mfun {

inline constexpr std::uint64_t kSieveCap = 100'000'000;

/// All rational primes up to `limit`, ascending. Immutable once built.
class PrimeTable {
public:
  explicit PrimeTable(std::uint64_t limit);

  std::uint64_t limit() const noexcept { return limit_; }
  std::span<const std::uint64_t> primes() const noexcept { return primes_; }
  std::size_t size() const noexcept { return primes_.size(); }
  auto begin() const noexcept { return primes_.begin(); }
  auto end() const noexcept { return primes_.end(); }

  /// Number of primes <= min(n, limit()).
  std::size_t count_up_to(std::uint64_t n) const;
  bool contains(std::uint64_t n) const;

private:
  std::uint64_t limit_;
  std::vector<std::uint64_t> primes_;
};

/// Sieve of Eratosthenes. Throws RangeError for limit < 2 and ResourceError
/// above kSieveCap.
PrimeTable sieve_primes(std::uint64_t limit);

/// Deterministic Miller-Rabin, valid for all 64-bit inputs.
bool is_prime(std::uint64_t n);

/// Kronecker symbol (D/n) for n >= 1.
int kronecker_symbol(std::int64_t D, std::uint64_t n);

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m);
std::uint64_t invmod(std::uint64_t a, std::uint64_t p);

/// Polynomial over F_p with coefficients stored lowest degree first. The
/// zero polynomial has no coefficients; otherwise the leading coefficient
/// is nonzero.
class FpPoly {
public:
  FpPoly(std::uint64_t p, std::vector<std::uint64_t> coeffs);
  /// Reduces signed integer coefficients mod p.
  static FpPoly from_integers(std::uint64_t p, std::span<const std::int64_t> coeffs);
  static FpPoly zero(std::uint64_t p) { return FpPoly(p, {}); }
  static FpPoly one(std::uint64_t p) { return FpPoly(p, {1}); }
  /// The monomial x.
  static FpPoly x(std::uint64_t p) { return FpPoly(p, {0, 1}); }

  std::uint64_t modulus() const noexcept { return p_; }
  const std::vector<std::uint64_t> &coeffs() const noexcept { return c_; }
  /// Degree, or -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }
  bool is_one() const noexcept { return c_.size() == 1 && c_[0] == 1; }
  bool is_monic() const noexcept { return !c_.empty() && c_.back() == 1; }
  std::uint64_t lead() const { return c_.back(); }
  std::uint64_t operator[](std::size_t i) const { return i < c_.size() ? c_[i] : 0; }
  std::uint64_t eval(std::uint64_t at) const;

  friend bool operator==(const FpPoly &, const FpPoly &) = default;

private:
  void trim();

  std::uint64_t p_;
  std::vector<std::uint64_t> c_;
};

FpPoly operator+(const FpPoly &a, const FpPoly &b);
FpPoly operator-(const FpPoly &a, const FpPoly &b);
FpPoly operator*(const FpPoly &a, const FpPoly &b);

struct FpDivision {
  FpPoly quotient;
  FpPoly remainder;
};
FpDivision divmod(const FpPoly &a, const FpPoly &b);
FpPoly operator%(const FpPoly &a, const FpPoly &b);
FpPoly operator/(const FpPoly &a, const FpPoly &b);

FpPoly make_monic(const FpPoly &a);
/// Monic gcd; gcd(0, 0) is the zero polynomial.
FpPoly gcd(FpPoly a, FpPoly b);
FpPoly derivative(const FpPoly &a);

/// base^e mod m by square-and-multiply.
FpPoly powmod(const FpPoly &base, std::uint64_t e, const FpPoly &m);
/// x^(p^k) mod m via k successive p-th powers.
FpPoly frobenius_power(const FpPoly &m, unsigned k);

/// Multiset of irreducible-factor degrees: degree -> count.
struct DegreePattern {
  std::map<int, int> counts;

  int total_degree() const;
  int factor_count() const;
  void add(int degree, int count = 1);
  friend bool operator==(const DegreePattern &, const DegreePattern &) = default;
};

/// Degree pattern of the distinct irreducible factors that occur with a
/// given multiplicity.
struct MultiplicityBlock {
  int multiplicity;
  DegreePattern pattern;
};

struct DegreeFactorization {
  /// Pattern of the squarefree part rad(f).
  DegreePattern pattern;
  bool squarefree;
  /// Squarefree decomposition f = prod g_e^e, one entry per e present.
  std::vector<MultiplicityBlock> blocks;
};

/// Distinct-degree factorization pattern of a monic polynomial of degree
/// >= 1. Throws ContractViolation for non-monic or constant input.
DegreeFactorization distinct_degree_pattern(const FpPoly &f);

} // namespace mfun
