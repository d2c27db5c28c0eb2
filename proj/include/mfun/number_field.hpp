#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace mfun {

/// Factorization shape of a rational prime p in a number field: one
/// (e_j, f_j) pair per prime ideal above p. `exact` is false only when the
/// pattern came from the squarefree-decomposition fallback at a prime
/// dividing the polynomial discriminant.
struct SplittingType {
  std::vector<std::pair<int, int>> pairs;
  bool exact = true;

  /// Sum of e_j * f_j; equals the field degree.
  int degree() const;
  bool completely_split() const;
  /// Canonical text form, e.g. "[(1,1),(1,1)]".
  std::string to_string() const;

  friend bool operator==(const SplittingType &, const SplittingType &) = default;
};

enum class FieldKind { rational, quadratic, polynomial };

enum class IrreducibilityHint {
  certified,       ///< irreducible modulo some good prime, hence over Q
  not_certified,   ///< no certificate among the primes tried
  reducible,       ///< has a rational root
};

/// A number field K of degree d. Immutable; copies share the splitting
/// cache, which is internally synchronized.
class NumberField {
public:
  static NumberField rational();
  /// Q(sqrt(D)) for a fundamental discriminant D. Throws RangeError otherwise.
  static NumberField quadratic(std::int64_t D);
  /// Field generated by a root of a monic integer polynomial, coefficients
  /// lowest degree first. Irreducibility is not verified.
  static NumberField polynomial(std::vector<std::int64_t> coeffs,
                                std::map<std::uint64_t, SplittingType> overrides = {});

  FieldKind kind() const noexcept;
  int degree() const noexcept;
  /// Quadratic discriminant D (quadratic kind only).
  std::int64_t quadratic_discriminant() const;
  const std::vector<std::int64_t> &coefficients() const noexcept;
  const std::map<std::uint64_t, SplittingType> &overrides() const noexcept;

  /// Splitting type of the prime p. Throws ContractViolation if p is not prime.
  SplittingType splitting_type(std::uint64_t p) const;

  IrreducibilityHint irreducibility_hint() const;
  /// Short label such as "Q", "Q(sqrt(-4))" or "Q[x]/(x^3-2)".
  std::string label() const;

private:
  struct Impl;
  explicit NumberField(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

bool is_fundamental_discriminant(std::int64_t D);

/// Fraction of primes <= limit that split completely in K. Throws
/// RangeError for limit < 1000.
double split_fraction(const NumberField &field, std::uint64_t limit);

/// Pretty-print an integer polynomial, highest degree first.
std::string polynomial_string(const std::vector<std::int64_t> &coeffs);

} // namespace mfun
