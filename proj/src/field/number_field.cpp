#include "mfun/number_field.hpp"

#include "mfun/arith.hpp"
#include "mfun/error.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace mfun {

int SplittingType::degree() const {
  int s = 0;
  for (auto [e, f] : pairs)
    s += e * f;
  return s;
}

bool SplittingType::completely_split() const {
  return std::all_of(pairs.begin(), pairs.end(),
                     [](const auto &ef) { return ef.first == 1 && ef.second == 1; });
}

std::string SplittingType::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i)
      s += ",";
    s += "(" + std::to_string(pairs[i].first) + "," + std::to_string(pairs[i].second) + ")";
  }
  return s + "]";
}

namespace {

bool squarefree_int(std::uint64_t n) {
  for (std::uint64_t q = 2; q * q <= n; ++q) {
    if (n % (q * q) == 0)
      return false;
  }
  return true;
}

// Canonical ordering so equal splitting types compare equal.
void canonicalize(SplittingType &st) {
  std::sort(st.pairs.begin(), st.pairs.end());
}

SplittingType from_factorization(const DegreeFactorization &fac) {
  SplittingType st;
  st.exact = fac.squarefree;
  for (const auto &block : fac.blocks)
    for (auto [deg, cnt] : block.pattern.counts)
      for (int k = 0; k < cnt; ++k)
        st.pairs.emplace_back(block.multiplicity, deg);
  canonicalize(st);
  return st;
}

} // namespace

bool is_fundamental_discriminant(std::int64_t D) {
  if (D == 0 || D == 1)
    return false;
  const std::uint64_t a = D < 0 ? static_cast<std::uint64_t>(-D) : static_cast<std::uint64_t>(D);
  const std::int64_t r4 = ((D % 4) + 4) % 4;
  if (r4 == 1)
    return squarefree_int(a);
  if (r4 == 0) {
    const std::int64_t m = D / 4;
    const std::int64_t rm = ((m % 4) + 4) % 4;
    const std::uint64_t am = a / 4;
    return (rm == 2 || rm == 3) && squarefree_int(am);
  }
  return false;
}

std::string polynomial_string(const std::vector<std::int64_t> &coeffs) {
  std::ostringstream os;
  bool first = true;
  for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) {
    std::int64_t c = coeffs[static_cast<std::size_t>(i)];
    if (c == 0)
      continue;
    if (!first)
      os << (c < 0 ? "-" : "+");
    else if (c < 0)
      os << "-";
    const std::int64_t a = c < 0 ? -c : c;
    if (a != 1 || i == 0)
      os << a;
    if (i >= 1)
      os << "x";
    if (i >= 2)
      os << "^" << i;
    first = false;
  }
  if (first)
    os << "0";
  return os.str();
}

struct NumberField::Impl {
  FieldKind kind;
  int degree;
  std::int64_t D = 0;
  std::vector<std::int64_t> coeffs;
  std::map<std::uint64_t, SplittingType> overrides;

  mutable std::mutex mutex;
  mutable std::unordered_map<std::uint64_t, SplittingType> cache;

  SplittingType compute(std::uint64_t p) const {
    switch (kind) {
    case FieldKind::rational:
      return {{{1, 1}}, true};
    case FieldKind::quadratic: {
      const int chi = kronecker_symbol(D, p);
      if (chi == 1)
        return {{{1, 1}, {1, 1}}, true};
      if (chi == -1)
        return {{{1, 2}}, true};
      return {{{2, 1}}, true};
    }
    case FieldKind::polynomial: {
      if (auto it = overrides.find(p); it != overrides.end())
        return it->second;
      const FpPoly f = FpPoly::from_integers(p, coeffs);
      return from_factorization(distinct_degree_pattern(f));
    }
    }
    return {};
  }
};

NumberField::NumberField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

NumberField NumberField::rational() {
  auto impl = std::make_shared<Impl>();
  impl->kind = FieldKind::rational;
  impl->degree = 1;
  impl->coeffs = {0, 1};
  return NumberField(std::move(impl));
}

NumberField NumberField::quadratic(std::int64_t D) {
  if (!is_fundamental_discriminant(D))
    throw RangeError("quadratic field: " + std::to_string(D) + " is not a fundamental discriminant");
  auto impl = std::make_shared<Impl>();
  impl->kind = FieldKind::quadratic;
  impl->degree = 2;
  impl->D = D;
  // Minimal polynomial of the ring-of-integers generator.
  if (((D % 4) + 4) % 4 == 1)
    impl->coeffs = {(1 - D) / 4, -1, 1};
  else
    impl->coeffs = {-D / 4, 0, 1};
  return NumberField(std::move(impl));
}

NumberField NumberField::polynomial(std::vector<std::int64_t> coeffs,
                                    std::map<std::uint64_t, SplittingType> overrides) {
  while (!coeffs.empty() && coeffs.back() == 0)
    coeffs.pop_back();
  if (coeffs.size() < 2)
    throw ContractViolation("polynomial field: degree must be >= 1");
  if (coeffs.back() != 1)
    throw ContractViolation("polynomial field: polynomial must be monic");
  const int d = static_cast<int>(coeffs.size()) - 1;
  for (auto &[p, st] : overrides) {
    if (!is_prime(p))
      throw ContractViolation("override key " + std::to_string(p) + " is not prime");
    if (st.degree() != d)
      throw ContractViolation("override for p=" + std::to_string(p) +
                              " violates sum e_j f_j = " + std::to_string(d));
    st.exact = true;
    canonicalize(st);
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = FieldKind::polynomial;
  impl->degree = d;
  impl->coeffs = std::move(coeffs);
  impl->overrides = std::move(overrides);
  return NumberField(std::move(impl));
}

FieldKind NumberField::kind() const noexcept { return impl_->kind; }
int NumberField::degree() const noexcept { return impl_->degree; }
const std::vector<std::int64_t> &NumberField::coefficients() const noexcept { return impl_->coeffs; }
const std::map<std::uint64_t, SplittingType> &NumberField::overrides() const noexcept {
  return impl_->overrides;
}

std::int64_t NumberField::quadratic_discriminant() const {
  if (impl_->kind != FieldKind::quadratic)
    throw ContractViolation("quadratic_discriminant: field is not of quadratic kind");
  return impl_->D;
}

SplittingType NumberField::splitting_type(std::uint64_t p) const {
  if (!is_prime(p))
    throw ContractViolation("splitting_type: " + std::to_string(p) + " is not prime");
  {
    std::lock_guard lock(impl_->mutex);
    if (auto it = impl_->cache.find(p); it != impl_->cache.end())
      return it->second;
  }
  SplittingType st = impl_->compute(p);
  std::lock_guard lock(impl_->mutex);
  impl_->cache.emplace(p, st);
  return st;
}

IrreducibilityHint NumberField::irreducibility_hint() const {
  if (impl_->kind != FieldKind::polynomial)
    return IrreducibilityHint::certified;
  const auto &c = impl_->coeffs;
  // Rational roots of a monic integer polynomial are integer divisors of c0.
  const std::int64_t c0 = c[0];
  if (c0 == 0)
    return c.size() == 2 ? IrreducibilityHint::certified : IrreducibilityHint::reducible;
  const std::uint64_t a0 = c0 < 0 ? static_cast<std::uint64_t>(-c0) : static_cast<std::uint64_t>(c0);
  auto eval_at = [&](long double x) {
    long double r = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it)
      r = r * x + static_cast<long double>(*it);
    return r;
  };
  for (std::uint64_t q = 1; q * q <= a0; ++q) {
    if (a0 % q)
      continue;
    for (std::uint64_t r : {q, a0 / q})
      for (long double s : {1.0L, -1.0L})
        if (eval_at(s * static_cast<long double>(r)) == 0)
          return IrreducibilityHint::reducible;
  }
  if (c.size() == 2)
    return IrreducibilityHint::certified;
  int tried = 0;
  for (std::uint64_t p = 2; tried < 50 && p < 2000; ++p) {
    if (!is_prime(p))
      continue;
    const auto fac = distinct_degree_pattern(FpPoly::from_integers(p, c));
    if (!fac.squarefree)
      continue;
    ++tried;
    if (fac.pattern.factor_count() == 1)
      return IrreducibilityHint::certified;
  }
  return IrreducibilityHint::not_certified;
}

std::string NumberField::label() const {
  switch (impl_->kind) {
  case FieldKind::rational:
    return "Q";
  case FieldKind::quadratic:
    return "Q(sqrt(" + std::to_string(impl_->D) + "))";
  case FieldKind::polynomial:
    return "Q[x]/(" + polynomial_string(impl_->coeffs) + ")";
  }
  return "?";
}

double split_fraction(const NumberField &field, std::uint64_t limit) {
  if (limit < 1000)
    throw RangeError("split_fraction: limit must be >= 1000");
  const PrimeTable primes = sieve_primes(limit);
  std::size_t split = 0;
  for (auto p : primes)
    if (field.splitting_type(p).completely_split())
      ++split;
  return static_cast<double>(split) / static_cast<double>(primes.size());
}

} // namespace mfun
