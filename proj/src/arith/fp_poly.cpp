#include "mfun/arith.hpp"
#include "mfun/error.hpp"

#include <algorithm>
#include <string>

namespace mfun {

FpPoly::FpPoly(std::uint64_t p, std::vector<std::uint64_t> coeffs) : p_(p), c_(std::move(coeffs)) {
  if (p < 2)
    throw ContractViolation("FpPoly: modulus must be >= 2");
  for (auto &c : c_)
    c %= p_;
  trim();
}

FpPoly FpPoly::from_integers(std::uint64_t p, std::span<const std::int64_t> coeffs) {
  std::vector<std::uint64_t> c(coeffs.size());
  const auto sp = static_cast<std::int64_t>(p);
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    c[i] = static_cast<std::uint64_t>(((coeffs[i] % sp) + sp) % sp);
  return FpPoly(p, std::move(c));
}

void FpPoly::trim() {
  while (!c_.empty() && c_.back() == 0)
    c_.pop_back();
}

std::uint64_t FpPoly::eval(std::uint64_t at) const {
  std::uint64_t r = 0;
  at %= p_;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it)
    r = (mulmod(r, at, p_) + *it) % p_;
  return r;
}

namespace {

void check_same_field(const FpPoly &a, const FpPoly &b) {
  if (a.modulus() != b.modulus())
    throw ContractViolation("FpPoly: operands over different fields");
}

} // namespace

FpPoly operator+(const FpPoly &a, const FpPoly &b) {
  check_same_field(a, b);
  const auto p = a.modulus();
  std::vector<std::uint64_t> c(std::max(a.coeffs().size(), b.coeffs().size()));
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] = (a[i] + b[i]) % p;
  return FpPoly(p, std::move(c));
}

FpPoly operator-(const FpPoly &a, const FpPoly &b) {
  check_same_field(a, b);
  const auto p = a.modulus();
  std::vector<std::uint64_t> c(std::max(a.coeffs().size(), b.coeffs().size()));
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] = (a[i] + p - b[i]) % p;
  return FpPoly(p, std::move(c));
}

FpPoly operator*(const FpPoly &a, const FpPoly &b) {
  check_same_field(a, b);
  const auto p = a.modulus();
  if (a.is_zero() || b.is_zero())
    return FpPoly::zero(p);
  const auto &ac = a.coeffs();
  const auto &bc = b.coeffs();
  std::vector<std::uint64_t> c(ac.size() + bc.size() - 1, 0);
  for (std::size_t i = 0; i < ac.size(); ++i) {
    if (ac[i] == 0)
      continue;
    for (std::size_t j = 0; j < bc.size(); ++j)
      c[i + j] = (c[i + j] + mulmod(ac[i], bc[j], p)) % p;
  }
  return FpPoly(p, std::move(c));
}

FpDivision divmod(const FpPoly &a, const FpPoly &b) {
  check_same_field(a, b);
  if (b.is_zero())
    throw ContractViolation("FpPoly: division by the zero polynomial");
  const auto p = a.modulus();
  if (a.degree() < b.degree())
    return {FpPoly::zero(p), a};

  std::vector<std::uint64_t> r = a.coeffs();
  const auto &bc = b.coeffs();
  const int db = b.degree();
  const std::uint64_t inv_lead = invmod(b.lead(), p);
  std::vector<std::uint64_t> q(static_cast<std::size_t>(a.degree() - db + 1), 0);
  for (int i = a.degree(); i >= db; --i) {
    const std::uint64_t coef = mulmod(r[static_cast<std::size_t>(i)], inv_lead, p);
    q[static_cast<std::size_t>(i - db)] = coef;
    if (coef == 0)
      continue;
    for (int j = 0; j <= db; ++j) {
      auto &slot = r[static_cast<std::size_t>(i - db + j)];
      slot = (slot + p - mulmod(coef, bc[static_cast<std::size_t>(j)], p)) % p;
    }
  }
  r.resize(static_cast<std::size_t>(db));
  return {FpPoly(p, std::move(q)), FpPoly(p, std::move(r))};
}

FpPoly operator%(const FpPoly &a, const FpPoly &b) { return divmod(a, b).remainder; }
FpPoly operator/(const FpPoly &a, const FpPoly &b) { return divmod(a, b).quotient; }

FpPoly make_monic(const FpPoly &a) {
  if (a.is_zero() || a.is_monic())
    return a;
  const auto p = a.modulus();
  const auto inv = invmod(a.lead(), p);
  std::vector<std::uint64_t> c = a.coeffs();
  for (auto &x : c)
    x = mulmod(x, inv, p);
  return FpPoly(p, std::move(c));
}

FpPoly gcd(FpPoly a, FpPoly b) {
  check_same_field(a, b);
  while (!b.is_zero()) {
    FpPoly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return make_monic(a);
}

FpPoly derivative(const FpPoly &a) {
  const auto p = a.modulus();
  if (a.degree() < 1)
    return FpPoly::zero(p);
  std::vector<std::uint64_t> c(a.coeffs().size() - 1);
  for (std::size_t i = 1; i < a.coeffs().size(); ++i)
    c[i - 1] = mulmod(a.coeffs()[i], i % p, p);
  return FpPoly(p, std::move(c));
}

FpPoly powmod(const FpPoly &base, std::uint64_t e, const FpPoly &m) {
  check_same_field(base, m);
  FpPoly result = FpPoly::one(base.modulus()) % m;
  FpPoly b = base % m;
  while (e) {
    if (e & 1)
      result = (result * b) % m;
    e >>= 1;
    if (e)
      b = (b * b) % m;
  }
  return result;
}

FpPoly frobenius_power(const FpPoly &m, unsigned k) {
  const auto p = m.modulus();
  FpPoly h = FpPoly::x(p) % m;
  for (unsigned i = 0; i < k; ++i)
    h = powmod(h, p, m);
  return h;
}

int DegreePattern::total_degree() const {
  int s = 0;
  for (auto [deg, cnt] : counts)
    s += deg * cnt;
  return s;
}

int DegreePattern::factor_count() const {
  int s = 0;
  for (auto [deg, cnt] : counts)
    s += cnt;
  return s;
}

void DegreePattern::add(int degree, int count) {
  if (count > 0)
    counts[degree] += count;
}

namespace {

// Distinct-degree factorization of a monic squarefree polynomial.
DegreePattern ddf_squarefree(FpPoly f) {
  const auto p = f.modulus();
  DegreePattern pattern;
  const FpPoly x = FpPoly::x(p);
  FpPoly h = x % f;
  int i = 1;
  while (f.degree() >= 2 * i) {
    h = powmod(h, p, f);
    FpPoly g = gcd(f, h - x);
    if (!g.is_one()) {
      pattern.add(i, g.degree() / i);
      f = f / g;
      h = h % f;
    }
    ++i;
  }
  if (f.degree() > 0)
    pattern.add(f.degree());
  return pattern;
}

// p-th root of a polynomial whose derivative vanishes: every exponent is a
// multiple of p, and a^p = a on F_p.
FpPoly pth_root(const FpPoly &f) {
  const auto p = f.modulus();
  std::vector<std::uint64_t> c;
  for (std::size_t i = 0; i < f.coeffs().size(); i += p)
    c.push_back(f.coeffs()[i]);
  return FpPoly(p, std::move(c));
}

// Squarefree decomposition: accumulates (multiplicity, factor) pairs.
void squarefree_decompose(const FpPoly &f, int scale, std::map<int, FpPoly> &out) {
  const auto p = f.modulus();
  auto absorb = [&](int mult, const FpPoly &g) {
    auto it = out.find(mult);
    if (it == out.end())
      out.emplace(mult, g);
    else
      it->second = it->second * g;
  };

  FpPoly c = gcd(f, derivative(f));
  FpPoly w = f / c;
  int i = 1;
  while (!w.is_one()) {
    FpPoly y = gcd(w, c);
    FpPoly fac = w / y;
    if (!fac.is_one())
      absorb(i * scale, fac);
    w = y;
    c = c / y;
    ++i;
  }
  if (!c.is_one())
    squarefree_decompose(pth_root(c), scale * static_cast<int>(p), out);
}

} // namespace

DegreeFactorization distinct_degree_pattern(const FpPoly &f) {
  if (f.degree() < 1)
    throw ContractViolation("distinct_degree_pattern: polynomial must have degree >= 1");
  if (!f.is_monic())
    throw ContractViolation("distinct_degree_pattern: polynomial must be monic");

  std::map<int, FpPoly> parts;
  squarefree_decompose(f, 1, parts);

  DegreeFactorization result{{}, true, {}};
  for (const auto &[mult, g] : parts) {
    DegreePattern pat = ddf_squarefree(make_monic(g));
    for (auto [deg, cnt] : pat.counts)
      result.pattern.add(deg, cnt);
    if (mult > 1)
      result.squarefree = false;
    result.blocks.push_back({mult, std::move(pat)});
  }
  return result;
}

} // namespace mfun
