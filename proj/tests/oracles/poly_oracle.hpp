#pragma once

// Brute-force factorization over F_p by trial division with every monic
// polynomial of increasing degree. Independent of the library's FpPoly.

#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

using Poly = std::vector<std::int64_t>; // lowest degree first, trimmed

inline void trim(Poly &f) {
  while (!f.empty() && f.back() == 0)
    f.pop_back();
}

inline Poly reduce(const std::vector<std::int64_t> &c, std::int64_t p) {
  Poly f(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    f[i] = ((c[i] % p) + p) % p;
  trim(f);
  return f;
}

// Divides f by monic g; returns true and the quotient when exact.
inline bool divides(const Poly &f, const Poly &g, std::int64_t p, Poly &quot) {
  Poly r = f;
  const int df = static_cast<int>(f.size()) - 1, dg = static_cast<int>(g.size()) - 1;
  if (df < dg)
    return false;
  quot.assign(static_cast<std::size_t>(df - dg + 1), 0);
  for (int i = df; i >= dg; --i) {
    const std::int64_t c = r[static_cast<std::size_t>(i)];
    quot[static_cast<std::size_t>(i - dg)] = c;
    if (c == 0)
      continue;
    for (int j = 0; j <= dg; ++j) {
      auto &s = r[static_cast<std::size_t>(i - dg + j)];
      s = ((s - c * g[static_cast<std::size_t>(j)]) % p + p) % p;
    }
  }
  for (int i = 0; i < dg; ++i)
    if (r[static_cast<std::size_t>(i)] != 0)
      return false;
  return true;
}

// Monic polynomial of degree k whose lower coefficients encode `index` in base p.
inline Poly monic_from_index(std::uint64_t index, int k, std::int64_t p) {
  Poly g(static_cast<std::size_t>(k + 1));
  for (int i = 0; i < k; ++i) {
    g[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(index % static_cast<std::uint64_t>(p));
    index /= static_cast<std::uint64_t>(p);
  }
  g[static_cast<std::size_t>(k)] = 1;
  return g;
}

struct Factor {
  int degree;
  int multiplicity;
};

// Irreducible factors of a monic f with multiplicities. Any monic divisor of
// least degree is irreducible, so scanning degrees upward is complete.
inline std::vector<Factor> factor_brute(std::vector<std::int64_t> coeffs, std::int64_t p) {
  Poly f = reduce(coeffs, p);
  std::vector<Factor> out;
  int k = 1;
  while (static_cast<int>(f.size()) - 1 >= 2 * k) {
    std::uint64_t count = 1;
    for (int i = 0; i < k; ++i)
      count *= static_cast<std::uint64_t>(p);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      const Poly g = monic_from_index(idx, k, p);
      Poly q;
      int mult = 0;
      while (divides(f, g, p, q)) {
        f = q;
        ++mult;
      }
      if (mult) {
        out.push_back({k, mult});
        if (static_cast<int>(f.size()) - 1 < 2 * k)
          break;
      }
    }
    ++k;
  }
  if (f.size() > 1)
    out.push_back({static_cast<int>(f.size()) - 1, 1});
  return out;
}

// Degree -> count of distinct irreducible factors.
inline std::map<int, int> distinct_degrees(const std::vector<Factor> &fs) {
  std::map<int, int> m;
  for (auto f : fs)
    ++m[f.degree];
  return m;
}

} // namespace oracle
