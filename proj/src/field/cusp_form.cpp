#include "mfun/lambda_series.hpp"

#include "mfun/arith.hpp"
#include "mfun/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mfun {

EigenvalueTable::EigenvalueTable(std::string name, std::map<std::uint64_t, double> values)
    : name_(std::move(name)), values_(std::move(values)) {}

std::uint64_t EigenvalueTable::limit() const noexcept {
  return values_.empty() ? 0 : values_.rbegin()->first;
}

double EigenvalueTable::at(std::uint64_t p) const {
  auto it = values_.find(p);
  if (it == values_.end())
    throw MissingDataError("eigenvalue table " + name_ + ": no entry for p=" + std::to_string(p));
  return it->second;
}

namespace {

using Series = std::vector<__int128>;

Series multiply(const Series &a, const Series &b, std::size_t len) {
  Series c(len, 0);
  for (std::size_t i = 0; i < len && i < a.size(); ++i) {
    if (a[i] == 0)
      continue;
    const std::size_t jmax = std::min(b.size(), len - i);
    for (std::size_t j = 0; j < jmax; ++j)
      c[i + j] += a[i] * b[j];
  }
  return c;
}

} // namespace

std::vector<__int128> ramanujan_tau(std::uint64_t limit) {
  if (limit > kDeltaLimitCap)
    throw ResourceError("ramanujan_tau: limit " + std::to_string(limit) + " exceeds cap " +
                        std::to_string(kDeltaLimitCap));
  const std::size_t len = static_cast<std::size_t>(limit); // need q^0 .. q^(limit-1) of E^24

  // E(q) = prod (1 - q^n) = sum_k (-1)^k q^(k(3k-1)/2), k over all integers.
  Series e(len, 0);
  if (len == 0)
    return std::vector<__int128>(1, 0);
  e[0] = 1;
  for (std::int64_t k = 1;; ++k) {
    bool any = false;
    for (std::int64_t kk : {k, -k}) {
      const std::int64_t exp = kk * (3 * kk - 1) / 2;
      if (exp < static_cast<std::int64_t>(len)) {
        e[static_cast<std::size_t>(exp)] += (k & 1) ? -1 : 1;
        any = true;
      }
    }
    if (!any)
      break;
  }

  const Series e2 = multiply(e, e, len);
  const Series e4 = multiply(e2, e2, len);
  const Series e8 = multiply(e4, e4, len);
  const Series e16 = multiply(e8, e8, len);
  const Series e24 = multiply(e16, e8, len);

  std::vector<__int128> tau(static_cast<std::size_t>(limit) + 1, 0);
  for (std::size_t n = 1; n <= limit; ++n)
    tau[n] = e24[n - 1];
  return tau;
}

EigenvalueTable cusp_form_eigenvalues_delta(std::uint64_t limit) {
  if (limit > kDeltaLimitCap)
    throw ResourceError("cusp_form_eigenvalues_delta: limit " + std::to_string(limit) +
                        " exceeds cap " + std::to_string(kDeltaLimitCap));
  std::map<std::uint64_t, double> values;
  if (limit >= 2) {
    const auto tau = ramanujan_tau(limit);
    for (std::uint64_t p = 2; p <= limit; ++p) {
      if (!is_prime(p))
        continue;
      const double scale = std::pow(static_cast<double>(p), 5.5);
      values.emplace(p, static_cast<double>(static_cast<long double>(tau[p]) / scale));
    }
  }
  return EigenvalueTable("delta", std::move(values));
}

EigenvalueTable load_eigenvalues_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open eigenvalue file " + path.string());
  std::map<std::uint64_t, double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream row(line);
    std::string ps, ls;
    if (!std::getline(row, ps, ',') || !std::getline(row, ls))
      throw ParseError("eigenvalue file " + path.string() + ": expected 'p,lambda'", lineno);
    try {
      std::size_t used = 0;
      const auto p = std::stoull(ps, &used);
      const double lambda = std::stod(ls);
      if (!is_prime(p))
        throw ParseError("eigenvalue file " + path.string() + ": " + ps + " is not prime", lineno);
      values[p] = lambda;
    } catch (const std::invalid_argument &) {
      if (lineno == 1)
        continue; // header
      throw ParseError("eigenvalue file " + path.string() + ": malformed number", lineno);
    } catch (const std::out_of_range &) {
      throw ParseError("eigenvalue file " + path.string() + ": number out of range", lineno);
    }
  }
  return EigenvalueTable(path.stem().string(), std::move(values));
}

} // namespace mfun
