#pragma once

#include "mfun/number_field.hpp"

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <variant>

namespace mfun {

/// Normalized Hecke eigenvalues lambda_f(p) of a cusp form, keyed by prime.
class EigenvalueTable {
public:
  EigenvalueTable(std::string name, std::map<std::uint64_t, double> values);

  const std::string &name() const noexcept { return name_; }
  /// Largest prime covered.
  std::uint64_t limit() const noexcept;
  bool contains(std::uint64_t p) const { return values_.contains(p); }
  /// Throws MissingDataError when p is not in the table.
  double at(std::uint64_t p) const;
  const std::map<std::uint64_t, double> &values() const noexcept { return values_; }

private:
  std::string name_;
  std::map<std::uint64_t, double> values_;
};

inline constexpr std::uint64_t kDeltaLimitCap = 10'000;

/// Ramanujan tau(n) for 1 <= n <= limit from the q-expansion
/// q * prod (1 - q^n)^24, computed exactly. Index 0 is unused.
std::vector<__int128> ramanujan_tau(std::uint64_t limit);

/// lambda_Delta(p) = tau(p) / p^(11/2) for primes p <= limit. Throws
/// ResourceError when limit exceeds kDeltaLimitCap.
EigenvalueTable cusp_form_eigenvalues_delta(std::uint64_t limit);

/// Reads "p,lambda" rows (an optional header line is skipped).
EigenvalueTable load_eigenvalues_csv(const std::filesystem::path &path);

/// Satake parameters: the two roots of X^2 - lambda X + 1.
struct SatakePair {
  std::complex<double> alpha;
  std::complex<double> beta;

  static SatakePair from_eigenvalue(double lambda);
  /// alpha^m + beta^m, which is real for real lambda.
  double power_sum(int m) const;
};

/// Coefficients Lambda_*(p^m) of -L'/L for a Dedekind zeta function, a
/// quadratic Dirichlet L-function, or a cusp-form L-function.
class LambdaSeries {
public:
  struct Dedekind {
    NumberField field;
  };
  struct DirichletQuadratic {
    std::int64_t D;
  };
  struct CuspForm {
    std::shared_ptr<const EigenvalueTable> eigenvalues;
  };
  using Flavor = std::variant<Dedekind, DirichletQuadratic, CuspForm>;

  static LambdaSeries dedekind(NumberField field);
  /// Primitive quadratic character chi_D = (D/.) for a fundamental D.
  static LambdaSeries dirichlet_quadratic(std::int64_t D);
  static LambdaSeries cusp_form(std::shared_ptr<const EigenvalueTable> eigenvalues);

  /// Lambda_*(p^m) for prime p and m >= 1.
  std::complex<double> value(std::uint64_t p, int m) const;

  /// Constant d with |Lambda_*(p^m)| <= d log p: the field degree, 1 for a
  /// Dirichlet character, 2 for a cusp form.
  int degree_bound() const noexcept;
  bool real_valued() const noexcept { return true; }
  /// Machine-readable flavor tag, e.g. "dedekind:Q(sqrt(-4))".
  std::string flavor() const;
  const Flavor &data() const noexcept { return flavor_; }

private:
  explicit LambdaSeries(Flavor f) : flavor_(std::move(f)) {}
  Flavor flavor_;
};

/// Checks Lambda_{Q(sqrt D)}(p^m) == Lambda(p^m) (1 + chi_D(p)^m) with the
/// two sides computed through independent paths. Requires p prime, p !| 2D.
bool quadratic_consistency_check(std::int64_t D, std::uint64_t p, int m);

/// Series description file (JSON). Accepted forms:
///   {"kind":"rational"}
///   {"kind":"quadratic","D":-4}
///   {"kind":"polynomial","coeffs":[-2,0,0,1],"overrides":{"2":[[3,1]]}}
///   {"kind":"dirichlet","D":-4}
///   {"kind":"cusp_form","form":"delta","limit":10000}
///   {"kind":"cusp_form","eigenvalues":"table.csv"}
/// Relative eigenvalue paths resolve against the spec file's directory.
LambdaSeries load_series_spec(const std::filesystem::path &path);
LambdaSeries parse_series_spec(const std::string &text,
                               const std::filesystem::path &base_dir = {});
/// Number-field kinds only; throws ParseError for the L-function kinds.
NumberField load_field_spec(const std::filesystem::path &path);

} // namespace mfun
