#include "mfun/lambda_series.hpp"

#include "mfun/arith.hpp"
#include "mfun/error.hpp"

#include <cmath>

namespace mfun {

SatakePair SatakePair::from_eigenvalue(double lambda) {
  const double disc = lambda * lambda - 4.0;
  if (disc <= 0.0) {
    const double im = std::sqrt(-disc) / 2.0;
    return {{lambda / 2.0, im}, {lambda / 2.0, -im}};
  }
  // Outside the Deligne range the roots are real; alpha * beta = 1 still holds.
  const double r = std::sqrt(disc);
  const double big = (lambda + std::copysign(r, lambda)) / 2.0;
  return {{big, 0.0}, {1.0 / big, 0.0}};
}

double SatakePair::power_sum(int m) const {
  return (std::pow(alpha, m) + std::pow(beta, m)).real();
}

LambdaSeries LambdaSeries::dedekind(NumberField field) { return LambdaSeries(Dedekind{std::move(field)}); }

LambdaSeries LambdaSeries::dirichlet_quadratic(std::int64_t D) {
  if (!is_fundamental_discriminant(D))
    throw RangeError("dirichlet_quadratic: " + std::to_string(D) + " is not a fundamental discriminant");
  return LambdaSeries(DirichletQuadratic{D});
}

LambdaSeries LambdaSeries::cusp_form(std::shared_ptr<const EigenvalueTable> eigenvalues) {
  if (!eigenvalues)
    throw ContractViolation("cusp_form: eigenvalue table is null");
  return LambdaSeries(CuspForm{std::move(eigenvalues)});
}

std::complex<double> LambdaSeries::value(std::uint64_t p, int m) const {
  if (m < 1)
    throw ContractViolation("lambda_value: m must be >= 1");
  const double logp = std::log(static_cast<double>(p));
  return std::visit(
      [&](const auto &fl) -> std::complex<double> {
        using T = std::decay_t<decltype(fl)>;
        if constexpr (std::is_same_v<T, Dedekind>) {
          int sum = 0;
          for (auto [e, f] : fl.field.splitting_type(p).pairs)
            if (m % f == 0)
              sum += f;
          return sum * logp;
        } else if constexpr (std::is_same_v<T, DirichletQuadratic>) {
          if (!is_prime(p))
            throw ContractViolation("lambda_value: " + std::to_string(p) + " is not prime");
          const int chi = kronecker_symbol(fl.D, p);
          const int chim = (chi == 0) ? 0 : ((chi == -1 && (m & 1)) ? -1 : 1);
          return chim * logp;
        } else {
          if (!is_prime(p))
            throw ContractViolation("lambda_value: " + std::to_string(p) + " is not prime");
          if (!fl.eigenvalues->contains(p))
            throw MissingDataError("cusp form " + fl.eigenvalues->name() +
                                   ": no eigenvalue for p=" + std::to_string(p));
          return SatakePair::from_eigenvalue(fl.eigenvalues->at(p)).power_sum(m) * logp;
        }
      },
      flavor_);
}

int LambdaSeries::degree_bound() const noexcept {
  return std::visit(
      [](const auto &fl) -> int {
        using T = std::decay_t<decltype(fl)>;
        if constexpr (std::is_same_v<T, Dedekind>)
          return fl.field.degree();
        else if constexpr (std::is_same_v<T, DirichletQuadratic>)
          return 1;
        else
          return 2;
      },
      flavor_);
}

std::string LambdaSeries::flavor() const {
  return std::visit(
      [](const auto &fl) -> std::string {
        using T = std::decay_t<decltype(fl)>;
        if constexpr (std::is_same_v<T, Dedekind>)
          return "dedekind:" + fl.field.label();
        else if constexpr (std::is_same_v<T, DirichletQuadratic>)
          return "dirichlet:chi_" + std::to_string(fl.D);
        else
          return "cusp_form:" + fl.eigenvalues->name();
      },
      flavor_);
}

bool quadratic_consistency_check(std::int64_t D, std::uint64_t p, int m) {
  if (!is_prime(p))
    throw ContractViolation("quadratic_consistency_check: p must be prime");
  const std::uint64_t absD = D < 0 ? static_cast<std::uint64_t>(-D) : static_cast<std::uint64_t>(D);
  if (p == 2 || absD % p == 0)
    throw ContractViolation("quadratic_consistency_check: p must not divide 2D");

  const auto field_side = LambdaSeries::dedekind(NumberField::quadratic(D)).value(p, m).real();
  const auto rational_side = LambdaSeries::dedekind(NumberField::rational()).value(p, m).real();
  const auto character_side = LambdaSeries::dirichlet_quadratic(D).value(p, m).real();
  const double expected = rational_side + character_side;
  return std::abs(field_side - expected) <= 1e-12 * std::log(static_cast<double>(p));
}

} // namespace mfun
