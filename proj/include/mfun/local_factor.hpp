#pragma once

#include "mfun/lambda_series.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace mfun {

struct LocalEvalConfig {
  double sigma = 1.0;
  /// Truncation tolerance for the sum over m.
  double m_tail_tol = 1e-12;
  /// Stop doubling once successive quadratures differ by less than this.
  double quad_tol = 1e-13;
  /// Largest node count tried; a power of two >= 64.
  std::size_t max_nodes = std::size_t{1} << 16;

  /// Throws RangeError for sigma <= 1/2, non-positive tolerances or a bad
  /// max_nodes.
  void validate() const;
};

inline constexpr std::size_t kInitialNodes = 64;

/// c_m = Lambda_*(p^m) / p^(m sigma) for m = 1..M_max, split into real and
/// imaginary parts.
struct TruncatedApSeries {
  std::uint64_t p = 0;
  double sigma = 1.0;
  int M_max = 0;
  std::vector<double> real_coeffs;
  std::vector<double> imag_coeffs;
  /// Geometric bound d log p p^(-sigma (M_max+1)) / (1 - p^(-sigma)) on the
  /// dropped terms.
  double tail_bound = 0.0;

  std::complex<double> coeff(int m) const {
    return {real_coeffs[static_cast<std::size_t>(m - 1)], imag_coeffs[static_cast<std::size_t>(m - 1)]};
  }
  /// Sum of |c_m|^2.
  double square_sum() const;
};

TruncatedApSeries build_ap_series(const LambdaSeries &series, std::uint64_t p, const LocalEvalConfig &cfg);

struct ApPair {
  double a1;
  double a2;
};

/// a1(t) + i a2(t) = -sum_m c_m e^(2 pi i m t).
ApPair eval_ap(const TruncatedApSeries &series, double t);

struct LocalFactorResult {
  std::complex<double> value;
  std::size_t nodes = 0;
  bool converged = true;
  /// |S_N - S_(N/2)| at the last doubling.
  double last_change = 0.0;
};

/// m_p(u, v) = int_0^1 exp(i (u a1(t) + v a2(t))) dt by the uniform rule,
/// doubling N from 64 until the change drops below quad_tol or N reaches
/// max_nodes. `converged` is false in the latter case.
LocalFactorResult local_factor(const TruncatedApSeries &series, double u, double v,
                               const LocalEvalConfig &cfg);

/// The uniform N-point rule with nodes t_j = j / N.
std::complex<double> local_factor_fixed(const TruncatedApSeries &series, double u, double v,
                                        std::size_t nodes);

/// mu = ((u^2 + v^2) / 4) sum_m |c_m|^2.
double second_moment_proxy(const TruncatedApSeries &series, double u, double v);

/// Principal log of local_factor. Throws RegimeError when mu >= 1/4.
std::complex<double> log_local_factor(const TruncatedApSeries &series, double u, double v,
                                      const LocalEvalConfig &cfg);

/// Second-order approximation -mu of the log; same regime requirement.
double log_local_factor_fast(const TruncatedApSeries &series, double u, double v);

struct FactorGridResult {
  /// values(i, k) = m_p(u[i], v[k]).
  Eigen::MatrixXcd values;
  std::size_t nodes = 0;
  bool converged = true;
  double last_change = 0.0;
};

/// Local factor on the tensor grid u x v. The rule is a rank-N sum of
/// separable terms, so each doubling costs one complex matrix product.
FactorGridResult local_factor_grid(const TruncatedApSeries &series, std::span<const double> u,
                                   std::span<const double> v, const LocalEvalConfig &cfg);

} // namespace mfun
