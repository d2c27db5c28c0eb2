#pragma once

#include "mfun/local_factor.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace mfun {

/// Uniform axis: node i sits at start + i * step, 0 <= i < n.
struct Axis {
  double start = 0.0;
  double step = 1.0;
  std::size_t n = 0;

  double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
  std::vector<double> nodes() const;
  /// The axis -W + i (2W/n), i < n, whose node n/2 is exactly 0.
  static Axis centered(double extent, std::size_t n);
  /// True when the axis has that centered layout (n even, node n/2 at 0).
  bool is_centered() const;
  friend bool operator==(const Axis &, const Axis &) = default;
};

struct ProductConfig {
  double sigma = 1.0;
  /// Largest prime included. 0 selects a cutoff from the tail formula.
  std::uint64_t prime_cutoff = 0;
  double tail_tol = 1e-4;
  LocalEvalConfig local;

  /// Copies sigma into `local` and validates both.
  void validate() const;
  LocalEvalConfig local_config() const;
};

/// C_tail (u^2 + v^2) (2 / (2 sigma - 1)) P^(1 - 2 sigma) log P with
/// C_tail = d^2: an estimate of |log prod_(p > P) m_p(u, v)|.
double tail_bound(int degree_bound, double sigma, double u, double v, std::uint64_t P);

/// Smallest P (searched over integers >= 2) with tail_bound(...) <= target,
/// where r2 stands for u^2 + v^2. Saturates at kCutoffSaturation when no
/// representable P is large enough.
inline constexpr std::uint64_t kCutoffSaturation = std::uint64_t{1} << 62;
std::uint64_t required_cutoff(int degree_bound, double sigma, double r2, double target);

struct ProductResult {
  std::complex<double> value;
  double tail_bound = 0.0;
  std::uint64_t prime_cutoff = 0;
  std::size_t unconverged = 0;
};

/// prod_(p <= P) m_p(u, v) in ascending prime order, with the logs summed
/// by compensated addition. Throws CutoffTooSmall when tail_bound exceeds
/// tail_tol.
ProductResult truncated_product(const LambdaSeries &series, double u, double v, const ProductConfig &cfg);

/// Same as truncated_product but visits primes in descending order.
ProductResult truncated_product_descending(const LambdaSeries &series, double u, double v,
                                           const ProductConfig &cfg);

struct CharFunMeta {
  double sigma = 0.0;
  std::uint64_t prime_cutoff = 0;
  std::size_t prime_count = 0;
  double tail_tol = 0.0;
  /// Largest |m_P(w)| min(2, exp(B(w)) - 1) over the grid, B the tail bound.
  double max_tail_effect = 0.0;
  /// Tail bound B at the grid corner.
  double corner_tail_bound = 0.0;
  double extent = 0.0;
  std::string flavor;
  int degree_bound = 1;
  std::size_t unconverged_primes = 0;
  double max_quad_change = 0.0;
  std::size_t max_nodes_used = 0;
};

/// Samples of m(u, v, sigma); values(i, j) belongs to (u.at(i), v.at(j)).
struct CharFunGrid {
  Axis u;
  Axis v;
  Eigen::MatrixXcd values;
  CharFunMeta meta;
};

/// Picks P so the worst-case tail effect on a [-W, W]^2 grid is expected to
/// meet tail_tol, using a gaussian proxy for |m|.
std::uint64_t default_grid_cutoff(const LambdaSeries &series, double sigma, double extent, double tail_tol);

/// m on the centered grid of n_points per axis over [-W, W). Each prime's
/// factor grid is computed once and multiplied in ascending prime order.
/// With an explicit cutoff, throws CutoffTooSmall when the tail effect
/// exceeds tail_tol; with an automatic cutoff, P is doubled until it fits.
CharFunGrid charfun_grid(const LambdaSeries &series, double extent, std::size_t n_points,
                         const ProductConfig &cfg);

/// Grid on arbitrary axes with a fixed cutoff; no tail check is applied.
CharFunGrid charfun_grid_on(const LambdaSeries &series, const Axis &u, const Axis &v,
                            const ProductConfig &cfg, std::uint64_t cutoff);

struct DecayShell {
  double r = 0.0;
  double max_abs = 0.0;
  std::size_t count = 0;
};

struct DecayProfile {
  std::vector<DecayShell> shells;
  /// Least-squares slope of log(-log max|m|) against log r over the fit range.
  double fitted_slope = 0.0;
  double fitted_intercept = 0.0;
  double fit_r_min = 10.0;
  double fit_r_max = 40.0;
  std::size_t fit_points = 0;
  bool inconclusive = false;
  /// Shell maxima non-increasing beyond the first drop below 0.9.
  bool monotone = true;
};

/// Shells k <= |u| + |v| < k + 1 labelled by their inner radius r = k, where
/// a decaying envelope attains its maximum. Shells are reported while they
/// lie inside the grid up to one grid step; the fit uses the shells that lie
/// within [fit_r_min, fit_r_max].
DecayProfile decay_profile(const CharFunGrid &grid, double fit_r_min = 10.0, double fit_r_max = 40.0);

} // namespace mfun
