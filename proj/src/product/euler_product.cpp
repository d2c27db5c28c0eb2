#include "mfun/euler_product.hpp"

#include "mfun/arith.hpp"
#include "mfun/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mfun {

std::vector<double> Axis::nodes() const {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = at(i);
  return out;
}

Axis Axis::centered(double extent, std::size_t n) {
  if (!(extent > 0.0))
    throw RangeError("grid extent must be positive");
  if (n < 2 || n % 2 != 0)
    throw RangeError("grid size must be even and >= 2");
  return {-extent, 2.0 * extent / static_cast<double>(n), n};
}

bool Axis::is_centered() const {
  if (n < 2 || n % 2 != 0 || !(step > 0.0))
    return false;
  return std::abs(start + static_cast<double>(n / 2) * step) <= 1e-12 * step * static_cast<double>(n);
}

void ProductConfig::validate() const {
  local_config().validate();
  if (prime_cutoff == 1)
    throw RangeError("prime cutoff must be >= 2");
  if (!(tail_tol > 0.0))
    throw RangeError("tail_tol must be positive");
}

LocalEvalConfig ProductConfig::local_config() const {
  LocalEvalConfig l = local;
  l.sigma = sigma;
  return l;
}

double tail_bound(int degree_bound, double sigma, double u, double v, std::uint64_t P) {
  const double r2 = u * u + v * v;
  if (r2 == 0.0)
    return 0.0;
  const double dP = static_cast<double>(P);
  const double c = static_cast<double>(degree_bound) * degree_bound;
  return c * r2 * (2.0 / (2.0 * sigma - 1.0)) * std::pow(dP, 1.0 - 2.0 * sigma) * std::log(dP);
}

std::uint64_t required_cutoff(int degree_bound, double sigma, double r2, double target) {
  if (!(target > 0.0))
    throw RangeError("required_cutoff: target must be positive");
  const double u = std::sqrt(r2);
  auto ok = [&](std::uint64_t P) { return tail_bound(degree_bound, sigma, u, 0.0, P) <= target; };
  if (ok(2))
    return 2;
  // P^(1-2 sigma) log P decreases once P exceeds e^(1/(2 sigma - 1)).
  const double peak = std::exp(1.0 / (2.0 * sigma - 1.0));
  std::uint64_t lo = peak < 2.0 ? 2 : static_cast<std::uint64_t>(std::min(peak, 1e18));
  if (ok(lo))
    return lo;
  std::uint64_t hi = std::max<std::uint64_t>(lo, 2) * 2;
  while (!ok(hi)) {
    if (hi >= kCutoffSaturation)
      return kCutoffSaturation;
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

namespace {

struct KahanComplex {
  std::complex<double> sum = 0.0;
  std::complex<double> comp = 0.0;
  void add(std::complex<double> x) {
    const auto y = x - comp;
    const auto t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

std::uint64_t resolve_point_cutoff(const LambdaSeries &series, double u, double v, const ProductConfig &cfg) {
  cfg.validate();
  const int d = series.degree_bound();
  std::uint64_t P = cfg.prime_cutoff;
  if (P == 0)
    P = required_cutoff(d, cfg.sigma, u * u + v * v, cfg.tail_tol);
  if (P > kSieveCap)
    throw ResourceError("prime cutoff " + std::to_string(P) + " exceeds the sieve cap");
  return std::max<std::uint64_t>(P, 2);
}

template <class It>
ProductResult product_over(const LambdaSeries &series, double u, double v, const ProductConfig &cfg,
                           std::uint64_t P, It first, It last) {
  const int d = series.degree_bound();
  ProductResult r;
  r.prime_cutoff = P;
  r.tail_bound = tail_bound(d, cfg.sigma, u, v, P);
  if (r.tail_bound > cfg.tail_tol)
    throw CutoffTooSmall("tail bound " + std::to_string(r.tail_bound) + " exceeds tail_tol " +
                             std::to_string(cfg.tail_tol),
                         required_cutoff(d, cfg.sigma, u * u + v * v, cfg.tail_tol));
  const LocalEvalConfig local = cfg.local_config();
  KahanComplex acc;
  bool zero = false;
  for (auto it = first; it != last; ++it) {
    const auto ap = build_ap_series(series, *it, local);
    const auto lf = local_factor(ap, u, v, local);
    if (!lf.converged)
      ++r.unconverged;
    if (lf.value == 0.0) {
      zero = true;
      continue;
    }
    acc.add(std::log(lf.value));
  }
  r.value = zero ? std::complex<double>(0.0) : std::exp(acc.sum);
  return r;
}

} // namespace

ProductResult truncated_product(const LambdaSeries &series, double u, double v, const ProductConfig &cfg) {
  const auto P = resolve_point_cutoff(series, u, v, cfg);
  const PrimeTable primes = sieve_primes(P);
  return product_over(series, u, v, cfg, P, primes.begin(), primes.end());
}

ProductResult truncated_product_descending(const LambdaSeries &series, double u, double v,
                                           const ProductConfig &cfg) {
  const auto P = resolve_point_cutoff(series, u, v, cfg);
  const PrimeTable primes = sieve_primes(P);
  const auto span = primes.primes();
  return product_over(series, u, v, cfg, P, span.rbegin(), span.rend());
}

std::uint64_t default_grid_cutoff(const LambdaSeries &series, double sigma, double extent, double tail_tol) {
  LocalEvalConfig local;
  local.sigma = sigma;
  local.validate();
  if (!(tail_tol > 0.0) || !(extent > 0.0))
    throw RangeError("default_grid_cutoff: extent and tail_tol must be positive");
  // |m(w)| ~ exp(-S |w|^2 / 4), S the summed second moments of the small
  // primes; the tail effect ~ |w|^2 |m(w)| peaks at |w|^2 = 4 / S.
  double S = 0.0;
  for (auto p : sieve_primes(1000))
    S += build_ap_series(series, p, local).square_sum();
  const double corner = 2.0 * extent * extent;
  double worst = corner;
  if (S > 0.0) {
    const double peak = 4.0 / S;
    worst = peak <= corner ? 4.0 / (std::numbers::e * S) : corner * std::exp(-S * corner / 4.0);
  }
  return std::max<std::uint64_t>(required_cutoff(series.degree_bound(), sigma, worst, tail_tol), 2);
}

namespace {

struct GridAccumulator {
  Eigen::MatrixXcd values;
  std::size_t primes = 0;
  std::size_t unconverged = 0;
  double max_change = 0.0;
  std::size_t max_nodes = 0;
};

int worker_count() {
#ifdef _OPENMP
  return std::max(1, omp_get_max_threads());
#else
  return 1;
#endif
}

void multiply_in(GridAccumulator &acc, const LambdaSeries &series, std::span<const std::uint64_t> primes,
                 const std::vector<double> &u, const std::vector<double> &v, const LocalEvalConfig &local) {
  const std::size_t batch = static_cast<std::size_t>(worker_count());
  std::vector<FactorGridResult> slots(batch);
  for (std::size_t start = 0; start < primes.size(); start += batch) {
    const std::size_t count = std::min(batch, primes.size() - start);
#pragma omp parallel for schedule(static, 1)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(count); ++k) {
      const auto ap = build_ap_series(series, primes[start + static_cast<std::size_t>(k)], local);
      slots[static_cast<std::size_t>(k)] = local_factor_grid(ap, u, v, local);
    }
    // Fixed ascending order keeps the result independent of the thread count.
    for (std::size_t k = 0; k < count; ++k) {
      const auto &f = slots[k];
      acc.values.array() *= f.values.array();
      ++acc.primes;
      if (!f.converged)
        ++acc.unconverged;
      acc.max_change = std::max(acc.max_change, f.last_change);
      acc.max_nodes = std::max(acc.max_nodes, f.nodes);
    }
  }
}

// max over nodes of |m(w)| min(2, expm1(B(w))).
double max_tail_effect(const GridAccumulator &acc, const std::vector<double> &u, const std::vector<double> &v,
                       int d, double sigma, std::uint64_t P) {
  const double unit = tail_bound(d, sigma, 1.0, 0.0, P);
  double worst = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j)
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double B = unit * (u[i] * u[i] + v[j] * v[j]);
      const double e = std::abs(acc.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) *
                       std::min(2.0, std::expm1(B));
      worst = std::max(worst, e);
    }
  return worst;
}

// Cutoff that brings every node's tail effect under tol, given the current |m|.
std::uint64_t cutoff_for_effect(const GridAccumulator &acc, const std::vector<double> &u,
                                const std::vector<double> &v, int d, double sigma, double tol) {
  double ratio = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < v.size(); ++j)
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double r2 = u[i] * u[i] + v[j] * v[j];
      const double a = std::abs(acc.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      if (r2 == 0.0 || 2.0 * a <= tol)
        continue;
      ratio = std::min(ratio, std::log1p(tol / a) / r2);
    }
  if (!std::isfinite(ratio))
    return 2;
  return required_cutoff(d, sigma, 1.0, ratio);
}

CharFunGrid make_grid(const LambdaSeries &series, const Axis &ua, const Axis &va, const ProductConfig &cfg) {
  CharFunGrid g;
  g.u = ua;
  g.v = va;
  g.meta.sigma = cfg.sigma;
  g.meta.tail_tol = cfg.tail_tol;
  g.meta.flavor = series.flavor();
  g.meta.degree_bound = series.degree_bound();
  g.meta.extent = std::max({std::abs(ua.at(0)), std::abs(ua.at(ua.n - 1)), std::abs(va.at(0)),
                            std::abs(va.at(va.n - 1))});
  return g;
}

void finish_meta(CharFunGrid &g, const GridAccumulator &acc, const std::vector<double> &u,
                 const std::vector<double> &v, std::uint64_t P) {
  g.meta.prime_cutoff = P;
  g.meta.prime_count = acc.primes;
  g.meta.unconverged_primes = acc.unconverged;
  g.meta.max_quad_change = acc.max_change;
  g.meta.max_nodes_used = acc.max_nodes;
  g.meta.max_tail_effect = max_tail_effect(acc, u, v, g.meta.degree_bound, g.meta.sigma, P);
  const double cu = std::max(std::abs(u.front()), std::abs(u.back()));
  const double cv = std::max(std::abs(v.front()), std::abs(v.back()));
  g.meta.corner_tail_bound = tail_bound(g.meta.degree_bound, g.meta.sigma, cu, cv, P);
}

} // namespace

CharFunGrid charfun_grid_on(const LambdaSeries &series, const Axis &ua, const Axis &va, const ProductConfig &cfg,
                            std::uint64_t cutoff) {
  cfg.validate();
  if (ua.n == 0 || va.n == 0)
    throw RangeError("charfun grid axes must be non-empty");
  if (cutoff < 2 || cutoff > kSieveCap)
    throw RangeError("prime cutoff must lie in [2, sieve cap]");
  CharFunGrid g = make_grid(series, ua, va, cfg);
  const auto u = ua.nodes();
  const auto v = va.nodes();
  GridAccumulator acc;
  acc.values = Eigen::MatrixXcd::Ones(static_cast<Eigen::Index>(u.size()), static_cast<Eigen::Index>(v.size()));
  const PrimeTable primes = sieve_primes(cutoff);
  multiply_in(acc, series, primes.primes(), u, v, cfg.local_config());
  finish_meta(g, acc, u, v, cutoff);
  g.values = std::move(acc.values);
  return g;
}

CharFunGrid charfun_grid(const LambdaSeries &series, double extent, std::size_t n_points, const ProductConfig &cfg) {
  cfg.validate();
  const Axis ua = Axis::centered(extent, n_points);
  CharFunGrid g = make_grid(series, ua, ua, cfg);
  const auto u = ua.nodes();
  const int d = series.degree_bound();
  const bool automatic = cfg.prime_cutoff == 0;
  std::uint64_t P = automatic ? default_grid_cutoff(series, cfg.sigma, extent, cfg.tail_tol) : cfg.prime_cutoff;
  if (P > kSieveCap)
    throw ResourceError("prime cutoff " + std::to_string(P) + " exceeds the sieve cap");

  const LocalEvalConfig local = cfg.local_config();
  GridAccumulator acc;
  acc.values = Eigen::MatrixXcd::Ones(static_cast<Eigen::Index>(n_points), static_cast<Eigen::Index>(n_points));
  std::uint64_t done = 1; // primes <= done are already multiplied in
  for (;;) {
    const PrimeTable primes = sieve_primes(P);
    const auto all = primes.primes();
    const auto from = std::upper_bound(all.begin(), all.end(), done);
    multiply_in(acc, series, std::span<const std::uint64_t>(from, all.end()), u, u, local);
    done = P;
    const double effect = max_tail_effect(acc, u, u, d, cfg.sigma, P);
    if (effect <= cfg.tail_tol)
      break;
    const std::uint64_t need = cutoff_for_effect(acc, u, u, d, cfg.sigma, cfg.tail_tol);
    if (!automatic)
      throw CutoffTooSmall("grid tail effect " + std::to_string(effect) + " exceeds tail_tol " +
                               std::to_string(cfg.tail_tol),
                           std::max(need, P + 1));
    const std::uint64_t next = std::max(need, 2 * P);
    if (next > kSieveCap)
      throw ResourceError("grid needs prime cutoff " + std::to_string(next) + " beyond the sieve cap");
    P = next;
  }
  finish_meta(g, acc, u, u, P);
  g.values = std::move(acc.values);
  return g;
}

} // namespace mfun
