#include "mfun/arith.hpp"
#include "mfun/error.hpp"
#include "mfun/euler_product.hpp"

#include "oracles/quad_oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mfun;

namespace {

const LambdaSeries &rational() {
  static const auto s = LambdaSeries::dedekind(NumberField::rational());
  return s;
}

const LambdaSeries &gaussian_field() {
  static const auto s = LambdaSeries::dedekind(NumberField::quadratic(-4));
  return s;
}

ProductConfig fixed(double sigma, std::uint64_t P) {
  ProductConfig c;
  c.sigma = sigma;
  c.prime_cutoff = P;
  c.tail_tol = 1e300;
  return c;
}

} // namespace

TEST_CASE("axis layout") {
  const auto a = Axis::centered(40, 512);
  CHECK(a.is_centered());
  CHECK(a.at(256) == 0.0);
  CHECK(a.at(0) == -40.0);
  CHECK(a.step == 80.0 / 512);
  CHECK_THROWS_AS(Axis::centered(40, 511), RangeError);
  CHECK_THROWS_AS(Axis::centered(0, 512), RangeError);
  CHECK_FALSE(Axis{0.0, 1.0, 4}.is_centered());
}

TEST_CASE("tail bound formula and inversion") {
  const double B = tail_bound(2, 1.5, 1, 2, 1000);
  CHECK(B == doctest::Approx(4 * 5 * (2 / 2.0) * std::pow(1000.0, -2.0) * std::log(1000.0)).epsilon(1e-14));
  CHECK(required_cutoff(1, 0.6, 50.0, 1e-2) == kCutoffSaturation);
  for (double sigma : {0.75, 1.0, 1.5, 3.0}) {
    for (double target : {1e-2, 1e-4, 1e-8}) {
      const auto P = required_cutoff(1, sigma, 50.0, target);
      if (P == kCutoffSaturation)
        continue;
      CHECK(tail_bound(1, sigma, std::sqrt(50.0), 0, P) <= target);
      if (P > 3) {
        // Minimal beyond the peak of the bound.
        const double peak = std::exp(1 / (2 * sigma - 1));
        if (static_cast<double>(P - 1) > peak)
          CHECK(tail_bound(1, sigma, std::sqrt(50.0), 0, P - 1) > target);
      }
    }
  }
  CHECK_THROWS_AS(required_cutoff(1, 1.0, 1.0, 0.0), RangeError);
}

TEST_CASE("product at the origin is one") {
  auto cfg = fixed(1.2, 500);
  cfg.tail_tol = 1e-4;
  const auto r = truncated_product(gaussian_field(), 0, 0, cfg);
  CHECK(r.value == std::complex<double>(1.0, 0.0));
  CHECK(r.tail_bound == 0.0);
}

TEST_CASE("doubling P moves the value by less than the tail bound") {
  const auto a = truncated_product(rational(), 1, 0, fixed(1.5, 1000));
  const auto b = truncated_product(rational(), 1, 0, fixed(1.5, 2000));
  CHECK(std::abs(a.value - b.value) < a.tail_bound);
  CHECK(a.tail_bound == tail_bound(1, 1.5, 1, 0, 1000));
}

TEST_CASE("product matches the oracle built from 2^16-node local factors") {
  const std::uint64_t P = 200;
  const auto cfg = fixed(1.2, P);
  const auto r = truncated_product(gaussian_field(), 2, 1, cfg);
  std::complex<double> ref = 1.0;
  for (auto p : sieve_primes(P)) {
    const auto s = build_ap_series(gaussian_field(), p, cfg.local_config());
    ref *= oracle::local_factor_oracle(s, 2, 1);
  }
  CHECK(std::abs(r.value - ref) < 1e-10);
}

TEST_CASE("prime order does not matter") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w(-6, 6);
  for (int k = 0; k < 10; ++k) {
    const double u = w(rng), v = w(rng);
    const auto cfg = fixed(1.0 + 0.1 * k, 3000);
    const auto a = truncated_product(gaussian_field(), u, v, cfg);
    const auto b = truncated_product_descending(gaussian_field(), u, v, cfg);
    CHECK(std::abs(a.value - b.value) <= 1e-12 * std::max(std::abs(a.value), 1e-300));
  }
}

TEST_CASE("cutoff errors name the required P") {
  ProductConfig cfg;
  cfg.sigma = 1.0;
  cfg.prime_cutoff = 100;
  cfg.tail_tol = 1e-4;
  try {
    truncated_product(rational(), 3, 3, cfg);
    FAIL("expected CutoffTooSmall");
  } catch (const CutoffTooSmall &e) {
    const auto need = e.required_cutoff();
    CHECK(need == required_cutoff(1, 1.0, 18.0, 1e-4));
    CHECK(tail_bound(1, 1.0, 3, 3, need) <= 1e-4);
  }
  cfg.prime_cutoff = 1;
  CHECK_THROWS_AS(cfg.validate(), RangeError);
  cfg.prime_cutoff = 0;
  cfg.sigma = 0.5;
  CHECK_THROWS_AS(cfg.validate(), RangeError);
}

TEST_CASE("automatic point cutoff meets the tolerance") {
  ProductConfig cfg;
  cfg.sigma = 1.5;
  cfg.tail_tol = 1e-6;
  const auto r = truncated_product(rational(), 2, -1, cfg);
  CHECK(r.tail_bound <= 1e-6);
  CHECK(r.prime_cutoff == required_cutoff(1, 1.5, 5.0, 1e-6));
}

TEST_CASE("grid symmetries and agreement with pointwise products") {
  const auto g = charfun_grid_on(gaussian_field(), Axis::centered(8, 16), Axis::centered(8, 16), fixed(1.2, 400), 400);
  const std::size_t n = 16, c = 8;
  CHECK(std::abs(g.values(c, c) - 1.0) < 1e-15);
  double conj_res = 0, refl_res = 0, mod = 0;
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 1; j < n; ++j) {
      conj_res = std::max(conj_res, std::abs(g.values(n - i, n - j) - std::conj(g.values(i, j))));
      refl_res = std::max(refl_res, std::abs(g.values(i, n - j) - g.values(i, j)));
      mod = std::max(mod, std::abs(g.values(i, j)));
    }
  CHECK(conj_res < 1e-10);
  CHECK(refl_res < 1e-10);
  CHECK(mod <= 1 + 1e-12);
  for (std::size_t i : {0, 3, 11})
    for (std::size_t j : {1, 8, 14}) {
      const auto r = truncated_product(gaussian_field(), g.u.at(i), g.v.at(j), fixed(1.2, 400));
      CHECK(std::abs(r.value - g.values(i, j)) < 1e-12);
    }
  CHECK(g.meta.prime_count == sieve_primes(400).size());
  CHECK(g.meta.flavor == gaussian_field().flavor());
}

TEST_CASE("explicit grid cutoff that is too small is rejected") {
  ProductConfig cfg;
  cfg.sigma = 1.0;
  cfg.prime_cutoff = 50;
  cfg.tail_tol = 1e-6;
  CHECK_THROWS_AS(charfun_grid(rational(), 10, 16, cfg), CutoffTooSmall);
}

TEST_CASE("rational field at sigma 1.5 decays within extent 30") {
  ProductConfig cfg;
  cfg.sigma = 1.5;
  const auto g = charfun_grid(rational(), 30, 128, cfg);
  CHECK(g.meta.max_tail_effect <= cfg.tail_tol);
  const std::size_t c = 64;
  CHECK(std::abs(g.values(c, c) - 1.0) < 1e-12);
  // Boundary of the grid: |u| = 30 or |v| = 30.
  double edge = 0;
  for (std::size_t k = 0; k < 128; ++k)
    edge = std::max({edge, std::abs(g.values(0, k)), std::abs(g.values(k, 0))});
  CHECK(edge < 1e-3);
  // |m| oscillates along a ray at the 1e-4 level, so compare the envelope:
  // the maximum over consecutive segments of length 10 decreases.
  for (int dir : {0, 1}) {
    double seg[3] = {0, 0, 0};
    for (std::size_t k = c; k < 128; ++k) {
      const double r = g.u.at(k);
      const double a = std::abs(dir ? g.values(c, k) : g.values(k, c));
      seg[std::min<std::size_t>(static_cast<std::size_t>(r / 10), 2)] =
          std::max(seg[std::min<std::size_t>(static_cast<std::size_t>(r / 10), 2)], a);
    }
    CHECK(seg[1] < seg[0]);
    CHECK(seg[2] < seg[1]);
  }
  const auto prof = decay_profile(g);
  CHECK(prof.monotone);
}

TEST_CASE("decay profile recovers the exponent of a synthetic grid") {
  for (double a : {0.5, 1.0, 1.3}) {
    CharFunGrid g;
    g.u = g.v = Axis::centered(50, 200);
    g.values.resize(200, 200);
    for (std::size_t i = 0; i < 200; ++i)
      for (std::size_t j = 0; j < 200; ++j) {
        const double r = std::abs(g.u.at(i)) + std::abs(g.v.at(j));
        g.values(i, j) = std::exp(-0.2 * std::pow(r, a));
      }
    const auto prof = decay_profile(g);
    CHECK_FALSE(prof.inconclusive);
    CHECK(prof.fitted_slope == doctest::Approx(a).epsilon(1e-9));
    CHECK(prof.fitted_intercept == doctest::Approx(std::log(0.2)).epsilon(1e-9));
    CHECK(prof.monotone);
    CHECK(prof.fit_points == 30);
  }
  // Too little decay inside the fit range.
  CharFunGrid flat;
  flat.u = flat.v = Axis::centered(50, 100);
  flat.values = Eigen::MatrixXcd::Constant(100, 100, 0.8);
  CHECK(decay_profile(flat).inconclusive);
  // Grid too small to reach r = 40.
  CharFunGrid small;
  small.u = small.v = Axis::centered(15, 60);
  small.values.resize(60, 60);
  for (std::size_t i = 0; i < 60; ++i)
    for (std::size_t j = 0; j < 60; ++j)
      small.values(i, j) = std::exp(-(std::abs(small.u.at(i)) + std::abs(small.v.at(j))));
  CHECK(decay_profile(small).inconclusive);
}
