#include "mfun/empirical.hpp"
#include "mfun/error.hpp"

#include "oracles/dirichlet_oracle.hpp"

#include <doctest.h>
#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>

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

SamplerConfig small_config(double sigma, double x, TruncationMode mode) {
  SamplerConfig c;
  c.sigma = sigma;
  c.x = x;
  c.mode = mode;
  c.T = 500;
  c.n_samples = 2000;
  return c;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

} // namespace

TEST_CASE("truncation modes by name") {
  for (auto m : {TruncationMode::smoothed, TruncationMode::sharp, TruncationMode::prime_power})
    CHECK(parse_truncation_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_truncation_mode("fuzzy"), RangeError);
}

TEST_CASE("config validation") {
  SamplerConfig c;
  CHECK_NOTHROW(c.validate());
  c.n_samples = 999;
  CHECK_THROWS_AS(c.validate(), RangeError);
  c = SamplerConfig{};
  c.x = 1.0;
  CHECK_THROWS_AS(c.validate(), RangeError);
  c = SamplerConfig{};
  c.sigma = 0.5;
  CHECK_THROWS_AS(c.validate(), RangeError);
  c = SamplerConfig{};
  c.x = 1e5;
  CHECK_THROWS_AS(c.validate(), ResourceError);
}

TEST_CASE("smoothed coefficients") {
  const auto c = smoothed_coefficients(rational(), 10);
  CHECK(c.at(7).real() == doctest::Approx(std::log(7.0)).epsilon(1e-15));
  const double w49 = std::log(100.0 / 49.0) / std::log(10.0);
  CHECK(w49 == doctest::Approx(0.3098).epsilon(1e-4));
  CHECK(c.at(49).real() == doctest::Approx(w49 * std::log(7.0)).epsilon(1e-14));
  CHECK_FALSE(c.contains(50));
  CHECK(c.at(100 - 3).real() > 0); // 97 is prime
  CHECK(c.rbegin()->first <= 100);
  for (const auto &[n, v] : c) {
    const double L = oracle::von_mangoldt(n);
    CHECK(L > 0);
    CHECK(v.real() <= L * (1 + 1e-15));
    CHECK(v.real() >= 0);
  }
  const auto sharp = smoothed_coefficients(rational(), 10, TruncationMode::sharp);
  CHECK(sharp.at(49).real() == doctest::Approx(std::log(7.0)));
  CHECK(sharp.size() == c.size());
  // Split primes carry weight d.
  const auto g = smoothed_coefficients(gaussian_field(), 10);
  CHECK(g.at(5).real() == doctest::Approx(2 * std::log(5.0)));
  CHECK_FALSE(g.contains(3));
  CHECK(g.at(9).real() == doctest::Approx(2 * std::log(3.0)));
  CHECK(g.at(81).real() == doctest::Approx(2 * std::log(3.0) * std::log(100.0 / 81) / std::log(10.0)));
  CHECK_THROWS_AS(smoothed_coefficients(rational(), 1e5), ResourceError);
}

TEST_CASE("prime_power mode enumerates every m for p <= x^2") {
  const auto terms = truncated_terms(rational(), 10, TruncationMode::prime_power, 2.0);
  bool has_high_power = false;
  for (const auto &t : terms) {
    CHECK(t.p <= 100);
    if (t.p == 2 && t.m > 6)
      has_high_power = true;
  }
  CHECK(has_high_power);
  CHECK(std::is_sorted(terms.begin(), terms.end(), [](const auto &a, const auto &b) { return a.log_n < b.log_n; }));
}

TEST_CASE("sharp value at t = 0 equals the finite sum") {
  auto cfg = small_config(1.5, 10, TruncationMode::sharp);
  const auto s = sample_line(rational(), cfg);
  REQUIRE(s.t_values[0] == 0.0);
  double ref = 0;
  for (std::uint64_t n = 2; n <= 100; ++n)
    ref -= oracle::von_mangoldt(n) / std::pow(double(n), 1.5);
  CHECK(s.values[0].real() == doctest::Approx(ref).epsilon(1e-14));
  CHECK(s.values[0].real() < 0);
  CHECK(std::abs(s.values[0].imag()) < 1e-15);
}

TEST_CASE("sampled values agree with the trial-division oracle") {
  auto cfg = small_config(1.2, 30, TruncationMode::sharp);
  const auto s = sample_line(rational(), cfg);
  for (std::size_t k : {0, 1, 777, 1999})
    CHECK(std::abs(s.values[k] - oracle::neg_log_derivative_partial(1.2, s.t_values[k], 900)) < 1e-11);
}

TEST_CASE("conjugation symmetry") {
  const auto terms = truncated_terms(gaussian_field(), 50, TruncationMode::smoothed);
  const std::vector<double> t{0.7, 13.2, 250.0}, mt{-0.7, -13.2, -250.0};
  const auto a = evaluate_direct(terms, 1.3, t), b = evaluate_direct(terms, 1.3, mt);
  for (std::size_t k = 0; k < t.size(); ++k)
    CHECK(std::abs(a[k] - std::conj(b[k])) < 1e-13);
}

TEST_CASE("high cutoff sharp sum approaches zeta'/zeta(2)") {
  auto cfg = small_config(2.0, 3000, TruncationMode::sharp);
  cfg.n_samples = 1000;
  const auto s = sample_line(rational(), cfg);
  CHECK(s.values[0].real() == doctest::Approx(-0.5699609930945).epsilon(1e-5));
}

TEST_CASE("blocked recurrence matches direct evaluation") {
  for (auto *series : {&rational(), &gaussian_field()}) {
    SamplerConfig cfg;
    cfg.sigma = 1.2;
    cfg.x = 300;
    cfg.T = 8000;
    cfg.n_samples = 5000;
    cfg.jitter = true;
    cfg.seed = 9;
    const auto s = sample_line(*series, cfg);
    const auto terms = truncated_terms(*series, cfg.x, cfg.mode, cfg.sigma);
    const auto d = evaluate_direct(terms, cfg.sigma, s.t_values);
    double err = 0, mod = 0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      err = std::max(err, std::abs(d[k] - s.values[k]));
      mod = std::max(mod, std::abs(s.values[k]));
    }
    CHECK(err < 1e-9);
    CHECK(mod <= s.crude_bound);
  }
}

TEST_CASE("sample times and jitter") {
  SamplerConfig cfg = small_config(1.5, 10, TruncationMode::smoothed);
  const auto t = sample_times(cfg);
  CHECK(t.size() == 2000);
  CHECK(t[1] == doctest::Approx(0.25));
  cfg.jitter = true;
  cfg.seed = 4;
  const auto a = sample_times(cfg);
  CHECK(a[0] > 0);
  CHECK(a[0] < 0.25);
  CHECK(a[1] - a[0] == doctest::Approx(0.25));
  CHECK(a.back() < cfg.T);
  cfg.seed = 5;
  CHECK(sample_times(cfg)[0] != a[0]);
}

TEST_CASE("empirical characteristic function") {
  auto cfg = small_config(1.5, 30, TruncationMode::smoothed);
  cfg.n_samples = 5000;
  const auto s = sample_line(rational(), cfg);
  const auto ax = Axis::centered(3, 12);
  const auto e = empirical_charfun(s, ax, ax);
  CHECK(e(6, 6) == std::complex<double>(1.0, 0.0));
  CHECK(e.cwiseAbs().maxCoeff() <= 1 + 1e-14);
  for (Eigen::Index i = 1; i < 12; ++i)
    for (Eigen::Index j = 1; j < 12; ++j)
      CHECK(std::abs(e(12 - i, 12 - j) - std::conj(e(i, j))) < 1e-13);
  // Direct definition at one node.
  std::complex<double> ref = 0.0;
  for (auto z : s.values)
    ref += std::polar(1.0, z.real() * ax.at(2) + z.imag() * ax.at(9));
  ref /= static_cast<double>(s.values.size());
  CHECK(std::abs(e(2, 9) - ref) < 1e-12);
}

TEST_CASE("empirical averages") {
  const auto s = sample_line(gaussian_field(), small_config(1.2, 30, TruncationMode::smoothed));
  CHECK(empirical_average(s, TestFunction::gaussian({0, 0}, 1e12)) == doctest::Approx(1.0).epsilon(1e-12));
  const double g = empirical_average(s, TestFunction::gaussian(sample_mean(s), 1.0));
  CHECK(g > 0);
  CHECK(g <= 1);
  std::complex<double> mean = 0.0;
  for (auto z : s.values)
    mean += z;
  CHECK(std::abs(sample_mean(s) - mean / double(s.values.size())) < 1e-13);
}

TEST_CASE("compare report") {
  CharFunGrid model;
  model.u = model.v = Axis::centered(3, 12);
  model.values = Eigen::MatrixXcd::Constant(12, 12, 0.5);
  const auto self = compare_report(model.values, model, 0.05, 3);
  CHECK(self.max_dev == 0.0);
  CHECK(self.mean_dev == 0.0);
  CHECK(self.pass);
  CHECK(self.nodes > 0);
  Eigen::MatrixXcd shifted = model.values;
  shifted(6, 6) += 0.1;
  shifted(0, 0) += 1.0; // outside |w| <= 3
  const auto r = compare_report(shifted, model, 0.05, 3);
  CHECK(r.max_dev == doctest::Approx(0.1));
  CHECK_FALSE(r.pass);
  CHECK(r.shells.front().max_dev == doctest::Approx(0.1));
  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j.at("pass") == false);
  CHECK(j.at("max_dev").get<double>() == doctest::Approx(0.1));
  CHECK(j.at("shells").is_array());
  CHECK_THROWS_AS(compare_report(Eigen::MatrixXcd::Zero(10, 12), model, 0.05), ContractViolation);
}

TEST_CASE("deviation shrinks with four times more samples") {
  ProductConfig pc;
  pc.sigma = 1.5;
  pc.tail_tol = 1e-6;
  const auto model = charfun_grid(rational(), 3, 12, pc);
  std::vector<double> small, large;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SamplerConfig cfg;
    cfg.sigma = 1.5;
    cfg.x = 100;
    cfg.T = 1e5;
    cfg.jitter = true;
    cfg.seed = seed;
    cfg.n_samples = 1000;
    small.push_back(compare_report(empirical_charfun(sample_line(rational(), cfg), model.u, model.v), model, 1, 3).max_dev);
    cfg.n_samples = 4000;
    large.push_back(compare_report(empirical_charfun(sample_line(rational(), cfg), model.u, model.v), model, 1, 3).max_dev);
  }
  MESSAGE("median max deviation " << median(small) << " -> " << median(large));
  CHECK(median(large) <= median(small));
}

TEST_CASE("truncation modes converge together") {
  const double t = 17.3;
  auto distances = [&](double x) {
    std::vector<std::complex<double>> v;
    for (auto m : {TruncationMode::smoothed, TruncationMode::sharp, TruncationMode::prime_power})
      v.push_back(evaluate_direct(truncated_terms(rational(), x, m, 2.0), 2.0, {t})[0]);
    return std::array<double, 3>{std::abs(v[0] - v[1]), std::abs(v[0] - v[2]), std::abs(v[1] - v[2])};
  };
  const auto d1 = distances(250), d2 = distances(500), d3 = distances(1000);
  for (int k = 0; k < 3; ++k) {
    CHECK(d2[k] < d1[k]);
    CHECK(d3[k] < d2[k]);
    CHECK(d3[k] < 1e-3);
  }
}

TEST_CASE("pipeline is bit-reproducible across thread counts") {
  SamplerConfig cfg;
  cfg.sigma = 1.2;
  cfg.x = 200;
  cfg.T = 3000;
  cfg.n_samples = 3000;
  cfg.jitter = true;
  cfg.seed = 77;
  const auto ax = Axis::centered(2, 8);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto a = sample_line(gaussian_field(), cfg);
  const auto ea = empirical_charfun(a, ax, ax);
  omp_set_num_threads(3);
  const auto b = sample_line(gaussian_field(), cfg);
  const auto eb = empirical_charfun(b, ax, ax);
  omp_set_num_threads(saved);
  CHECK(a.values == b.values);
  CHECK(a.t_values == b.t_values);
  CHECK(ea == eb);
}
