#include "mfun/empirical.hpp"

#include "mfun/arith.hpp"
#include "mfun/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mfun {

std::string to_string(TruncationMode mode) {
  switch (mode) {
  case TruncationMode::smoothed:
    return "smoothed";
  case TruncationMode::sharp:
    return "sharp";
  case TruncationMode::prime_power:
    return "prime_power";
  }
  return "?";
}

TruncationMode parse_truncation_mode(const std::string &name) {
  if (name == "smoothed")
    return TruncationMode::smoothed;
  if (name == "sharp")
    return TruncationMode::sharp;
  if (name == "prime_power")
    return TruncationMode::prime_power;
  throw RangeError("unknown truncation mode '" + name + "'");
}

void SamplerConfig::validate() const {
  if (!(sigma > 0.5))
    throw RangeError("sigma must exceed 1/2");
  if (!(T > 0.0))
    throw RangeError("T must be positive");
  if (n_samples < 1000)
    throw RangeError("n_samples must be at least 1000");
  if (!(x > 1.0))
    throw RangeError("x must exceed 1");
  if (x * x > x2_cap)
    throw ResourceError("x^2 = " + std::to_string(x * x) + " exceeds the configured cap");
}

std::vector<DirichletTerm> truncated_terms(const LambdaSeries &series, double x, TruncationMode mode, double sigma,
                                           double x2_cap, double prime_power_tol) {
  if (!(x > 1.0))
    throw RangeError("truncated_terms: x must exceed 1");
  const double x2 = x * x;
  if (x2 > x2_cap || x2 > static_cast<double>(kSieveCap))
    throw ResourceError("truncated_terms: x^2 = " + std::to_string(x2) + " exceeds the cap");
  const auto limit = static_cast<std::uint64_t>(std::floor(x2));
  std::vector<DirichletTerm> terms;
  if (limit < 2)
    return terms;
  const double logx = std::log(x);
  const double d = series.degree_bound();
  for (auto p : sieve_primes(limit)) {
    const double logp = std::log(static_cast<double>(p));
    if (mode == TruncationMode::prime_power) {
      if (!(sigma > 0.5))
        throw RangeError("truncated_terms: sigma must exceed 1/2");
      const double q = std::pow(static_cast<double>(p), -sigma);
      double bound = d * logp * q * q / (1.0 - q);
      int M = 1;
      while (!(bound < prime_power_tol)) {
        ++M;
        bound *= q;
      }
      for (int m = 1; m <= M; ++m) {
        const auto c = series.value(p, m);
        if (c != 0.0)
          terms.push_back({p, m, m * logp, c});
      }
      continue;
    }
    std::uint64_t n = p;
    for (int m = 1;; ++m) {
      const double logn = m * logp;
      double weight = 1.0;
      if (mode == TruncationMode::smoothed && static_cast<double>(n) > x)
        weight = (2.0 * logx - logn) / logx;
      if (weight > 0.0) {
        const auto c = series.value(p, m);
        if (c != 0.0)
          terms.push_back({p, m, logn, weight * c});
      }
      if (n > limit / p)
        break;
      n *= p;
    }
  }
  std::sort(terms.begin(), terms.end(), [](const DirichletTerm &a, const DirichletTerm &b) {
    return a.log_n != b.log_n ? a.log_n < b.log_n : a.p < b.p;
  });
  return terms;
}

std::map<std::uint64_t, std::complex<double>> smoothed_coefficients(const LambdaSeries &series, double x,
                                                                    TruncationMode mode, double x2_cap) {
  if (mode == TruncationMode::prime_power)
    throw ContractViolation("smoothed_coefficients: prime_power terms are not indexed by n <= x^2");
  std::map<std::uint64_t, std::complex<double>> out;
  for (const auto &t : truncated_terms(series, x, mode, 1.0, x2_cap)) {
    std::uint64_t n = 1;
    for (int k = 0; k < t.m; ++k)
      n *= t.p;
    out.emplace(n, t.coeff);
  }
  return out;
}

std::vector<double> sample_times(const SamplerConfig &cfg) {
  cfg.validate();
  const double dt = cfg.T / static_cast<double>(cfg.n_samples);
  double offset = 0.0;
  if (cfg.jitter) {
    std::mt19937_64 rng(cfg.seed);
    offset = static_cast<double>(rng() >> 11) * 0x1.0p-53 * dt;
  }
  std::vector<double> t(cfg.n_samples);
  for (std::size_t k = 0; k < cfg.n_samples; ++k)
    t[k] = offset + static_cast<double>(k) * dt;
  return t;
}

namespace {

constexpr std::size_t kSampleBlock = 512;
constexpr std::size_t kTermBlock = 2048;
constexpr std::size_t kLanes = 8;

struct TermArrays {
  std::vector<double> log_n, a_re, a_im, st_re, st_im;
  std::size_t size = 0;
};

TermArrays pack_terms(const std::vector<DirichletTerm> &terms, double sigma, double dt) {
  TermArrays ta;
  ta.size = (terms.size() + kLanes - 1) / kLanes * kLanes;
  ta.log_n.assign(ta.size, 0.0);
  ta.a_re.assign(ta.size, 0.0);
  ta.a_im.assign(ta.size, 0.0);
  ta.st_re.assign(ta.size, 1.0);
  ta.st_im.assign(ta.size, 0.0);
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const auto &t = terms[j];
    const auto a = t.coeff * std::exp(-sigma * t.log_n);
    ta.log_n[j] = t.log_n;
    ta.a_re[j] = a.real();
    ta.a_im[j] = a.imag();
    ta.st_re[j] = std::cos(dt * t.log_n);
    ta.st_im[j] = -std::sin(dt * t.log_n);
  }
  return ta;
}

// Adds sum_j a_j n_j^(-i t_k) for t_k = t0 + k dt, k < count, into out.
void accumulate_block(const TermArrays &ta, double t0, std::size_t count, std::complex<double> *out) {
  alignas(64) double ph_re[kTermBlock];
  alignas(64) double ph_im[kTermBlock];
  for (std::size_t j0 = 0; j0 < ta.size; j0 += kTermBlock) {
    const std::size_t len = std::min(kTermBlock, ta.size - j0);
    const double *sr = ta.st_re.data() + j0;
    const double *si = ta.st_im.data() + j0;
    for (std::size_t j = 0; j < len; ++j) {
      const double ph = t0 * ta.log_n[j0 + j];
      const double c = std::cos(ph), s = -std::sin(ph);
      ph_re[j] = ta.a_re[j0 + j] * c - ta.a_im[j0 + j] * s;
      ph_im[j] = ta.a_re[j0 + j] * s + ta.a_im[j0 + j] * c;
    }
    for (std::size_t k = 0; k < count; ++k) {
      double acc_re[kLanes] = {};
      double acc_im[kLanes] = {};
      for (std::size_t j = 0; j < len; j += kLanes) {
        for (std::size_t l = 0; l < kLanes; ++l) {
          const double r = ph_re[j + l], i = ph_im[j + l];
          acc_re[l] += r;
          acc_im[l] += i;
          ph_re[j + l] = r * sr[j + l] - i * si[j + l];
          ph_im[j + l] = r * si[j + l] + i * sr[j + l];
        }
      }
      double re = 0.0, im = 0.0;
      for (std::size_t l = 0; l < kLanes; ++l) {
        re += acc_re[l];
        im += acc_im[l];
      }
      out[k] += std::complex<double>(re, im);
    }
  }
}

} // namespace

SampleSeries sample_line(const LambdaSeries &series, const SamplerConfig &cfg) {
  cfg.validate();
  SampleSeries out;
  out.config = cfg;
  out.flavor = series.flavor();
  out.t_values = sample_times(cfg);
  const auto terms = truncated_terms(series, cfg.x, cfg.mode, cfg.sigma, cfg.x2_cap, cfg.prime_power_tol);
  for (const auto &t : terms)
    out.crude_bound += std::abs(t.coeff) * std::exp(-cfg.sigma * t.log_n);

  const double dt = cfg.T / static_cast<double>(cfg.n_samples);
  const TermArrays ta = pack_terms(terms, cfg.sigma, dt);
  const std::size_t n = cfg.n_samples;
  out.values.assign(n, 0.0);
  const auto blocks = static_cast<std::ptrdiff_t>((n + kSampleBlock - 1) / kSampleBlock);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t k0 = static_cast<std::size_t>(b) * kSampleBlock;
    const std::size_t count = std::min(kSampleBlock, n - k0);
    accumulate_block(ta, out.t_values[k0], count, out.values.data() + k0);
  }
  for (auto &v : out.values)
    v = -v;
  return out;
}

std::vector<std::complex<double>> evaluate_direct(const std::vector<DirichletTerm> &terms, double sigma,
                                                  const std::vector<double> &t) {
  std::vector<std::complex<double>> out(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    std::complex<double> s = 0.0;
    for (const auto &term : terms) {
      const double ph = t[k] * term.log_n;
      s += term.coeff * std::exp(-sigma * term.log_n) * std::complex<double>(std::cos(ph), -std::sin(ph));
    }
    out[k] = -s;
  }
  return out;
}

Eigen::MatrixXcd empirical_charfun(const SampleSeries &samples, const Axis &u, const Axis &v) {
  const std::size_t n = samples.values.size();
  if (n == 0)
    throw ContractViolation("empirical_charfun: no samples");
  constexpr std::size_t kBlock = 4096;
  const auto nu = static_cast<Eigen::Index>(u.n), nv = static_cast<Eigen::Index>(v.n);
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(nu, nv);
  Eigen::MatrixXcd A, B;
  for (std::size_t s0 = 0; s0 < n; s0 += kBlock) {
    const auto len = static_cast<Eigen::Index>(std::min(kBlock, n - s0));
    A.resize(nu, len);
    B.resize(nv, len);
    for (Eigen::Index s = 0; s < len; ++s) {
      const auto z = samples.values[s0 + static_cast<std::size_t>(s)];
      for (Eigen::Index i = 0; i < nu; ++i) {
        const double ph = u.at(static_cast<std::size_t>(i)) * z.real();
        A(i, s) = {std::cos(ph), std::sin(ph)};
      }
      for (Eigen::Index j = 0; j < nv; ++j) {
        const double ph = v.at(static_cast<std::size_t>(j)) * z.imag();
        B(j, s) = {std::cos(ph), std::sin(ph)};
      }
    }
    sum.noalias() += A * B.transpose();
  }
  return sum / static_cast<double>(n);
}

double empirical_average(const SampleSeries &samples, const TestFunction &phi) {
  if (samples.values.empty())
    throw ContractViolation("empirical_average: no samples");
  double s = 0.0;
  for (const auto &z : samples.values)
    s += phi(z);
  return s / static_cast<double>(samples.values.size());
}

std::complex<double> sample_mean(const SampleSeries &samples) {
  if (samples.values.empty())
    throw ContractViolation("sample_mean: no samples");
  std::complex<double> s = 0.0;
  for (const auto &z : samples.values)
    s += z;
  return s / static_cast<double>(samples.values.size());
}

} // namespace mfun
