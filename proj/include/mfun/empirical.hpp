#pragma once

#include "mfun/density.hpp"
#include "mfun/euler_product.hpp"
#include "mfun/lambda_series.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mfun {

enum class TruncationMode {
  smoothed,    ///< weight log(x^2/n) / log x for x < n <= x^2
  sharp,       ///< weight 1 for n <= x^2
  prime_power, ///< p <= x^2 and every m up to a tail tolerance
};

std::string to_string(TruncationMode mode);
/// Throws RangeError for an unknown name.
TruncationMode parse_truncation_mode(const std::string &name);

struct SamplerConfig {
  double sigma = 1.5;
  double T = 2000.0;
  std::size_t n_samples = 200'000;
  double x = 1000.0;
  TruncationMode mode = TruncationMode::smoothed;
  /// Shift the whole uniform grid by one seeded offset in [0, T / n).
  bool jitter = false;
  std::uint64_t seed = 0;
  /// Largest x^2 accepted.
  double x2_cap = 1e8;
  /// Per-prime cutoff for the m-sum in prime_power mode.
  double prime_power_tol = 1e-15;

  void validate() const;
};

/// One prime-power term Lambda_(K,x)(p^m) of the truncated series.
struct DirichletTerm {
  std::uint64_t p;
  int m;
  double log_n;
  std::complex<double> coeff;
};

/// Terms ordered by n, zero coefficients dropped. The coefficient excludes
/// the n^(-sigma) factor; for sigma-dependent truncation (prime_power mode)
/// pass sigma.
std::vector<DirichletTerm> truncated_terms(const LambdaSeries &series, double x, TruncationMode mode,
                                           double sigma = 1.0, double x2_cap = 1e8,
                                           double prime_power_tol = 1e-15);

/// Lambda_(K,x)(n) for n <= x^2 (smoothed and sharp modes).
std::map<std::uint64_t, std::complex<double>> smoothed_coefficients(const LambdaSeries &series, double x,
                                                                    TruncationMode mode = TruncationMode::smoothed,
                                                                    double x2_cap = 1e8);

struct SampleSeries {
  std::vector<double> t_values;
  std::vector<std::complex<double>> values;
  SamplerConfig config;
  std::string flavor;
  /// sum |Lambda_(K,x)(n)| n^(-sigma); every |value| is at most this.
  double crude_bound = 0.0;
};

/// Sample times offset + k T / n for k < n.
std::vector<double> sample_times(const SamplerConfig &cfg);

/// -sum_n Lambda_(K,x)(n) n^(-sigma - it) on the sample times. Phases
/// n^(-it) advance by a recurrence inside blocks that are re-seeded
/// exactly, so results match direct evaluation to about 1e-12.
SampleSeries sample_line(const LambdaSeries &series, const SamplerConfig &cfg);

/// Same series at arbitrary times, one sincos per term and time.
std::vector<std::complex<double>> evaluate_direct(const std::vector<DirichletTerm> &terms, double sigma,
                                                  const std::vector<double> &t);

/// Mean over samples of exp(i <value, w>) on the grid u x v.
Eigen::MatrixXcd empirical_charfun(const SampleSeries &samples, const Axis &u, const Axis &v);

/// Mean over samples of Phi(value).
double empirical_average(const SampleSeries &samples, const TestFunction &phi);

std::complex<double> sample_mean(const SampleSeries &samples);

struct ShellDeviation {
  double r = 0.0;
  double max_dev = 0.0;
  double mean_dev = 0.0;
  std::size_t count = 0;
};

struct CompareReport {
  double max_dev = 0.0;
  double mean_dev = 0.0;
  std::size_t nodes = 0;
  double radius = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::vector<ShellDeviation> shells;
};

/// Node-wise |empirical - model| over nodes with |w| <= radius (all nodes
/// when radius <= 0), with shells of width 1 in |u| + |v|. Throws
/// ContractViolation when the grids differ in shape.
CompareReport compare_report(const Eigen::MatrixXcd &empirical, const CharFunGrid &model, double threshold,
                             double radius = 0.0);

std::string to_json(const CompareReport &report);

} // namespace mfun
