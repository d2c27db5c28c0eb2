#include "mfun/local_factor.hpp"

#include "mfun/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mfun {

void LocalEvalConfig::validate() const {
  if (!(sigma > 0.5))
    throw RangeError("sigma must exceed 1/2");
  if (!(m_tail_tol > 0.0) || !(quad_tol > 0.0))
    throw RangeError("tolerances must be positive");
  if (max_nodes < kInitialNodes || (max_nodes & (max_nodes - 1)) != 0)
    throw RangeError("max_nodes must be a power of two >= 64");
}

double TruncatedApSeries::square_sum() const {
  double s = 0.0;
  for (std::size_t i = 0; i < real_coeffs.size(); ++i)
    s += real_coeffs[i] * real_coeffs[i] + imag_coeffs[i] * imag_coeffs[i];
  return s;
}

TruncatedApSeries build_ap_series(const LambdaSeries &series, std::uint64_t p, const LocalEvalConfig &cfg) {
  cfg.validate();
  const double dp = static_cast<double>(p);
  const double logp = std::log(dp);
  const double d = series.degree_bound();
  const double q = std::pow(dp, -cfg.sigma);

  TruncatedApSeries out;
  out.p = p;
  out.sigma = cfg.sigma;
  // Smallest M with d log p q^(M+1) / (1 - q) < tol.
  int M = 1;
  double bound = d * logp * q * q / (1.0 - q);
  while (!(bound < cfg.m_tail_tol)) {
    ++M;
    bound *= q;
  }
  out.M_max = M;
  out.tail_bound = bound;
  out.real_coeffs.resize(static_cast<std::size_t>(M));
  out.imag_coeffs.resize(static_cast<std::size_t>(M));
  for (int m = 1; m <= M; ++m) {
    const std::complex<double> c = series.value(p, m) * std::pow(dp, -m * cfg.sigma);
    out.real_coeffs[static_cast<std::size_t>(m - 1)] = c.real();
    out.imag_coeffs[static_cast<std::size_t>(m - 1)] = c.imag();
  }
  return out;
}

namespace {

// -sum c_m q^m with q = e^(2 pi i t), by Horner.
std::complex<double> ap_complex(const TruncatedApSeries &s, double t) {
  const double angle = 2.0 * std::numbers::pi * t;
  const std::complex<double> q(std::cos(angle), std::sin(angle));
  std::complex<double> acc = 0.0;
  for (int m = s.M_max; m >= 1; --m)
    acc = acc * q + s.coeff(m);
  return -(acc * q);
}

// Sum of the integrand over nodes (2j + offset) / (2 half) for j < half,
// i.e. all nodes of the N-rule (offset 0, stride 1) or just the odd ones.
std::complex<double> node_sum(const TruncatedApSeries &s, double u, double v, std::size_t count,
                              std::size_t denom, std::size_t first, std::size_t stride) {
  std::complex<double> sum = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double t = static_cast<double>(first + j * stride) / static_cast<double>(denom);
    const auto z = ap_complex(s, t);
    const double phase = u * z.real() + v * z.imag();
    sum += std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return sum;
}

std::complex<double> clamp_unit(std::complex<double> z, double slack) {
  const double a = std::abs(z);
  if (a > 1.0 + slack)
    return z * ((1.0 + slack) / a);
  return z;
}

} // namespace

ApPair eval_ap(const TruncatedApSeries &series, double t) {
  const auto z = ap_complex(series, t);
  return {z.real(), z.imag()};
}

std::complex<double> local_factor_fixed(const TruncatedApSeries &series, double u, double v,
                                        std::size_t nodes) {
  if (nodes == 0)
    throw ContractViolation("local_factor_fixed: nodes must be positive");
  return node_sum(series, u, v, nodes, nodes, 0, 1) / static_cast<double>(nodes);
}

LocalFactorResult local_factor(const TruncatedApSeries &series, double u, double v,
                               const LocalEvalConfig &cfg) {
  if (!std::isfinite(u) || !std::isfinite(v))
    throw RangeError("local_factor: u and v must be finite");
  LocalFactorResult r;
  if (u == 0.0 && v == 0.0) {
    r.value = 1.0;
    r.nodes = kInitialNodes;
    return r;
  }
  std::size_t n = kInitialNodes;
  std::complex<double> sum = node_sum(series, u, v, n, n, 0, 1);
  std::complex<double> value = sum / static_cast<double>(n);
  r.converged = false;
  while (n < cfg.max_nodes) {
    // The 2N rule reuses the N nodes and adds the N odd ones.
    sum += node_sum(series, u, v, n, 2 * n, 1, 2);
    n *= 2;
    const std::complex<double> next = sum / static_cast<double>(n);
    r.last_change = std::abs(next - value);
    value = next;
    if (r.last_change < cfg.quad_tol) {
      r.converged = true;
      break;
    }
  }
  r.value = clamp_unit(value, cfg.quad_tol);
  r.nodes = n;
  return r;
}

double second_moment_proxy(const TruncatedApSeries &series, double u, double v) {
  return 0.25 * (u * u + v * v) * series.square_sum();
}

std::complex<double> log_local_factor(const TruncatedApSeries &series, double u, double v,
                                      const LocalEvalConfig &cfg) {
  const double mu = second_moment_proxy(series, u, v);
  if (!(mu < 0.25))
    throw RegimeError("log_local_factor: mu = " + std::to_string(mu) + " is not below 1/4 at p=" +
                      std::to_string(series.p));
  if (u == 0.0 && v == 0.0)
    return 0.0;
  return std::log(local_factor(series, u, v, cfg).value);
}

double log_local_factor_fast(const TruncatedApSeries &series, double u, double v) {
  const double mu = second_moment_proxy(series, u, v);
  if (!(mu < 0.25))
    throw RegimeError("log_local_factor_fast: mu = " + std::to_string(mu) + " is not below 1/4 at p=" +
                      std::to_string(series.p));
  return -mu;
}

namespace {

// Adds exp(i x_r y_c) over the requested nodes into an (rows x nodes) matrix.
void fill_phases(Eigen::MatrixXcd &out, std::span<const double> axis, const std::vector<double> &a) {
  out.resize(static_cast<Eigen::Index>(axis.size()), static_cast<Eigen::Index>(a.size()));
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double aj = a[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const double phase = axis[static_cast<std::size_t>(i)] * aj;
      out(i, j) = {std::cos(phase), std::sin(phase)};
    }
  }
}

Eigen::MatrixXcd grid_node_sum(const TruncatedApSeries &s, std::span<const double> u,
                               std::span<const double> v, std::size_t count, std::size_t denom,
                               std::size_t first, std::size_t stride) {
  std::vector<double> a1(count), a2(count);
  for (std::size_t j = 0; j < count; ++j) {
    const auto z = ap_complex(s, static_cast<double>(first + j * stride) / static_cast<double>(denom));
    a1[j] = z.real();
    a2[j] = z.imag();
  }
  Eigen::MatrixXcd E1, E2;
  fill_phases(E1, u, a1);
  fill_phases(E2, v, a2);
  return E1 * E2.transpose();
}

} // namespace

namespace {

// Indices {0} and [n/2, n) of an axis whose node n - i mirrors node i
// (node n/2 at zero); empty when the axis lacks that symmetry.
std::vector<std::size_t> mirror_half(std::span<const double> axis) {
  const std::size_t n = axis.size();
  if (n < 2 || n % 2 != 0)
    return {};
  const double step = axis[1] - axis[0];
  const double tol = 1e-12 * std::abs(step) * static_cast<double>(n);
  if (std::abs(axis[n / 2]) > tol)
    return {};
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(axis[i] + axis[n - i]) > tol)
      return {};
  std::vector<std::size_t> keep{0};
  for (std::size_t i = n / 2; i < n; ++i)
    keep.push_back(i);
  return keep;
}

std::vector<double> pick(std::span<const double> axis, const std::vector<std::size_t> &idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (auto i : idx)
    out.push_back(axis[i]);
  return out;
}

FactorGridResult factor_grid_direct(const TruncatedApSeries &series, std::span<const double> u,
                                    std::span<const double> v, const LocalEvalConfig &cfg) {
  FactorGridResult r;
  std::size_t n = kInitialNodes;
  Eigen::MatrixXcd sum = grid_node_sum(series, u, v, n, n, 0, 1);
  Eigen::MatrixXcd value = sum / static_cast<double>(n);
  r.converged = false;
  while (n < cfg.max_nodes) {
    sum += grid_node_sum(series, u, v, n, 2 * n, 1, 2);
    n *= 2;
    Eigen::MatrixXcd next = sum / static_cast<double>(n);
    r.last_change = (next - value).cwiseAbs().maxCoeff();
    value = std::move(next);
    if (r.last_change < cfg.quad_tol) {
      r.converged = true;
      break;
    }
  }
  const double cap = 1.0 + cfg.quad_tol;
  for (Eigen::Index k = 0; k < value.cols(); ++k)
    for (Eigen::Index i = 0; i < value.rows(); ++i) {
      const double a = std::abs(value(i, k));
      if (a > cap)
        value(i, k) *= cap / a;
    }
  r.values = std::move(value);
  r.nodes = n;
  return r;
}

} // namespace

FactorGridResult local_factor_grid(const TruncatedApSeries &series, std::span<const double> u,
                                   std::span<const double> v, const LocalEvalConfig &cfg) {
  const bool real = std::all_of(series.imag_coeffs.begin(), series.imag_coeffs.end(),
                                [](double c) { return c == 0.0; });
  const auto rows = real ? mirror_half(u) : std::vector<std::size_t>{};
  const auto cols = real ? mirror_half(v) : std::vector<std::size_t>{};
  if (rows.empty() && cols.empty())
    return factor_grid_direct(series, u, v, cfg);

  // For real coefficients the uniform rule satisfies m(u, -v) = m(u, v) and
  // m(-u, v) = conj m(u, v) node for node, so one quadrant determines the rest.
  const auto ur = rows.empty() ? std::vector<double>(u.begin(), u.end()) : pick(u, rows);
  const auto vr = cols.empty() ? std::vector<double>(v.begin(), v.end()) : pick(v, cols);
  FactorGridResult part = factor_grid_direct(series, ur, vr, cfg);

  const auto nu = static_cast<Eigen::Index>(u.size()), nv = static_cast<Eigen::Index>(v.size());
  Eigen::MatrixXcd full(nu, nv);
  auto row_slot = [&](Eigen::Index i) -> std::pair<Eigen::Index, bool> {
    if (rows.empty())
      return {i, false};
    if (i == 0)
      return {0, false};
    if (i >= nu / 2)
      return {i - nu / 2 + 1, false};
    return {nu - i - nu / 2 + 1, true};
  };
  auto col_slot = [&](Eigen::Index j) -> Eigen::Index {
    if (cols.empty())
      return j;
    if (j == 0)
      return 0;
    if (j >= nv / 2)
      return j - nv / 2 + 1;
    return nv - j - nv / 2 + 1;
  };
  for (Eigen::Index j = 0; j < nv; ++j) {
    const Eigen::Index cj = col_slot(j);
    for (Eigen::Index i = 0; i < nu; ++i) {
      const auto [ri, conj] = row_slot(i);
      const auto val = part.values(ri, cj);
      full(i, j) = conj ? std::conj(val) : val;
    }
  }
  part.values = std::move(full);
  return part;
}

} // namespace mfun
