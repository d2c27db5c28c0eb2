#include "mfun/density.hpp"

#include "mfun/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <numbers>

namespace mfun {

namespace {

constexpr double kInv2Pi = 0.5 / std::numbers::pi;

std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}

void fnv_bytes(std::uint64_t &h, const void *data, std::size_t len) {
  const auto *p = static_cast<const unsigned char *>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

void fnv_axis(std::uint64_t &h, const Axis &a) {
  fnv_bytes(h, &a.start, sizeof a.start);
  fnv_bytes(h, &a.step, sizeof a.step);
  const std::uint64_t n = a.n;
  fnv_bytes(h, &n, sizeof n);
}

// Boundary nodes of a centered grid stand for both ends of the period;
// average each with the conjugate of its mirror image.
Eigen::MatrixXcd completed_values(const CharFunGrid &g) {
  Eigen::MatrixXcd m = g.values;
  if (!g.u.is_centered() || !g.v.is_centered())
    return m;
  const auto nu = static_cast<Eigen::Index>(g.u.n), nv = static_cast<Eigen::Index>(g.v.n);
  auto mirror = [](Eigen::Index i, Eigen::Index n) { return (n - i) % n; };
  for (Eigen::Index j = 0; j < nv; ++j)
    for (Eigen::Index i = 0; i < nu; ++i)
      if (i == 0 || j == 0)
        m(i, j) = 0.5 * (g.values(i, j) + std::conj(g.values(mirror(i, nu), mirror(j, nv))));
  return m;
}

// In-place 2D forward DFT (sign -1) of a column-major nu x nv matrix.
void fft2_forward(Eigen::MatrixXcd &a) {
  auto *buf = reinterpret_cast<fftw_complex *>(a.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_2d(static_cast<int>(a.cols()), static_cast<int>(a.rows()), buf, buf, FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  if (!plan)
    throw ResourceError("FFTW could not create a plan");
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

// out(k) = in((k + shift) mod n) along both axes.
Eigen::MatrixXcd roll(const Eigen::MatrixXcd &in, Eigen::Index su, Eigen::Index sv) {
  const Eigen::Index nu = in.rows(), nv = in.cols();
  Eigen::MatrixXcd out(nu, nv);
  for (Eigen::Index j = 0; j < nv; ++j)
    for (Eigen::Index i = 0; i < nu; ++i)
      out(i, j) = in((i + su) % nu, (j + sv) % nv);
  return out;
}

Eigen::MatrixXcd phase_matrix(const Axis &rows, const Axis &cols, double sign) {
  Eigen::MatrixXcd E(static_cast<Eigen::Index>(rows.n), static_cast<Eigen::Index>(cols.n));
  for (std::size_t k = 0; k < cols.n; ++k) {
    const double c = cols.at(k);
    for (std::size_t i = 0; i < rows.n; ++i) {
      const double ph = sign * rows.at(i) * c;
      E(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = {std::cos(ph), std::sin(ph)};
    }
  }
  return E;
}

double boundary_max(const Eigen::MatrixXcd &m) {
  const Eigen::Index nu = m.rows(), nv = m.cols();
  double b = 0.0;
  for (Eigen::Index i = 0; i < nu; ++i)
    b = std::max({b, std::abs(m(i, 0)), std::abs(m(i, nv - 1))});
  for (Eigen::Index j = 0; j < nv; ++j)
    b = std::max({b, std::abs(m(0, j)), std::abs(m(nu - 1, j))});
  return b;
}

} // namespace

std::string charfun_fingerprint(const CharFunGrid &grid) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  fnv_axis(h, grid.u);
  fnv_axis(h, grid.v);
  fnv_bytes(h, grid.values.data(), static_cast<std::size_t>(grid.values.size()) * sizeof(std::complex<double>));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Axis reciprocal_axis(const Axis &w) {
  if (w.n == 0 || !(w.step > 0.0))
    throw RangeError("reciprocal_axis: axis must be non-empty with positive step");
  const double dz = 2.0 * std::numbers::pi / (static_cast<double>(w.n) * w.step);
  return {-static_cast<double>(w.n / 2) * dz, dz, w.n};
}

DensityGrid invert_to_density(const CharFunGrid &grid, const InversionOptions &opts) {
  if (grid.values.size() == 0 || static_cast<std::size_t>(grid.values.rows()) != grid.u.n ||
      static_cast<std::size_t>(grid.values.cols()) != grid.v.n)
    throw ContractViolation("invert_to_density: grid values do not match the axes");
  const bool centered = grid.u.is_centered() && grid.v.is_centered();
  if (opts.convention != IndexConvention::dense && !centered)
    throw ContractViolation("invert_to_density: FFT conventions need centered axes of even size");

  DensityGrid out;
  out.meta.sigma = grid.meta.sigma;
  out.meta.flavor = grid.meta.flavor;
  out.meta.source_id = charfun_fingerprint(grid);
  out.meta.source_u = grid.u;
  out.meta.source_v = grid.v;
  out.meta.boundary_max = boundary_max(grid.values);
  if (out.meta.boundary_max >= opts.refuse_boundary)
    throw RangeError("invert_to_density: boundary |m| = " + std::to_string(out.meta.boundary_max) +
                     " is too large; widen the grid extent");
  if (out.meta.boundary_max >= opts.warn_boundary)
    out.meta.warnings.push_back("boundary |m| = " + std::to_string(out.meta.boundary_max) +
                                " exceeds " + std::to_string(opts.warn_boundary) + "; expect aliasing");

  out.x = reciprocal_axis(grid.u);
  out.y = reciprocal_axis(grid.v);
  const auto nu = static_cast<Eigen::Index>(grid.u.n), nv = static_cast<Eigen::Index>(grid.v.n);
  const double scale = kInv2Pi * grid.u.step * grid.v.step;
  const Eigen::MatrixXcd m = completed_values(grid);
  Eigen::MatrixXcd M;

  switch (opts.convention) {
  case IndexConvention::shifted: {
    M = roll(m, nu / 2, nv / 2);
    fft2_forward(M);
    M = roll(M, nu / 2, nv / 2);
    break;
  }
  case IndexConvention::twiddled: {
    M = m;
    for (Eigen::Index j = 0; j < nv; ++j)
      for (Eigen::Index i = 0; i < nu; ++i)
        if ((i + j) & 1)
          M(i, j) = -M(i, j);
    fft2_forward(M);
    const bool flip = ((nu / 2 + nv / 2) & 1) != 0;
    for (Eigen::Index j = 0; j < nv; ++j)
      for (Eigen::Index i = 0; i < nu; ++i)
        if ((((i + j) & 1) != 0) != flip)
          M(i, j) = -M(i, j);
    break;
  }
  case IndexConvention::dense: {
    const Eigen::MatrixXcd A = phase_matrix(out.x, grid.u, -1.0);
    const Eigen::MatrixXcd B = phase_matrix(out.y, grid.v, -1.0);
    M = A * m * B.transpose();
    break;
  }
  }
  M *= scale;

  out.values = M.real();
  out.meta.max_imag = M.imag().cwiseAbs().maxCoeff();
  out.meta.peak = out.values.maxCoeff();
  out.meta.max_imag_relative = out.meta.peak > 0.0 ? out.meta.max_imag / out.meta.peak : out.meta.max_imag;
  out.meta.min_value = std::min(0.0, out.values.minCoeff());
  out.meta.normalization = kInv2Pi * out.x.step * out.y.step * out.values.sum();
  out.meta.normalization_residual = std::abs(out.meta.normalization - 1.0);
  // Values within rounding of zero are recorded in min_value but not flagged.
  if (out.meta.min_value < -1e-12 * std::max(out.meta.peak, 1.0))
    out.meta.warnings.push_back("negative ringing down to " + std::to_string(out.meta.min_value));
  return out;
}

Eigen::MatrixXcd transform_back(const DensityGrid &density) {
  const Axis &u = density.meta.source_u;
  const Axis &v = density.meta.source_v;
  if (u.n == 0 || v.n == 0)
    throw ContractViolation("transform_back: density carries no source grid");
  const Eigen::MatrixXcd A = phase_matrix(u, density.x, 1.0);
  const Eigen::MatrixXcd B = phase_matrix(v, density.y, 1.0);
  const double scale = kInv2Pi * density.x.step * density.y.step;
  return scale * (A * density.values.cast<std::complex<double>>() * B.transpose());
}

IntegralResult integrate_against(const DensityGrid &density, const TestFunction &phi) {
  IntegralResult r;
  double sum = 0.0;
  for (std::size_t l = 0; l < density.y.n; ++l) {
    const double y = density.y.at(l);
    for (std::size_t k = 0; k < density.x.n; ++k)
      sum += phi(density.x.at(k), y) * density.values(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
  }
  r.value = kInv2Pi * density.x.step * density.y.step * sum;
  const double hx = 0.5 * density.x.step, hy = 0.5 * density.y.step;
  r.truncated_mass = phi.mass_outside(density.x.at(0) - hx, density.x.at(density.x.n - 1) + hx,
                                      density.y.at(0) - hy, density.y.at(density.y.n - 1) + hy);
  r.truncation_warning = r.truncated_mass > 1e-8;
  return r;
}

double fourier_pairing(const CharFunGrid &grid, const TestFunction &phi) {
  const Eigen::MatrixXcd ft = phi.transform_grid(grid.u, grid.v);
  const auto nu = static_cast<Eigen::Index>(grid.u.n), nv = static_cast<Eigen::Index>(grid.v.n);
  std::complex<double> sum = 0.0;
  if (grid.u.is_centered() && grid.v.is_centered()) {
    const Eigen::MatrixXcd m = completed_values(grid);
    for (Eigen::Index j = 0; j < nv; ++j)
      for (Eigen::Index i = 0; i < nu; ++i)
        sum += ft(i, j) * m((nu - i) % nu, (nv - j) % nv);
  } else {
    for (Eigen::Index j = 0; j < nv; ++j)
      for (Eigen::Index i = 0; i < nu; ++i)
        sum += ft(i, j) * std::conj(grid.values(i, j));
  }
  return (kInv2Pi * grid.u.step * grid.v.step * sum).real();
}

} // namespace mfun
