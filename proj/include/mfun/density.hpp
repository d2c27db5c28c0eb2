#pragma once

#include "mfun/euler_product.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace mfun {

/// Test function Phi on the z-plane together with its transform
/// Phi~(w) = int Phi(z) psi_w(z) |dz|, psi_w(z) = exp(i <z, w>),
/// |dz| = dx dy / (2 pi).
class TestFunction {
public:
  struct Gaussian {
    std::complex<double> center;
    double width;
    double amplitude;
  };
  /// Product of two erf ramps: the indicator of [x0,x1] x [y0,y1] blurred
  /// by a gaussian of standard deviation `smoothing`.
  struct SmoothedRectangle {
    double x0, x1, y0, y1;
    double smoothing;
  };
  /// Node values, bilinear in between, falling linearly to zero one step
  /// beyond the outer nodes (a sum of tensor hat functions).
  struct CustomGrid {
    Axis x;
    Axis y;
    Eigen::MatrixXd values;
  };
  struct Zero {};
  using Kind = std::variant<Gaussian, SmoothedRectangle, CustomGrid, Zero>;

  /// amplitude * exp(-|z - center|^2 / (2 width^2)).
  static TestFunction gaussian(std::complex<double> center, double width, double amplitude = 1.0);
  static TestFunction smoothed_rectangle(double x0, double x1, double y0, double y1, double smoothing);
  static TestFunction custom_grid(Axis x, Axis y, Eigen::MatrixXd values);
  static TestFunction zero();

  double operator()(double x, double y) const;
  double operator()(std::complex<double> z) const { return (*this)(z.real(), z.imag()); }
  std::complex<double> transform(double u, double v) const;
  /// transform(u_i, v_j) for all grid nodes.
  Eigen::MatrixXcd transform_grid(const Axis &u, const Axis &v) const;
  /// int |Phi| |dz| over the plane.
  double total_mass() const;
  /// int |Phi| |dz| outside [x0, x1] x [y0, y1].
  double mass_outside(double x0, double x1, double y0, double y1) const;
  std::string describe() const;
  const Kind &kind() const noexcept { return kind_; }

private:
  explicit TestFunction(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

enum class IndexConvention {
  shifted,  ///< ifftshift, FFT, fftshift
  twiddled, ///< natural order with (-1)^(i+j) phases before and after
  dense,    ///< explicit separable sums, any uniform axes
};

struct InversionOptions {
  IndexConvention convention = IndexConvention::shifted;
  /// Refuse when the largest boundary |m| reaches this.
  double refuse_boundary = 0.1;
  /// Warn when the largest boundary |m| reaches this.
  double warn_boundary = 1e-3;
};

struct DensityMeta {
  double sigma = 0.0;
  std::string flavor;
  std::string source_id;
  Axis source_u;
  Axis source_v;
  /// int M |dz| after projection to the real part.
  double normalization = 0.0;
  double normalization_residual = 0.0;
  double max_imag = 0.0;
  double peak = 0.0;
  /// max_imag / peak.
  double max_imag_relative = 0.0;
  /// Most negative value (ringing); 0 when M >= 0 everywhere.
  double min_value = 0.0;
  double boundary_max = 0.0;
  std::vector<std::string> warnings;
};

/// Samples of M(x + iy); values(k, l) belongs to (x.at(k), y.at(l)).
struct DensityGrid {
  Axis x;
  Axis y;
  Eigen::MatrixXd values;
  DensityMeta meta;
};

/// Stable 16-hex-digit fingerprint of a grid's axes and values.
std::string charfun_fingerprint(const CharFunGrid &grid);

/// z-axis reciprocal to a w-axis: step 2 pi / (n step_w), node n/2 at 0.
Axis reciprocal_axis(const Axis &w);

/// M(z) = int m(w) psi_(-z)(w) |dw| by the discrete separable transform.
/// Boundary nodes of a centered grid are averaged with their conjugate
/// mirror images (the periodic trapezoid rule). Throws RangeError when
/// the boundary |m| reaches refuse_boundary.
DensityGrid invert_to_density(const CharFunGrid &grid, const InversionOptions &opts = {});

/// m(w) = int M(z) psi_w(z) |dz| on the source w-grid of the density.
Eigen::MatrixXcd transform_back(const DensityGrid &density);

struct IntegralResult {
  double value = 0.0;
  /// Mass of |Phi| that falls outside the density grid.
  double truncated_mass = 0.0;
  bool truncation_warning = false;
};

/// int Phi M |dz| by the grid rule.
IntegralResult integrate_against(const DensityGrid &density, const TestFunction &phi);

/// Re int Phi~(w) m(-w) |dw| on the w-grid.
double fourier_pairing(const CharFunGrid &grid, const TestFunction &phi);

} // namespace mfun
