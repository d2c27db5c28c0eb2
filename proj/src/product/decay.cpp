#include "mfun/euler_product.hpp"

#include "mfun/error.hpp"

#include <algorithm>
#include <cmath>

namespace mfun {

DecayProfile decay_profile(const CharFunGrid &grid, double fit_r_min, double fit_r_max) {
  if (grid.values.size() == 0)
    throw ContractViolation("decay_profile: empty grid");
  DecayProfile prof;
  prof.fit_r_min = fit_r_min;
  prof.fit_r_max = fit_r_max;

  // Largest r whose whole diamond |u| + |v| <= r fits inside the grid.
  const double u_lo = grid.u.at(0), u_hi = grid.u.at(grid.u.n - 1);
  const double v_lo = grid.v.at(0), v_hi = grid.v.at(grid.v.n - 1);
  const double r_inside = std::min({-u_lo, u_hi, -v_lo, v_hi});
  const double h = std::max(std::abs(grid.u.step), std::abs(grid.v.step));
  // Shell k covers k <= r < k + 1; keep it when complete up to one grid step.
  if (r_inside + h < 1.0)
    throw ContractViolation("decay_profile: grid does not contain the first shell");
  const auto shell_count = static_cast<std::size_t>(std::floor(r_inside + h - 1.0)) + 1;
  prof.shells.resize(shell_count);
  for (std::size_t k = 0; k < shell_count; ++k)
    prof.shells[k].r = static_cast<double>(k);

  for (std::size_t j = 0; j < grid.v.n; ++j) {
    const double v = grid.v.at(j);
    for (std::size_t i = 0; i < grid.u.n; ++i) {
      const double r = std::abs(grid.u.at(i)) + std::abs(v);
      const auto k = static_cast<std::size_t>(std::floor(r));
      if (k >= shell_count)
        continue;
      auto &sh = prof.shells[k];
      sh.max_abs = std::max(sh.max_abs, std::abs(grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
      ++sh.count;
    }
  }

  bool crossed = false;
  double prev = 0.0;
  for (const auto &sh : prof.shells) {
    if (crossed && sh.max_abs > prev)
      prof.monotone = false;
    if (!crossed && sh.max_abs < 0.9)
      crossed = true;
    prev = sh.max_abs;
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  double last_in_range = 1.0;
  for (const auto &sh : prof.shells) {
    if (sh.r < fit_r_min || sh.r + 1.0 > fit_r_max || sh.count == 0)
      continue;
    last_in_range = sh.max_abs;
    if (!(sh.max_abs > 0.0) || !(sh.max_abs < 1.0))
      continue;
    const double x = std::log(sh.r);
    const double y = std::log(-std::log(sh.max_abs));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  prof.fit_points = n;
  if (n >= 3) {
    const double dn = static_cast<double>(n);
    const double den = dn * sxx - sx * sx;
    prof.fitted_slope = (dn * sxy - sx * sy) / den;
    prof.fitted_intercept = (sy - prof.fitted_slope * sx) / dn;
  }
  prof.inconclusive = n < 3 || last_in_range >= 0.5 || static_cast<double>(shell_count) < fit_r_max;
  return prof;
}

} // namespace mfun
