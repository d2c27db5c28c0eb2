#pragma once

#include "mfun/density.hpp"
#include "mfun/empirical.hpp"
#include "mfun/euler_product.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace mfun {

/// Shortest-safe round-trip text for a double ("%.17g").
std::string format_double(double x);

// Binary grid layout, all little-endian:
//   char[8]  "MFUNGRID"
//   u32      format version (1)
//   u32      kind: 1 characteristic function, 2 density
//   u64      nx, ny
//   f64      x0, dx, y0, dy
//   u32      length of the JSON metadata that follows, then its bytes
//   payload  column-major over (x, y): re, im pairs (kind 1) or values (kind 2)
inline constexpr std::uint32_t kGridFormatVersion = 1;
enum class GridKind : std::uint32_t { charfun = 1, density = 2 };

void write_charfun_binary(const CharFunGrid &grid, const std::filesystem::path &path);
void write_density_binary(const DensityGrid &grid, const std::filesystem::path &path);
/// Throws ParseError on a bad header, kind mismatch or truncated payload.
CharFunGrid read_charfun_binary(const std::filesystem::path &path);
DensityGrid read_density_binary(const std::filesystem::path &path);

/// Columns u, v, re_m, im_m after '#' metadata lines.
void write_charfun_csv(const CharFunGrid &grid, const std::filesystem::path &path);
/// Columns x, y, M after '#' metadata lines.
void write_density_csv(const DensityGrid &grid, const std::filesystem::path &path);
/// Columns t, re, im after '#' metadata lines.
void write_samples_csv(const SampleSeries &samples, const std::filesystem::path &path);
/// Columns u, v, re, im for an arbitrary matrix on the given axes.
void write_matrix_csv(const Eigen::MatrixXcd &values, const Axis &u, const Axis &v,
                      const std::string &header, const std::filesystem::path &path);

std::string charfun_meta_json(const CharFunMeta &meta);
std::string density_meta_json(const DensityMeta &meta);

} // namespace mfun
