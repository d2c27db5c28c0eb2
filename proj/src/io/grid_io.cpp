#include "mfun/grid_io.hpp"

#include "mfun/error.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mfun {

namespace {

using ojson = nlohmann::ordered_json;

constexpr char kMagic[8] = {'M', 'F', 'U', 'N', 'G', 'R', 'I', 'D'};

template <class T> T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little)
    return v;
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
    std::swap(b[i], b[sizeof(T) - 1 - i]);
  std::memcpy(&v, b, sizeof(T));
  return v;
}

class Writer {
public:
  explicit Writer(const std::filesystem::path &path) : out_(path, std::ios::binary), path_(path) {
    if (!out_)
      throw ParseError("cannot open " + path.string() + " for writing");
  }
  template <class T> void put(T v) {
    v = to_little(v);
    out_.write(reinterpret_cast<const char *>(&v), sizeof v);
  }
  void bytes(const char *p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void close() {
    out_.close();
    if (!out_)
      throw ParseError("write to " + path_.string() + " failed");
  }

private:
  std::ofstream out_;
  std::filesystem::path path_;
};

class Reader {
public:
  explicit Reader(const std::filesystem::path &path) : in_(path, std::ios::binary), path_(path) {
    if (!in_)
      throw ParseError("cannot open " + path.string());
  }
  template <class T> T get() {
    T v;
    in_.read(reinterpret_cast<char *>(&v), sizeof v);
    if (!in_)
      throw ParseError(path_.string() + ": truncated grid file");
    return to_little(v);
  }
  std::string bytes(std::size_t n) {
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (!in_)
      throw ParseError(path_.string() + ": truncated grid file");
    return s;
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }
  const std::filesystem::path &path() const { return path_; }

private:
  std::ifstream in_;
  std::filesystem::path path_;
};

ojson axis_json(const Axis &a) { return ojson{{"start", a.start}, {"step", a.step}, {"n", a.n}}; }
Axis axis_from(const nlohmann::json &j) {
  return {j.at("start").get<double>(), j.at("step").get<double>(), j.at("n").get<std::size_t>()};
}

void write_header(Writer &w, GridKind kind, const Axis &x, const Axis &y, const std::string &meta) {
  w.bytes(kMagic, sizeof kMagic);
  w.put<std::uint32_t>(kGridFormatVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(kind));
  w.put<std::uint64_t>(x.n);
  w.put<std::uint64_t>(y.n);
  w.put<double>(x.start);
  w.put<double>(x.step);
  w.put<double>(y.start);
  w.put<double>(y.step);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(meta.size()));
  w.bytes(meta.data(), meta.size());
}

struct Header {
  Axis x, y;
  nlohmann::json meta;
};

Header read_header(Reader &r, GridKind expected) {
  const std::string magic = r.bytes(sizeof kMagic);
  if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0)
    throw ParseError(r.path().string() + ": not a grid file (bad magic)");
  const auto version = r.get<std::uint32_t>();
  if (version != kGridFormatVersion)
    throw ParseError(r.path().string() + ": unsupported grid format version " + std::to_string(version));
  const auto kind = r.get<std::uint32_t>();
  if (kind != static_cast<std::uint32_t>(expected))
    throw ParseError(r.path().string() + ": grid kind " + std::to_string(kind) + " where " +
                     std::to_string(static_cast<std::uint32_t>(expected)) + " was expected");
  Header h;
  h.x.n = r.get<std::uint64_t>();
  h.y.n = r.get<std::uint64_t>();
  h.x.start = r.get<double>();
  h.x.step = r.get<double>();
  h.y.start = r.get<double>();
  h.y.step = r.get<double>();
  if (h.x.n == 0 || h.y.n == 0 || h.x.n > (1u << 16) || h.y.n > (1u << 16))
    throw ParseError(r.path().string() + ": implausible grid dimensions");
  const auto len = r.get<std::uint32_t>();
  const std::string meta = r.bytes(len);
  try {
    h.meta = nlohmann::json::parse(meta);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(r.path().string() + ": bad metadata: " + e.what());
  }
  return h;
}

std::ofstream open_text(const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ParseError("cannot open " + path.string() + " for writing");
  return out;
}

} // namespace

std::string charfun_meta_json(const CharFunMeta &m) {
  ojson j;
  j["sigma"] = m.sigma;
  j["prime_cutoff"] = m.prime_cutoff;
  j["prime_count"] = m.prime_count;
  j["tail_tol"] = m.tail_tol;
  j["max_tail_effect"] = m.max_tail_effect;
  j["corner_tail_bound"] = m.corner_tail_bound;
  j["extent"] = m.extent;
  j["flavor"] = m.flavor;
  j["degree_bound"] = m.degree_bound;
  j["unconverged_primes"] = m.unconverged_primes;
  j["max_quad_change"] = m.max_quad_change;
  j["max_nodes_used"] = m.max_nodes_used;
  return j.dump();
}

std::string density_meta_json(const DensityMeta &m) {
  ojson j;
  j["sigma"] = m.sigma;
  j["flavor"] = m.flavor;
  j["source_id"] = m.source_id;
  j["source_u"] = axis_json(m.source_u);
  j["source_v"] = axis_json(m.source_v);
  j["normalization"] = m.normalization;
  j["normalization_residual"] = m.normalization_residual;
  j["max_imag"] = m.max_imag;
  j["peak"] = m.peak;
  j["max_imag_relative"] = m.max_imag_relative;
  j["min_value"] = m.min_value;
  j["boundary_max"] = m.boundary_max;
  j["warnings"] = m.warnings;
  return j.dump();
}

void write_charfun_binary(const CharFunGrid &grid, const std::filesystem::path &path) {
  Writer w(path);
  write_header(w, GridKind::charfun, grid.u, grid.v, charfun_meta_json(grid.meta));
  for (Eigen::Index j = 0; j < grid.values.cols(); ++j)
    for (Eigen::Index i = 0; i < grid.values.rows(); ++i) {
      w.put<double>(grid.values(i, j).real());
      w.put<double>(grid.values(i, j).imag());
    }
  w.close();
}

void write_density_binary(const DensityGrid &grid, const std::filesystem::path &path) {
  Writer w(path);
  write_header(w, GridKind::density, grid.x, grid.y, density_meta_json(grid.meta));
  for (Eigen::Index j = 0; j < grid.values.cols(); ++j)
    for (Eigen::Index i = 0; i < grid.values.rows(); ++i)
      w.put<double>(grid.values(i, j));
  w.close();
}

CharFunGrid read_charfun_binary(const std::filesystem::path &path) {
  Reader r(path);
  Header h = read_header(r, GridKind::charfun);
  CharFunGrid g;
  g.u = h.x;
  g.v = h.y;
  try {
    const auto &m = h.meta;
    g.meta.sigma = m.at("sigma").get<double>();
    g.meta.prime_cutoff = m.at("prime_cutoff").get<std::uint64_t>();
    g.meta.prime_count = m.at("prime_count").get<std::size_t>();
    g.meta.tail_tol = m.at("tail_tol").get<double>();
    g.meta.max_tail_effect = m.at("max_tail_effect").get<double>();
    g.meta.corner_tail_bound = m.at("corner_tail_bound").get<double>();
    g.meta.extent = m.at("extent").get<double>();
    g.meta.flavor = m.at("flavor").get<std::string>();
    g.meta.degree_bound = m.at("degree_bound").get<int>();
    g.meta.unconverged_primes = m.at("unconverged_primes").get<std::size_t>();
    g.meta.max_quad_change = m.at("max_quad_change").get<double>();
    g.meta.max_nodes_used = m.at("max_nodes_used").get<std::size_t>();
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(path.string() + ": bad metadata: " + e.what());
  }
  g.values.resize(static_cast<Eigen::Index>(h.x.n), static_cast<Eigen::Index>(h.y.n));
  for (Eigen::Index j = 0; j < g.values.cols(); ++j)
    for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
      const double re = r.get<double>();
      const double im = r.get<double>();
      g.values(i, j) = {re, im};
    }
  if (!r.at_end())
    throw ParseError(path.string() + ": trailing bytes after grid payload");
  return g;
}

DensityGrid read_density_binary(const std::filesystem::path &path) {
  Reader r(path);
  Header h = read_header(r, GridKind::density);
  DensityGrid g;
  g.x = h.x;
  g.y = h.y;
  try {
    const auto &m = h.meta;
    g.meta.sigma = m.at("sigma").get<double>();
    g.meta.flavor = m.at("flavor").get<std::string>();
    g.meta.source_id = m.at("source_id").get<std::string>();
    g.meta.source_u = axis_from(m.at("source_u"));
    g.meta.source_v = axis_from(m.at("source_v"));
    g.meta.normalization = m.at("normalization").get<double>();
    g.meta.normalization_residual = m.at("normalization_residual").get<double>();
    g.meta.max_imag = m.at("max_imag").get<double>();
    g.meta.peak = m.at("peak").get<double>();
    g.meta.max_imag_relative = m.at("max_imag_relative").get<double>();
    g.meta.min_value = m.at("min_value").get<double>();
    g.meta.boundary_max = m.at("boundary_max").get<double>();
    g.meta.warnings = m.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(path.string() + ": bad metadata: " + e.what());
  }
  g.values.resize(static_cast<Eigen::Index>(h.x.n), static_cast<Eigen::Index>(h.y.n));
  for (Eigen::Index j = 0; j < g.values.cols(); ++j)
    for (Eigen::Index i = 0; i < g.values.rows(); ++i)
      g.values(i, j) = r.get<double>();
  if (!r.at_end())
    throw ParseError(path.string() + ": trailing bytes after grid payload");
  return g;
}

void write_charfun_csv(const CharFunGrid &grid, const std::filesystem::path &path) {
  auto out = open_text(path);
  out << "# sigma=" << format_double(grid.meta.sigma) << "\n"
      << "# prime_cutoff=" << grid.meta.prime_cutoff << "\n"
      << "# tail_tol=" << format_double(grid.meta.tail_tol) << "\n"
      << "# max_tail_effect=" << format_double(grid.meta.max_tail_effect) << "\n"
      << "# flavor=" << grid.meta.flavor << "\n"
      << "u,v,re_m,im_m\n";
  for (Eigen::Index j = 0; j < grid.values.cols(); ++j)
    for (Eigen::Index i = 0; i < grid.values.rows(); ++i)
      out << format_double(grid.u.at(static_cast<std::size_t>(i))) << ','
          << format_double(grid.v.at(static_cast<std::size_t>(j))) << ',' << format_double(grid.values(i, j).real())
          << ',' << format_double(grid.values(i, j).imag()) << '\n';
}

void write_density_csv(const DensityGrid &grid, const std::filesystem::path &path) {
  auto out = open_text(path);
  out << "# sigma=" << format_double(grid.meta.sigma) << "\n"
      << "# flavor=" << grid.meta.flavor << "\n"
      << "# source_id=" << grid.meta.source_id << "\n"
      << "# normalization=" << format_double(grid.meta.normalization) << "\n"
      << "# normalization_residual=" << format_double(grid.meta.normalization_residual) << "\n"
      << "# max_imag_relative=" << format_double(grid.meta.max_imag_relative) << "\n"
      << "# min_value=" << format_double(grid.meta.min_value) << "\n"
      << "x,y,M\n";
  for (Eigen::Index l = 0; l < grid.values.cols(); ++l)
    for (Eigen::Index k = 0; k < grid.values.rows(); ++k)
      out << format_double(grid.x.at(static_cast<std::size_t>(k))) << ','
          << format_double(grid.y.at(static_cast<std::size_t>(l))) << ',' << format_double(grid.values(k, l))
          << '\n';
}

void write_samples_csv(const SampleSeries &s, const std::filesystem::path &path) {
  auto out = open_text(path);
  out << "# sigma=" << format_double(s.config.sigma) << "\n"
      << "# T=" << format_double(s.config.T) << "\n"
      << "# x=" << format_double(s.config.x) << "\n"
      << "# mode=" << to_string(s.config.mode) << "\n"
      << "# seed=" << s.config.seed << (s.config.jitter ? " (jittered)" : "") << "\n"
      << "# flavor=" << s.flavor << "\n"
      << "t,re,im\n";
  for (std::size_t k = 0; k < s.values.size(); ++k)
    out << format_double(s.t_values[k]) << ',' << format_double(s.values[k].real()) << ','
        << format_double(s.values[k].imag()) << '\n';
}

void write_matrix_csv(const Eigen::MatrixXcd &values, const Axis &u, const Axis &v, const std::string &header,
                      const std::filesystem::path &path) {
  auto out = open_text(path);
  std::istringstream lines(header);
  for (std::string line; std::getline(lines, line);)
    out << "# " << line << "\n";
  out << "u,v,re,im\n";
  for (Eigen::Index j = 0; j < values.cols(); ++j)
    for (Eigen::Index i = 0; i < values.rows(); ++i)
      out << format_double(u.at(static_cast<std::size_t>(i))) << ',' << format_double(v.at(static_cast<std::size_t>(j)))
          << ',' << format_double(values(i, j).real()) << ',' << format_double(values(i, j).imag()) << '\n';
}

} // namespace mfun
