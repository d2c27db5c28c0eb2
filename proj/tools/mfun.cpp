// mfun: command-line front end for splitting tables, M-function grids,
// densities, empirical samples, comparisons and decay tables.

#include "mfun/arith.hpp"
#include "mfun/density.hpp"
#include "mfun/empirical.hpp"
#include "mfun/error.hpp"
#include "mfun/euler_product.hpp"
#include "mfun/grid_io.hpp"
#include "mfun/lambda_series.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>
#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifndef MFUN_VERSION
#define MFUN_VERSION "unknown"
#endif

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace mfun;

enum ExitCode { kPass = 0, kUsage = 1, kCheckFailed = 2, kWarning = 3 };

struct Outcome {
  std::vector<std::string> outputs; // file names inside the output directory
  std::vector<std::string> inputs;  // absolute paths
  std::vector<std::string> warnings;
  bool check_failed = false;
};

std::string sha256_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ParseError("cannot open " + path.string() + " for hashing");
  EVP_MD_CTX *ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string absolute_path(const std::string &p) { return fs::absolute(p).lexically_normal().string(); }

void write_json(const json &j, const fs::path &path) {
  std::ofstream out(path);
  if (!out)
    throw ParseError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

json read_json(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void check_sigma(double sigma) {
  if (!(sigma > 0.5))
    throw RangeError("sigma must exceed 1/2 (got " + format_double(sigma) + ")");
}

// ---- commands ---------------------------------------------------------------

Outcome run_split(const json &p, const fs::path &out) {
  Outcome o;
  const std::string spec = p.at("spec");
  o.inputs.push_back(spec);
  const NumberField field = load_field_spec(spec);
  const auto limit = p.at("limit").get<std::uint64_t>();
  const PrimeTable primes = sieve_primes(limit);
  std::ofstream csv(out / "split.csv");
  csv << "# field=" << field.label() << "\n# degree=" << field.degree() << "\np,pattern,exact\n";
  std::size_t inexact = 0;
  for (auto q : primes) {
    const auto st = field.splitting_type(q);
    csv << q << ",\"" << st.to_string() << "\"," << (st.exact ? "true" : "false") << '\n';
    inexact += st.exact ? 0 : 1;
  }
  o.outputs.push_back("split.csv");
  if (inexact)
    o.warnings.push_back(std::to_string(inexact) + " primes use the squarefree fallback (exact=false)");
  if (field.irreducibility_hint() == IrreducibilityHint::reducible)
    o.warnings.push_back("defining polynomial has a rational root");
  std::cout << field.label() << ": " << primes.size() << " primes up to " << limit << "\n";
  return o;
}

Outcome run_mfun(const json &p, const fs::path &out) {
  Outcome o;
  const std::string spec = p.at("spec");
  o.inputs.push_back(spec);
  const LambdaSeries series = load_series_spec(spec);
  ProductConfig cfg;
  cfg.sigma = p.at("sigma");
  check_sigma(cfg.sigma);
  cfg.prime_cutoff = p.at("cutoff");
  cfg.tail_tol = p.at("tail_tol");
  cfg.local.quad_tol = p.at("quad_tol");
  cfg.local.max_nodes = p.at("max_nodes");
  const auto grid = charfun_grid(series, p.at("extent"), p.at("n"), cfg);
  write_charfun_csv(grid, out / "charfun.csv");
  write_charfun_binary(grid, out / "charfun.bin");
  o.outputs = {"charfun.csv", "charfun.bin"};

  const auto c = static_cast<Eigen::Index>(grid.u.n / 2);
  const double origin_err = std::abs(grid.values(c, c) - 1.0);
  std::cout << series.flavor() << " sigma=" << format_double(cfg.sigma) << " P=" << grid.meta.prime_cutoff
            << " primes=" << grid.meta.prime_count << " tail_effect=" << format_double(grid.meta.max_tail_effect)
            << "\n|m(0,0) - 1| = " << format_double(origin_err) << "\n";
  if (origin_err > 1e-6) {
    std::cerr << "check failed: m(0,0) differs from 1 by " << origin_err << "\n";
    o.check_failed = true;
  }
  if (grid.meta.unconverged_primes)
    o.warnings.push_back(std::to_string(grid.meta.unconverged_primes) +
                         " local factors hit max_nodes before converging");
  return o;
}

IndexConvention parse_convention(const std::string &s) {
  if (s == "shifted")
    return IndexConvention::shifted;
  if (s == "twiddled")
    return IndexConvention::twiddled;
  if (s == "dense")
    return IndexConvention::dense;
  throw RangeError("unknown index convention '" + s + "'");
}

Outcome run_density(const json &p, const fs::path &out) {
  Outcome o;
  const std::string in = p.at("charfun");
  o.inputs.push_back(in);
  const auto grid = read_charfun_binary(in);
  InversionOptions opts;
  opts.convention = parse_convention(p.at("convention"));
  const auto d = invert_to_density(grid, opts);
  write_density_csv(d, out / "density.csv");
  write_density_binary(d, out / "density.bin");
  o.outputs = {"density.csv", "density.bin"};
  const double tol = p.at("norm_tol");
  std::cout << "normalization " << format_double(d.meta.normalization) << " (residual "
            << format_double(d.meta.normalization_residual) << ", tolerance " << format_double(tol) << ")\n"
            << "max imaginary part / peak " << format_double(d.meta.max_imag_relative) << "\n"
            << "min value " << format_double(d.meta.min_value) << "\n";
  if (!(d.meta.normalization_residual < tol)) {
    std::cerr << "check failed: normalization residual exceeds tolerance\n";
    o.check_failed = true;
  }
  o.warnings = d.meta.warnings;
  return o;
}

Outcome run_empirical(const json &p, const fs::path &out) {
  Outcome o;
  const std::string spec = p.at("spec");
  o.inputs.push_back(spec);
  const LambdaSeries series = load_series_spec(spec);
  SamplerConfig cfg;
  cfg.sigma = p.at("sigma");
  check_sigma(cfg.sigma);
  cfg.T = p.at("T");
  cfg.n_samples = p.at("samples");
  cfg.x = p.at("x");
  cfg.mode = parse_truncation_mode(p.at("mode"));
  cfg.seed = p.at("seed");
  cfg.jitter = p.at("jitter");
  const auto samples = sample_line(series, cfg);
  const auto axis = Axis::centered(p.at("extent"), p.at("n"));

  CharFunGrid emp;
  emp.u = emp.v = axis;
  emp.values = empirical_charfun(samples, axis, axis);
  emp.meta.sigma = cfg.sigma;
  emp.meta.extent = p.at("extent");
  emp.meta.flavor = "empirical:" + series.flavor();
  emp.meta.degree_bound = series.degree_bound();

  write_samples_csv(samples, out / "samples.csv");
  std::ostringstream header;
  header << "empirical characteristic function\nflavor=" << series.flavor() << "\nsigma=" << format_double(cfg.sigma)
         << "\nT=" << format_double(cfg.T) << "\nsamples=" << cfg.n_samples << "\nx=" << format_double(cfg.x)
         << "\nmode=" << to_string(cfg.mode) << "\nseed=" << cfg.seed;
  write_matrix_csv(emp.values, axis, axis, header.str(), out / "empirical.csv");
  write_charfun_binary(emp, out / "empirical.bin");
  o.outputs = {"samples.csv", "empirical.csv", "empirical.bin"};
  const auto mean = sample_mean(samples);
  std::cout << samples.values.size() << " samples, mean " << format_double(mean.real()) << " + "
            << format_double(mean.imag()) << "i, crude bound " << format_double(samples.crude_bound) << "\n";
  if (cfg.sigma <= 1.0)
    std::cout << "note: sigma <= 1, comparisons against the Euler product are model vs model\n";
  return o;
}

Outcome run_compare(const json &p, const fs::path &out) {
  Outcome o;
  const std::string model_path = p.at("model"), emp_path = p.at("empirical");
  o.inputs = {model_path, emp_path};
  const auto model = read_charfun_binary(model_path);
  const auto emp = read_charfun_binary(emp_path);
  if (!(emp.u == model.u) || !(emp.v == model.v))
    throw ContractViolation("compare: empirical and model grids differ");
  const auto report = compare_report(emp.values, model, p.at("threshold"), p.at("radius"));
  json j = json::parse(to_json(report));
  j["label"] = emp.meta.sigma <= 1.0 ? "model vs model" : "empirical vs model";
  j["model_flavor"] = model.meta.flavor;
  j["empirical_flavor"] = emp.meta.flavor;
  write_json(j, out / "report.json");
  o.outputs = {"report.json"};
  std::cout << "max_dev " << format_double(report.max_dev) << " mean_dev " << format_double(report.mean_dev)
            << " over " << report.nodes << " nodes: " << (report.pass ? "pass" : "fail") << "\n";
  o.check_failed = !report.pass;
  return o;
}

Outcome run_decay(const json &p, const fs::path &out) {
  Outcome o;
  const std::string in = p.at("charfun");
  o.inputs.push_back(in);
  const auto grid = read_charfun_binary(in);
  const auto prof = decay_profile(grid, p.at("r_min"), p.at("r_max"));
  std::ofstream csv(out / "decay.csv");
  csv << "# sigma=" << format_double(grid.meta.sigma) << "\n# flavor=" << grid.meta.flavor
      << "\nr,max_abs,count,nonincreasing\n";
  double prev = 1.0;
  for (const auto &sh : prof.shells) {
    csv << format_double(sh.r) << ',' << format_double(sh.max_abs) << ',' << sh.count << ','
        << (sh.max_abs <= prev ? 1 : 0) << '\n';
    prev = sh.max_abs;
  }
  json j;
  j["sigma"] = grid.meta.sigma;
  j["expected_slope"] = 1.0 / grid.meta.sigma;
  j["fitted_slope"] = prof.fitted_slope;
  j["fitted_intercept"] = prof.fitted_intercept;
  j["fit_r_min"] = prof.fit_r_min;
  j["fit_r_max"] = prof.fit_r_max;
  j["fit_points"] = prof.fit_points;
  j["inconclusive"] = prof.inconclusive;
  j["monotone"] = prof.monotone;
  write_json(j, out / "decay.json");
  o.outputs = {"decay.csv", "decay.json"};
  std::cout << "fitted slope " << format_double(prof.fitted_slope) << " (1/sigma = " << format_double(1.0 / grid.meta.sigma)
            << ") over " << prof.fit_points << " shells" << (prof.monotone ? "" : ", not monotone") << "\n";
  if (prof.inconclusive)
    o.warnings.push_back("decay fit inconclusive: too little decay or too small a grid");
  if (!prof.monotone)
    o.warnings.push_back("shell maxima increase somewhere beyond the first drop below 0.9");
  return o;
}

Outcome dispatch(const std::string &cmd, const json &p, const fs::path &out) {
  if (cmd == "split")
    return run_split(p, out);
  if (cmd == "mfun")
    return run_mfun(p, out);
  if (cmd == "density")
    return run_density(p, out);
  if (cmd == "empirical")
    return run_empirical(p, out);
  if (cmd == "compare")
    return run_compare(p, out);
  if (cmd == "decay")
    return run_decay(p, out);
  throw ContractViolation("unknown command '" + cmd + "'");
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json make_manifest(const std::string &cmd, const json &params, const Outcome &o, const fs::path &out,
                   double seconds, int threads) {
  json m;
  m["command"] = cmd;
  m["tool_version"] = MFUN_VERSION;
  m["parameters"] = params;
  json inputs = json::array();
  for (const auto &in : o.inputs)
    inputs.push_back({{"path", in}, {"sha256", sha256_file(in)}});
  m["inputs"] = inputs;
  json outputs = json::array();
  for (const auto &f : o.outputs)
    outputs.push_back({{"path", f}, {"sha256", sha256_file(out / f)}});
  m["outputs"] = outputs;
  m["threads"] = threads;
  m["started_utc"] = utc_now();
  m["wall_clock_seconds"] = seconds;
  return m;
}

int execute(const std::string &cmd, const json &params, const fs::path &out, bool strict, json *manifest_out = nullptr) {
  fs::create_directories(out);
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = dispatch(cmd, params, out);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const json manifest = make_manifest(cmd, params, o, out, secs, omp_get_max_threads());
  write_json(manifest, out / (cmd + ".manifest.json"));
  if (manifest_out)
    *manifest_out = manifest;
  for (const auto &w : o.warnings)
    std::cerr << "warning: " << w << "\n";
  if (o.check_failed)
    return kCheckFailed;
  if (strict && !o.warnings.empty())
    return kWarning;
  return kPass;
}

int replay(const std::string &manifest_path, const std::string &out_opt, bool strict) {
  const json recorded = read_json(manifest_path);
  const std::string cmd = recorded.at("command");
  for (const auto &in : recorded.at("inputs")) {
    const std::string path = in.at("path");
    if (sha256_file(path) != in.at("sha256").get<std::string>())
      throw ParseError("input " + path + " changed since the recorded run");
  }
  const fs::path out = out_opt.empty() ? fs::path(manifest_path).parent_path() / ("replay_" + cmd) : fs::path(out_opt);
  json fresh;
  const int code = execute(cmd, recorded.at("parameters"), out, strict, &fresh);

  json report;
  report["manifest"] = absolute_path(manifest_path);
  report["command"] = cmd;
  json files = json::array();
  bool identical = recorded.at("outputs").size() == fresh.at("outputs").size();
  for (const auto &rec : recorded.at("outputs")) {
    const std::string name = rec.at("path");
    const std::string want = rec.at("sha256");
    const std::string got = fs::exists(out / name) ? sha256_file(out / name) : "";
    files.push_back({{"path", name}, {"recorded", want}, {"replayed", got}, {"identical", want == got}});
    if (want != got) {
      identical = false;
      std::cerr << "mismatch: " << name << "\n";
    }
  }
  report["files"] = files;
  report["identical"] = identical;
  write_json(report, out / "replay.json");
  std::cout << "replay of " << cmd << ": " << (identical ? "byte-identical" : "outputs differ") << " ("
            << files.size() << " files)\n";
  if (!identical)
    return kCheckFailed;
  return code;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"M-functions of Dedekind zeta functions and related L-functions"};
  app.set_version_flag("--version", MFUN_VERSION);
  app.require_subcommand(1);

  int threads = 0;
  bool strict = false;
  std::string out_dir = ".";
  app.add_option("--threads", threads, "Worker thread cap (0 keeps the default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--strict", strict, "Exit with status 3 when accuracy warnings are raised");
  auto *out_opt = app.add_option("--out-dir", out_dir, "Directory for output files and the manifest");

  json params;
  std::string cmd;

  // split
  std::string spec;
  std::uint64_t limit = 100;
  auto *split = app.add_subcommand("split", "Splitting table of a field spec");
  split->add_option("spec", spec, "Field spec (JSON)")->required();
  split->add_option("--limit", limit, "Largest prime")->capture_default_str();

  // mfun
  double sigma = 1.5, extent = 30.0, tail_tol = 1e-4, quad_tol = 1e-13;
  std::size_t n_points = 256, max_nodes = std::size_t{1} << 16;
  std::uint64_t cutoff = 0;
  auto *mfun_cmd = app.add_subcommand("mfun", "Characteristic function m on a square grid");
  mfun_cmd->add_option("spec", spec, "Series spec (JSON)")->required();
  mfun_cmd->add_option("--sigma", sigma)->capture_default_str();
  mfun_cmd->add_option("--extent", extent, "Grid covers [-W, W)^2")->capture_default_str();
  mfun_cmd->add_option("--n", n_points, "Nodes per axis (even)")->capture_default_str();
  mfun_cmd->add_option("--tail-tol", tail_tol)->capture_default_str();
  mfun_cmd->add_option("--cutoff", cutoff, "Largest prime (0 picks one from the tail bound)")->capture_default_str();
  mfun_cmd->add_option("--quad-tol", quad_tol)->capture_default_str();
  mfun_cmd->add_option("--max-nodes", max_nodes)->capture_default_str();

  // density
  std::string charfun_path, convention = "shifted";
  double norm_tol = 1e-3;
  auto *density_cmd = app.add_subcommand("density", "Invert a characteristic-function grid");
  density_cmd->add_option("charfun", charfun_path, "charfun.bin from the mfun command")->required();
  density_cmd->add_option("--convention", convention, "shifted, twiddled or dense")->capture_default_str();
  density_cmd->add_option("--norm-tol", norm_tol)->capture_default_str();

  // empirical
  double T = 2000.0, x = 1000.0, emp_extent = 3.0;
  std::size_t samples = 200000, emp_n = 24;
  std::string mode = "smoothed";
  std::uint64_t seed = 0;
  bool jitter = false;
  auto *emp_cmd = app.add_subcommand("empirical", "Sample the truncated log-derivative on a vertical line");
  emp_cmd->add_option("spec", spec, "Series spec (JSON)")->required();
  emp_cmd->add_option("--sigma", sigma)->capture_default_str();
  emp_cmd->add_option("--T", T)->capture_default_str();
  emp_cmd->add_option("--samples", samples)->capture_default_str();
  emp_cmd->add_option("--x", x)->capture_default_str();
  emp_cmd->add_option("--mode", mode, "smoothed, sharp or prime_power")->capture_default_str();
  emp_cmd->add_option("--seed", seed)->capture_default_str();
  emp_cmd->add_flag("--jitter", jitter, "Shift the sample grid by a seeded offset");
  emp_cmd->add_option("--extent", emp_extent, "w-grid extent")->capture_default_str();
  emp_cmd->add_option("--n", emp_n, "w-grid nodes per axis")->capture_default_str();

  // compare
  std::string model_path, emp_path;
  double threshold = 0.05, radius = 3.0;
  auto *cmp_cmd = app.add_subcommand("compare", "Compare an empirical grid with a model grid");
  cmp_cmd->add_option("model", model_path, "charfun.bin")->required();
  cmp_cmd->add_option("empirical", emp_path, "empirical.bin")->required();
  cmp_cmd->add_option("--threshold", threshold)->capture_default_str();
  cmp_cmd->add_option("--radius", radius, "Euclidean radius of the compared nodes (0: all)")->capture_default_str();

  // decay
  double r_min = 10.0, r_max = 40.0;
  auto *decay_cmd = app.add_subcommand("decay", "Shell maxima and decay fit");
  decay_cmd->add_option("charfun", charfun_path, "charfun.bin")->required();
  decay_cmd->add_option("--r-min", r_min)->capture_default_str();
  decay_cmd->add_option("--r-max", r_max)->capture_default_str();

  // replay
  std::string manifest_path;
  auto *replay_cmd = app.add_subcommand("replay", "Re-run a manifest and compare output bytes");
  replay_cmd->add_option("manifest", manifest_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kUsage;
  }

  if (threads > 0)
    omp_set_num_threads(threads);

  try {
    if (*split) {
      cmd = "split";
      params = {{"spec", absolute_path(spec)}, {"limit", limit}};
    } else if (*mfun_cmd) {
      cmd = "mfun";
      params = {{"spec", absolute_path(spec)}, {"sigma", sigma},       {"extent", extent},
                {"n", n_points},               {"tail_tol", tail_tol}, {"cutoff", cutoff},
                {"quad_tol", quad_tol},        {"max_nodes", max_nodes}};
    } else if (*density_cmd) {
      cmd = "density";
      params = {{"charfun", absolute_path(charfun_path)}, {"convention", convention}, {"norm_tol", norm_tol}};
    } else if (*emp_cmd) {
      cmd = "empirical";
      params = {{"spec", absolute_path(spec)}, {"sigma", sigma}, {"T", T},
                {"samples", samples},          {"x", x},         {"mode", mode},
                {"seed", seed},                {"jitter", jitter}, {"extent", emp_extent},
                {"n", emp_n}};
    } else if (*cmp_cmd) {
      cmd = "compare";
      params = {{"model", absolute_path(model_path)},
                {"empirical", absolute_path(emp_path)},
                {"threshold", threshold},
                {"radius", radius}};
    } else if (*decay_cmd) {
      cmd = "decay";
      params = {{"charfun", absolute_path(charfun_path)}, {"r_min", r_min}, {"r_max", r_max}};
    } else if (*replay_cmd) {
      return replay(manifest_path, out_opt->count() ? out_dir : std::string{}, strict);
    }
    return execute(cmd, params, out_dir, strict);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
