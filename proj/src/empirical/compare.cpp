#include "mfun/empirical.hpp"

#include "mfun/error.hpp"

#include <json.hpp>

#include <cmath>

namespace mfun {

CompareReport compare_report(const Eigen::MatrixXcd &empirical, const CharFunGrid &model, double threshold,
                             double radius) {
  if (empirical.rows() != model.values.rows() || empirical.cols() != model.values.cols())
    throw ContractViolation("compare_report: grids differ in shape");
  CompareReport rep;
  rep.radius = radius;
  rep.threshold = threshold;
  double total = 0.0;
  for (std::size_t j = 0; j < model.v.n; ++j) {
    const double v = model.v.at(j);
    for (std::size_t i = 0; i < model.u.n; ++i) {
      const double u = model.u.at(i);
      if (radius > 0.0 && std::hypot(u, v) > radius * (1.0 + 1e-12))
        continue;
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      const double dev = std::abs(empirical(ii, jj) - model.values(ii, jj));
      rep.max_dev = std::max(rep.max_dev, dev);
      total += dev;
      ++rep.nodes;
      const auto k = static_cast<std::size_t>(std::floor(std::abs(u) + std::abs(v) + 0.5));
      if (rep.shells.size() <= k) {
        const auto old = rep.shells.size();
        rep.shells.resize(k + 1);
        for (std::size_t s = old; s <= k; ++s)
          rep.shells[s].r = static_cast<double>(s);
      }
      auto &sh = rep.shells[k];
      sh.max_dev = std::max(sh.max_dev, dev);
      sh.mean_dev += dev;
      ++sh.count;
    }
  }
  for (auto &sh : rep.shells)
    if (sh.count)
      sh.mean_dev /= static_cast<double>(sh.count);
  rep.mean_dev = rep.nodes ? total / static_cast<double>(rep.nodes) : 0.0;
  rep.pass = rep.nodes > 0 && rep.max_dev < threshold;
  return rep;
}

std::string to_json(const CompareReport &report) {
  nlohmann::ordered_json j;
  j["max_dev"] = report.max_dev;
  j["mean_dev"] = report.mean_dev;
  j["nodes"] = report.nodes;
  j["radius"] = report.radius;
  j["threshold"] = report.threshold;
  j["pass"] = report.pass;
  auto shells = nlohmann::ordered_json::array();
  for (const auto &sh : report.shells) {
    if (sh.count == 0)
      continue;
    nlohmann::ordered_json s;
    s["r"] = sh.r;
    s["max_dev"] = sh.max_dev;
    s["mean_dev"] = sh.mean_dev;
    s["count"] = sh.count;
    shells.push_back(std::move(s));
  }
  j["shells"] = std::move(shells);
  return j.dump(2) + "\n";
}

} // namespace mfun
