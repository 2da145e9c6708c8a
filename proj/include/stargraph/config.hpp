#pragma once

// Run configuration: an INI file with sections [physics], [cutoff], [grid],
// [times], [run] and [output]. Every key is optional except where an
// experiment needs it; see configs/ for one file per experiment.
//
//   [physics]  hbar = 0.01 | hbar_sweep = 0.1, 0.05   mass  sigma0  q  p  n_edges
//   [cutoff]   variant = bare | sharp | smooth         eta
//   [grid]     x_max = auto | <L>                       n_points = auto | <N>
//   [times]    list = 0.5, 1, 2   or   start, stop, count (inclusive)
//   [run]      sign = both | + | -
//   [output]   dir = out

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stargraph/quantum_graph.hpp"
#include "stargraph/states.hpp"

namespace stargraph {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {"evolve",         "classical",   "wave-op", "scatter",
                                               "theorem-dynamics", "theorem-wave", "lemma41", "lemma42",
                                               "ring-exact",     "nd-decay"};
  return ids;
}

struct RunConfig {
  std::string experiment;
  std::vector<double> hbars{0.01};
  double mass = 1.0;
  double sigma0 = 1.0;
  double q = 2.0;
  double p = 1.0;
  std::size_t n_edges = 3;
  std::string cutoff = "bare";
  double eta = 1.0;
  std::optional<double> x_max;
  std::optional<std::size_t> n_points;
  std::vector<double> times{1.0};
  std::vector<Sign> signs{Sign::Plus, Sign::Minus};
  std::string output_dir = "out";

  CutoffSpec cutoff_spec() const {
    if (cutoff == "bare") return CutoffSpec::bare();
    if (cutoff == "sharp") return CutoffSpec::sharp(eta);
    if (cutoff == "smooth") return CutoffSpec::smooth(eta);
    throw ConfigError("cutoff.variant must be bare, sharp or smooth (got '" + cutoff + "')");
  }

  CoherentParams params(double hbar) const { return CoherentParams(hbar, mass, sigma0, q, p); }

  double t_max() const {
    double m = 0.0;
    for (double t : times) m = std::max(m, std::abs(t));
    return m;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(trim(text), &used);
    if (used != trim(text).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": cannot parse '" + text + "' as a number");
  }
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw ConfigError(key + ": list must not be empty");
  return out;
}

}  // namespace detail

/// Checks every physics constraint up front so that a bad file exits before any work.
inline void validate(const RunConfig& c) {
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), c.experiment) == ids.end())
    throw ConfigError("unknown experiment '" + c.experiment + "'");
  if (c.hbars.empty()) throw ConfigError("physics.hbar: sweep list must not be empty");
  if (c.times.empty()) throw ConfigError("times: list must not be empty");
  if (c.n_edges == 0) throw ConfigError("physics.n_edges must be >= 1");
  if (c.signs.empty()) throw ConfigError("run.sign must select at least one sign");
  try {
    for (double h : c.hbars) (void)c.params(h);
    (void)c.cutoff_spec();
    if (c.x_max || c.n_points) (void)Grid(c.x_max.value_or(1.0), c.n_points.value_or(8));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (c.experiment == "ring-exact" && c.n_edges % 2 != 0) throw ConfigError("ring-exact needs an even n_edges");
  if (c.experiment == "theorem-wave" && c.p == 0.0)
    throw ConfigError("theorem-wave needs p != 0: at p = 0 the wave-operator distance is bounded below");
}

inline RunConfig parse_config(std::istream& in, const std::string& experiment = "") {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  RunConfig c;
  c.experiment = experiment.empty() ? tree.get<std::string>("run.experiment", "") : experiment;

  const auto num = [&](const std::string& key, double fallback) {
    const auto v = tree.get_optional<std::string>(key);
    return v ? detail::parse_double(key, *v) : fallback;
  };

  if (auto sweep = tree.get_optional<std::string>("physics.hbar_sweep")) {
    c.hbars = detail::parse_list("physics.hbar_sweep", *sweep);
  } else if (auto h = tree.get_optional<std::string>("physics.hbar")) {
    c.hbars = {detail::parse_double("physics.hbar", *h)};
  }
  c.mass = num("physics.mass", c.mass);
  c.sigma0 = num("physics.sigma0", c.sigma0);
  c.q = num("physics.q", c.q);
  c.p = num("physics.p", c.p);
  const double n = num("physics.n_edges", static_cast<double>(c.n_edges));
  if (n < 1.0 || n != std::floor(n)) throw ConfigError("physics.n_edges must be a positive integer");
  c.n_edges = static_cast<std::size_t>(n);

  c.cutoff = detail::trim(tree.get<std::string>("cutoff.variant", c.cutoff));
  c.eta = num("cutoff.eta", c.cutoff == "smooth" ? 0.25 : 1.0);

  if (auto x = tree.get_optional<std::string>("grid.x_max"); x && detail::trim(*x) != "auto")
    c.x_max = detail::parse_double("grid.x_max", *x);
  if (auto np = tree.get_optional<std::string>("grid.n_points"); np && detail::trim(*np) != "auto") {
    const double v = detail::parse_double("grid.n_points", *np);
    if (v < 1.0 || v != std::floor(v)) throw ConfigError("grid.n_points must be a positive integer");
    c.n_points = static_cast<std::size_t>(v);
  }

  if (auto list = tree.get_optional<std::string>("times.list")) {
    c.times = detail::parse_list("times.list", *list);
  } else if (tree.get_optional<std::string>("times.start")) {
    const double start = num("times.start", 0.0);
    const double stop = num("times.stop", start);
    const double count = num("times.count", 1.0);
    if (count < 1.0 || count != std::floor(count)) throw ConfigError("times.count must be a positive integer");
    const auto k = static_cast<std::size_t>(count);
    c.times.clear();
    for (std::size_t i = 0; i < k; ++i)
      c.times.push_back(k == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(k - 1));
  }

  const std::string sign = detail::trim(tree.get<std::string>("run.sign", "both"));
  if (sign == "both") c.signs = {Sign::Plus, Sign::Minus};
  else if (sign == "+" || sign == "plus") c.signs = {Sign::Plus};
  else if (sign == "-" || sign == "minus") c.signs = {Sign::Minus};
  else throw ConfigError("run.sign must be both, + or -");

  c.output_dir = detail::trim(tree.get<std::string>("output.dir", c.output_dir));
  return c;
}

}  // namespace stargraph
