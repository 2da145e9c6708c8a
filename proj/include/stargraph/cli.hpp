#pragma once

// Batch runner behind the command-line tool. run() dispatches one
// experiment over its sweep, writes <out>/<experiment>.csv and
// <out>/<experiment>_summary.json, and returns the process exit code:
// 0 all checks pass, 1 some bound check failed, 2 configuration or
// tail-guard error.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "stargraph/classical_graph.hpp"
#include "stargraph/config.hpp"
#include "stargraph/experiments.hpp"

namespace stargraph {

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Worker count from STARGRAPH_THREADS (default 1).
inline unsigned thread_count() {
  if (const char* env = std::getenv("STARGRAPH_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

/// Runs tasks[i] for every i; results land by index so the output order never
/// depends on scheduling. The first exception is rethrown after all workers stop.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task, unsigned workers) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::mutex mutex;
  std::size_t next = 0;
  std::exception_ptr error;
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard lock(mutex);
          if (next >= count || error) return;
          i = next++;
        }
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  pool.clear();
  if (error) std::rethrow_exception(error);
}

struct Snapshot {
  std::string name;
  GraphWave wave;
};

struct RunResult {
  std::vector<ExperimentReport> reports;
  std::vector<Snapshot> snapshots;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

namespace detail {

inline Grid grid_for(const RunConfig& c, const CoherentParams& cp, double t_max) {
  return auto_grid(cp, t_max, c.x_max, c.n_points);
}

inline ExperimentReport norm_report(const std::string& id, const CoherentParams& cp, const RunConfig& c,
                                    const Grid& g, double t, double lhs, double rhs, double tail,
                                    std::string sign = "") {
  const CutoffSpec cut = c.cutoff_spec();
  ExperimentReport r;
  r.id = id;
  r.params = report_params(cp, c.n_edges, &cut, g, std::move(sign));
  r.t = t;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = 0.0;
  r.floor = 0.0;
  r.tail_mass = tail;
  if (tail > kTailWarn) r.warnings.push_back("tail mass above 1e-10");
  r.pass = bound_holds(r);
  return r;
}

inline std::string snapshot_name(std::size_t hbar_index, std::size_t t_index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "h%02zu_t%03zu", hbar_index, t_index);
  return buf;
}

}  // namespace detail

/// Computes every report of the configured experiment without touching disk.
inline RunResult execute(const RunConfig& c) {
  validate(c);
  RunResult out;
  const CutoffSpec cut = c.cutoff_spec();
  const std::size_t n = c.n_edges;
  const unsigned workers = thread_count();
  const std::string& id = c.experiment;

  // Sweep points are (hbar index, inner index); each fills its own slot.
  const auto sweep = [&](std::size_t inner, const std::function<ExperimentReport(std::size_t, std::size_t)>& point) {
    std::vector<ExperimentReport> slots(c.hbars.size() * inner);
    parallel_for(
        slots.size(), [&](std::size_t k) { slots[k] = point(k / inner, k % inner); }, workers);
    out.reports = std::move(slots);
  };

  if (id == "evolve" || id == "classical") {
    const bool quantum = id == "evolve";
    std::vector<Snapshot> snaps(c.hbars.size() * c.times.size(), Snapshot{"", GraphWave(Grid(1.0, 8), 1)});
    sweep(c.times.size(), [&](std::size_t h, std::size_t k) {
      const CoherentParams cp = c.params(c.hbars[h]);
      const Grid g = detail::grid_for(c, cp, c.t_max());
      const double t = c.times[k];
      GraphWave wave = quantum ? kirchhoff_propagate(graph_initial_state(cp, cplx{cp.sigma0(), 0.0}, cut, g, n), t,
                                                     cp.hbar(), cp.mass())
                               : semiclassical_prediction(cp, cut, t, g, n);
      const double tail = guard_tail(wave, id + " state");
      const double tol = quantum ? 1e-10 : 1e-6;
      ExperimentReport r = detail::norm_report(id, cp, c, g, t, std::abs(wave.norm() - 1.0), tol, tail);
      if (!quantum && on_collision(PhasePoint(cp.q(), cp.p()), t, cp.mass()))
        r.warnings.push_back("collision time: transported value is zero by convention");
      snaps[h * c.times.size() + k] = Snapshot{detail::snapshot_name(h, k), std::move(wave)};
      return r;
    });
    out.snapshots = std::move(snaps);
  } else if (id == "wave-op") {
    sweep(c.signs.size(), [&](std::size_t h, std::size_t k) {
      const CoherentParams cp = c.params(c.hbars[h]);
      const Grid g = detail::grid_for(c, cp, 0.0);
      const GraphWave psi = graph_initial_state(cp, cplx{cp.sigma0(), 0.0}, cut, g, n);
      const GraphWave w = wave_operator(psi, c.signs[k], kirchhoff_s_matrix(n));
      return detail::norm_report(id, cp, c, g, 0.0, std::abs(w.norm() - psi.norm()), 1e-8, guard_tail(w, "wave-op image"),
                                 sign_name(c.signs[k]));
    });
  } else if (id == "scatter") {
    const SMatrix s = kirchhoff_s_matrix(n);
    nlohmann::ordered_json matrix = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (std::size_t j = 0; j < n; ++j) row.push_back(s(i, j));
      matrix.push_back(row);
    }
    out.extra["s_matrix"] = matrix;
    std::vector<ExperimentReport> reports(c.hbars.size() + 1);
    reports[0] = scattering_identity_check(n);
    parallel_for(
        c.hbars.size(),
        [&](std::size_t h) {
          const CoherentParams cp = c.params(c.hbars[h]);
          const Grid g = detail::grid_for(c, cp, 0.0);
          const GraphWave psi = graph_initial_state(cp, cplx{cp.sigma0(), 0.0}, cut, g, n);
          const GraphWave composed =
              wave_operator_adjoint(wave_operator(psi, Sign::Minus, s), Sign::Plus, s);
          reports[h + 1] = detail::norm_report(id, cp, c, g, 0.0, distance(composed, scattering_apply(psi, s)), 1e-8,
                                               tail_fraction(psi));
        },
        workers);
    out.reports = std::move(reports);
  } else if (id == "theorem-dynamics") {
    sweep(c.times.size(), [&](std::size_t h, std::size_t k) {
      const CoherentParams cp = c.params(c.hbars[h]);
      return theorem_dynamics_check(cp, cut, c.times[k], detail::grid_for(c, cp, c.t_max()), n);
    });
  } else if (id == "theorem-wave") {
    sweep(c.signs.size(), [&](std::size_t h, std::size_t k) {
      const CoherentParams cp = c.params(c.hbars[h]);
      return theorem_wave_check(cp, cut, c.signs[k], detail::grid_for(c, cp, 0.0), n);
    });
  } else if (id == "lemma41") {
    const std::size_t inner = c.times.size() * c.signs.size();
    sweep(inner, [&](std::size_t h, std::size_t k) {
      const CoherentParams cp = c.params(c.hbars[h]);
      const Grid g = (c.x_max || c.n_points) ? detail::grid_for(c, cp, c.t_max()) : lemma41_grid(cp, c.t_max());
      return lemma41_check(cp, c.times[k / c.signs.size()], g, c.signs[k % c.signs.size()]);
    });
  } else if (id == "lemma42") {
    sweep(1, [&](std::size_t h, std::size_t) {
      const CoherentParams cp = c.params(c.hbars[h]);
      return lemma42_check(cp, cut, detail::grid_for(c, cp, 0.0));
    });
  } else if (id == "ring-exact") {
    sweep(c.times.size(), [&](std::size_t h, std::size_t k) {
      const CoherentParams cp = c.params(c.hbars[h]);
      return ring_exactness_check(cp, c.times[k], detail::grid_for(c, cp, c.t_max()), n);
    });
  } else if (id == "nd-decay") {
    const BumpSpec bump{c.q, c.cutoff == "smooth" ? c.eta : 0.25};
    const Grid base = default_nd_grid();
    const Grid g(c.x_max.value_or(base.x_max()), c.n_points.value_or(base.size()));
    std::vector<NdStudy> studies(c.signs.size());
    parallel_for(
        c.signs.size(), [&](std::size_t k) { studies[k] = nd_decay_study(bump, c.times, c.signs[k], g); }, workers);
    nlohmann::ordered_json fits = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < studies.size(); ++k) {
      fits.push_back({{"sign", sign_name(c.signs[k])},
                      {"constant", studies[k].constant},
                      {"slope", studies[k].slope},
                      {"monotone", studies[k].monotone}});
      for (auto& r : studies[k].reports) out.reports.push_back(std::move(r));
    }
    out.extra["fits"] = fits;
  }
  return out;
}

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "experiment", "hbar",   "mass", "sigma0", "q",     "p",            "n_edges", "cutoff",    "eta",  "x_max",
      "n_points",   "sign",   "t",    "lhs",    "rhs",   "slack",        "refine_delta", "floor", "tail_mass",
      "pass",       "warnings"};
  return cols;
}

inline std::string csv_row(const ExperimentReport& r) {
  const auto& p = r.params;
  std::string warn;
  for (const auto& w : r.warnings) warn += (warn.empty() ? "" : "; ") + w;
  const std::vector<std::string> cells = {
      r.id, format_number(p.hbar), format_number(p.mass), format_number(p.sigma0), format_number(p.q),
      format_number(p.p), std::to_string(p.n_edges), p.cutoff, format_number(p.eta), format_number(p.x_max),
      std::to_string(p.n_points), p.sign, format_number(r.t), format_number(r.lhs), format_number(r.rhs),
      format_number(r.slack), format_number(r.refine_delta), format_number(r.floor), format_number(r.tail_mass),
      r.pass ? "true" : "false", "\"" + warn + "\""};
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
  return line;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<ExperimentReport>& reports) {
  std::ofstream f(path);
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) f << (i ? "," : "") << cols[i];
  f << '\n';
  for (const auto& r : reports) f << csv_row(r) << '\n';
}

/// x, then Re, Im, |psi|^2 for every edge.
inline void write_snapshot(const std::filesystem::path& path, const GraphWave& w) {
  std::ofstream f(path);
  f << "x";
  for (std::size_t l = 0; l < w.edge_count(); ++l) f << ",re_" << l + 1 << ",im_" << l + 1 << ",abs2_" << l + 1;
  f << '\n';
  const Grid& g = w.grid();
  for (std::size_t j = 0; j < g.size(); ++j) {
    f << format_number(g.node(j));
    for (const auto& e : w.edges())
      f << ',' << format_number(e[j].real()) << ',' << format_number(e[j].imag()) << ','
        << format_number(std::norm(e[j]));
    f << '\n';
  }
}

inline nlohmann::ordered_json summary_json(const RunConfig& c, const RunResult& res, int code) {
  nlohmann::ordered_json j;
  j["experiment"] = c.experiment;
  j["exit_code"] = code;
  std::size_t passed = 0;
  for (const auto& r : res.reports) passed += r.pass ? 1 : 0;
  j["rows"] = res.reports.size();
  j["passed"] = passed;
  j["failed"] = res.reports.size() - passed;
  j["all_pass"] = passed == res.reports.size();
  j["config"] = {{"hbar", c.hbars},    {"mass", c.mass},     {"sigma0", c.sigma0}, {"q", c.q},
                 {"p", c.p},           {"n_edges", c.n_edges}, {"cutoff", c.cutoff}, {"eta", c.eta},
                 {"times", c.times}};
  for (const auto& [k, v] : res.extra.items()) j[k] = v;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : res.reports) {
    nlohmann::ordered_json row = {{"hbar", r.params.hbar}, {"t", r.t},       {"sign", r.params.sign},
                                  {"n_points", r.params.n_points}, {"lhs", r.lhs}, {"rhs", r.rhs},
                                  {"refine_delta", r.refine_delta}, {"pass", r.pass}, {"warnings", r.warnings}};
    if (!r.extras.empty()) row["extras"] = r.extras;
    rows.push_back(row);
  }
  j["reports"] = rows;
  return j;
}

/// Full batch run with file output; errors are reported on err.
inline int run(const RunConfig& c, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  RunResult res;
  try {
    res = execute(c);
  } catch (const TailMassExceeded& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }

  const bool all_pass = std::all_of(res.reports.begin(), res.reports.end(), [](const auto& r) { return r.pass; });
  const int code = all_pass ? 0 : 1;

  namespace fs = std::filesystem;
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);
  write_csv(dir / (c.experiment + ".csv"), res.reports);
  if (!res.snapshots.empty()) {
    fs::create_directories(dir / "snapshots");
    for (const auto& s : res.snapshots) write_snapshot(dir / "snapshots" / (c.experiment + "_" + s.name + ".csv"), s.wave);
  }
  std::ofstream(dir / (c.experiment + "_summary.json")) << summary_json(c, res, code).dump(2) << '\n';

  std::size_t failed = 0;
  for (const auto& r : res.reports) failed += r.pass ? 0 : 1;
  log << c.experiment << ": " << res.reports.size() << " rows, " << failed << " failed -> " << (dir / (c.experiment + ".csv")).string()
      << '\n';
  return code;
}

}  // namespace stargraph
