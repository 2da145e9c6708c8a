#pragma once

// Bound checks comparing quantum evolution on the star graph with its
// classical (Liouville) prediction. Each check measures its lhs on a grid and
// on the refined grid; the difference is the refinement delta that enters
// the pass criterion lhs <= rhs (1 + slack) + delta.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stargraph/classical_graph.hpp"
#include "stargraph/quantum_graph.hpp"
#include "stargraph/spectral.hpp"
#include "stargraph/states.hpp"

namespace stargraph {

inline constexpr double kBoundSlack = 0.05;
/// Distances between unit-norm grid states cannot be resolved below this;
/// bounds smaller than it are checked against it instead.
inline constexpr double kRoundoffFloor = 1e-12;

struct ReportParams {
  double hbar = 0.0;
  double mass = 0.0;
  double sigma0 = 0.0;
  double q = 0.0;
  double p = 0.0;
  std::size_t n_edges = 1;
  std::string cutoff;
  double eta = 0.0;
  double x_max = 0.0;
  std::size_t n_points = 0;
  std::string sign;
};

struct ExperimentReport {
  std::string id;
  ReportParams params;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = kBoundSlack;
  double refine_delta = 0.0;
  double floor = kRoundoffFloor;
  double tail_mass = 0.0;
  bool pass = false;
  std::vector<std::string> warnings;
  std::map<std::string, double> extras;
};

inline bool bound_holds(double lhs, double rhs, double slack, double refine_delta, double floor = kRoundoffFloor) {
  return lhs <= rhs * (1.0 + slack) + refine_delta + floor;
}

inline bool bound_holds(const ExperimentReport& r) {
  return bound_holds(r.lhs, r.rhs, r.slack, r.refine_delta, r.floor);
}

inline ReportParams report_params(const CoherentParams& cp, std::size_t n, const CutoffSpec* cut, const Grid& g,
                                  std::string sign = "") {
  ReportParams r;
  r.hbar = cp.hbar();
  r.mass = cp.mass();
  r.sigma0 = cp.sigma0();
  r.q = cp.q();
  r.p = cp.p();
  r.n_edges = n;
  if (cut) {
    r.cutoff = cut->name();
    r.eta = cut->eta();
  }
  r.x_max = g.x_max();
  r.n_points = g.size();
  r.sign = std::move(sign);
  return r;
}

// ---------------------------------------------------------------------------
// Grid sizing

/// L = 1.25 (q + |p| T/m + 12 sqrt(hbar) |sigma_T|); dx resolves both the
/// packet width and its carrier wavenumber.
inline Grid auto_grid(const CoherentParams& cp, double t_max, std::optional<double> x_max = {},
                      std::optional<std::size_t> n_points = {}) {
  const double T = std::abs(t_max);
  const double hbar = cp.hbar();
  const double sigma0 = cp.sigma0();
  const double sigma_t = std::abs(cplx{sigma0, T / (2.0 * cp.mass() * sigma0)});
  const double L = x_max.value_or(
      1.25 * (cp.q() + std::abs(cp.p()) * T / cp.mass() + 12.0 * std::sqrt(hbar) * sigma_t));
  if (n_points) return Grid(L, *n_points);
  const double dx_width = std::sqrt(hbar) * sigma0 / 8.0;
  const double dx_carrier = std::numbers::pi / (std::abs(cp.p()) / hbar + 10.0 / (sigma0 * std::sqrt(hbar)));
  const double dx = std::min(dx_width, dx_carrier);
  std::size_t n = 8;
  while (static_cast<double>(n) * dx < L) n *= 2;
  return Grid(L, n);
}

// ---------------------------------------------------------------------------
// Refinement driver

struct Measurement {
  double lhs;
  double tail;
};

struct Converged {
  double lhs;           ///< value on the finest grid
  double refine_delta;  ///< |lhs(2N) - lhs(N)| of the last pair
  double tail;          ///< worst tail fraction seen
  Grid grid;            ///< finest grid
  bool converged;
};

/// Measures on g and g.refined(); while the pair differs by more than 1% it
/// doubles again, at most max_doublings extra times.
template <class Measure>
Converged converge(Measure&& measure, const Grid& g, int max_doublings = 2) {
  Grid coarse = g;
  Measurement a = measure(coarse);
  double tail = a.tail;
  for (int i = 0;; ++i) {
    const Grid fine = coarse.refined();
    const Measurement b = measure(fine);
    tail = std::max(tail, b.tail);
    const double delta = std::abs(b.lhs - a.lhs);
    const bool ok = delta <= 0.01 * std::abs(b.lhs) || delta <= 1e-13;
    if (ok || i >= max_doublings) return {b.lhs, delta, tail, fine, ok};
    coarse = fine;
    a = b;
  }
}

inline void finish(ExperimentReport& r, const Converged& c) {
  r.lhs = c.lhs;
  r.refine_delta = c.refine_delta;
  r.tail_mass = c.tail;
  r.params.x_max = c.grid.x_max();
  r.params.n_points = c.grid.size();
  if (!c.converged) r.warnings.push_back("lhs changed by more than 1% under the last grid doubling");
  if (c.tail > kTailWarn) r.warnings.push_back("tail mass above 1e-10");
  if (r.rhs < r.floor) r.warnings.push_back("rhs below the roundoff floor");
  r.pass = bound_holds(r);
}

// ---------------------------------------------------------------------------
// Semiclassical prediction

/// Samples over x of e^{iA_t/hbar} (e^{itL_K} Sigma_{sigma_t, x})(xi).
inline GraphWave semiclassical_prediction(const CoherentParams& cp, const CutoffSpec& cut, double t, const Grid& g,
                                          std::size_t n, const SMatrix& s) {
  const EvolvedParams ev = evolve_params(cp, t);
  const ClassicalField field = classical_field(cp, ev.sigma_t, cut, n);
  const PhasePoint xi(cp.q(), cp.p());
  GraphWave out = render([&](double x) { return liouville_kirchhoff(field, t, cp.mass(), xi, s, x); }, g, n);
  out *= std::exp(cplx{0.0, ev.action / cp.hbar()});
  return out;
}

inline GraphWave semiclassical_prediction(const CoherentParams& cp, const CutoffSpec& cut, double t, const Grid& g,
                                          std::size_t n) {
  return semiclassical_prediction(cp, cut, t, g, n, kirchhoff_s_matrix(n));
}

// ---------------------------------------------------------------------------
// Bound checks

/// Quantum vs classical dynamics. rhs: C0 e^{-eps q^2/(hbar sigma0^2)}
/// + 2 C0 e^{-eps (q+pt/m)^2/(hbar |sigma_t|^2)} + sqrt2 e^{-q^2/(4 hbar sigma0^2)}.
inline ExperimentReport theorem_dynamics_check(const CoherentParams& cp, const CutoffSpec& cut, double t,
                                               const Grid& g, std::size_t n) {
  ExperimentReport r;
  r.id = "theorem-dynamics";
  r.params = report_params(cp, n, &cut, g);
  r.t = t;

  const auto [c0, eps] = cutoff_constants(cut);
  const double hbar = cp.hbar();
  const double s0 = cp.sigma0();
  const double q = cp.q();
  const EvolvedParams ev = evolve_params(cp, t);
  const double first = c0 * std::exp(-eps * q * q / (hbar * s0 * s0));
  const double second = 2.0 * c0 * std::exp(-eps * ev.q_t * ev.q_t / (hbar * std::norm(ev.sigma_t)));
  const double third = std::numbers::sqrt2 * std::exp(-q * q / (4.0 * hbar * s0 * s0));
  r.rhs = first + second + third;
  // Logged next to the variant with sigma0^2 in place of |sigma_t|^2.
  r.extras["rhs_first_term"] = first;
  r.extras["rhs_second_term"] = second;
  r.extras["rhs_second_term_sigma0"] = 2.0 * c0 * std::exp(-eps * ev.q_t * ev.q_t / (hbar * s0 * s0));
  if (ev.q_t == 0.0) r.warnings.push_back("t is the collision time; prediction is zero by convention");

  const SMatrix s = kirchhoff_s_matrix(n);
  const auto measure = [&](const Grid& grid) {
    const GraphWave psi0 = graph_initial_state(cp, cplx{s0, 0.0}, cut, grid, n);
    const GraphWave psit = kirchhoff_propagate(psi0, t, hbar, cp.mass(), s);
    const double tail = guard_tail(psit, "theorem-dynamics evolved state");
    const GraphWave pred = semiclassical_prediction(cp, cut, t, grid, n, s);
    return Measurement{distance(psit, pred), tail};
  };
  finish(r, converge(measure, g));
  return r;
}

/// Quantum vs classical wave operator. rhs:
/// sqrt(2/n) (sqrt2 C0 e^{-eps q^2/(hbar sigma0^2)} + e^{-q^2/(4 hbar sigma0^2)} + e^{-sigma0^2 p^2/hbar}).
inline ExperimentReport theorem_wave_check(const CoherentParams& cp, const CutoffSpec& cut, Sign sign, const Grid& g,
                                           std::size_t n) {
  if (cp.p() == 0.0)
    throw std::invalid_argument(
        "theorem_wave_check: p = 0 is excluded; there the quantum/classical wave-operator distance "
        "has a positive lower bound and does not vanish as hbar -> 0");
  ExperimentReport r;
  r.id = "theorem-wave";
  r.params = report_params(cp, n, &cut, g, sign_name(sign));

  const auto [c0, eps] = cutoff_constants(cut);
  const double hbar = cp.hbar();
  const double s0 = cp.sigma0();
  const double q = cp.q();
  const double p = cp.p();
  r.rhs = std::sqrt(2.0 / static_cast<double>(n)) *
          (std::numbers::sqrt2 * c0 * std::exp(-eps * q * q / (hbar * s0 * s0)) +
           std::exp(-q * q / (4.0 * hbar * s0 * s0)) + std::exp(-s0 * s0 * p * p / hbar));

  const SMatrix s = kirchhoff_s_matrix(n);
  const PhasePoint xi(q, p);
  const ClassicalField field = classical_field(cp, cplx{s0, 0.0}, cut, n);
  const auto measure = [&](const Grid& grid) {
    const GraphWave psi0 = graph_initial_state(cp, cplx{s0, 0.0}, cut, grid, n);
    const GraphWave quantum = wave_operator(psi0, sign, s);
    const double tail = guard_tail(quantum, "theorem-wave image state");
    const GraphWave classical =
        render([&](double x) { return classical_wave_op(field, sign, xi, s, x); }, grid, n);
    return Measurement{distance(quantum, classical), tail};
  };
  finish(r, converge(measure, g));
  return r;
}

/// Quantum scattering coefficients (scattering_apply on unit edge states)
/// against classical_scattering on unit fields; lhs is the largest entrywise
/// difference and the check passes only for exact equality.
inline ExperimentReport scattering_identity_check(std::size_t n) {
  ExperimentReport r;
  r.id = "scatter";
  r.params.n_edges = n;
  r.slack = 0.0;
  const SMatrix s = kirchhoff_s_matrix(n);
  const Grid g(1.0, 8);
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    GraphWave unit(g, n);
    for (std::size_t j = 0; j < g.size(); ++j) unit.edge(k)[j] = 1.0;
    const GraphWave quantum = scattering_apply(unit, s);
    std::vector<FieldComponent> comps(n, [](double, double, double) { return cplx{}; });
    comps[k] = [](double, double, double) { return cplx{1.0, 0.0}; };
    const auto classical = classical_scattering(ClassicalField(std::move(comps)), PhasePoint(1.0, 1.0), s);
    for (std::size_t l = 0; l < n; ++l) worst = std::max(worst, std::abs(quantum.edge(l)[0] - classical[l]));
  }
  r.lhs = worst;
  r.rhs = 0.0;
  r.pass = worst == 0.0;
  return r;
}

/// auto_grid, lengthened for the unnormalised restriction psi~. Its jump
/// |psi(0)| at the vertex gives a 1/k spectrum whose high modes run far; L is
/// chosen so that their share of the last 5% of the grid stays near 1e-7.
inline Grid lemma41_grid(const CoherentParams& cp, double t_max) {
  const Grid base = auto_grid(cp, t_max);
  const double jump = std::norm(packet(cp, cplx{cp.sigma0(), 0.0})(0.0));
  const double reach = 0.05 * jump * cp.hbar() * std::abs(t_max) / (std::numbers::pi * cp.mass() * 1e-7);
  if (reach <= base.x_max()) return base;
  std::size_t n = base.size();
  while (static_cast<double>(n) * base.dx() < reach) n *= 2;
  return Grid(static_cast<double>(n) * base.dx(), n);
}

/// ||U^±_t psi~ - e^{iA_t/hbar} psi~_{sigma_t, ∓xi_t}|| against (1/sqrt2) e^{-q^2/(4 hbar sigma0^2)}.
/// U^± are contractions, so the tail is measured against ||psi~||^2.
inline ExperimentReport lemma41_check(const CoherentParams& cp, double t, const Grid& g, Sign sign) {
  ExperimentReport r;
  r.id = "lemma41";
  r.params = report_params(cp, 1, nullptr, g, sign_name(sign));
  r.t = t;
  const double hbar = cp.hbar();
  const double s0 = cp.sigma0();
  r.rhs = std::exp(-cp.q() * cp.q() / (4.0 * hbar * s0 * s0)) / std::numbers::sqrt2;

  const EvolvedParams ev = evolve_params(cp, t);
  GaussianPacket target{hbar, s0, ev.sigma_t, ev.q_t, ev.p_t};
  if (sign == Sign::Plus) {
    target.q = -target.q;
    target.p = -target.p;
  }
  const cplx phase = std::exp(cplx{0.0, ev.action / hbar});
  const auto measure = [&](const Grid& grid) {
    const EdgeWave restricted = sample(packet(cp, cplx{s0, 0.0}), grid);
    const HalfPropagators halves = half_propagators(restricted, t, hbar, cp.mass());
    const EdgeWave& evolved = sign == Sign::Minus ? halves.minus : halves.plus;
    const double tail = tail_fraction(evolved) * evolved.norm_squared() / restricted.norm_squared();
    if (tail > kTailError) throw TailMassExceeded(tail, "lemma41 evolved state");
    return Measurement{distance(evolved, phase * sample(target, grid)), tail};
  };
  finish(r, converge(measure, g));
  return r;
}

/// ||Xi - psi~|| against C0 e^{-eps q^2/(hbar |sigma|^2)}.
inline ExperimentReport lemma42_check(const CoherentParams& cp, const CutoffSpec& cut, const Grid& g,
                                      std::optional<cplx> sigma = {}) {
  ExperimentReport r;
  r.id = "lemma42";
  r.params = report_params(cp, 1, &cut, g);
  const cplx sg = sigma.value_or(cplx{cp.sigma0(), 0.0});
  r.rhs = cutoff_bound(cut, cp.hbar(), sg, cp.q());
  const auto measure = [&](const Grid& grid) {
    const EdgeWave xi = truncated_state(cp, sg, cut, grid);
    const EdgeWave raw = sample(packet(cp, sg), grid);
    return Measurement{distance(xi, raw), tail_fraction(xi)};
  };
  finish(r, converge(measure, g));
  return r;
}

inline constexpr double kRingTolerance = 1e-7;

/// Even-n ring states evolve into the evolved ring state up to the phase e^{iA_t/hbar}.
inline ExperimentReport ring_exactness_check(const CoherentParams& cp, double t, const Grid& g, std::size_t n) {
  ExperimentReport r;
  r.id = "ring-exact";
  r.params = report_params(cp, n, nullptr, g);
  r.t = t;
  r.rhs = kRingTolerance;
  r.slack = 0.0;
  const EvolvedParams ev = evolve_params(cp, t);
  const GaussianPacket target{cp.hbar(), cp.sigma0(), ev.sigma_t, ev.q_t, ev.p_t};
  const cplx phase = std::exp(cplx{0.0, ev.action / cp.hbar()});
  const auto measure = [&](const Grid& grid) {
    const GraphWave start = ring_state(cp, cplx{cp.sigma0(), 0.0}, grid, n);
    const GraphWave evolved = kirchhoff_propagate(start, t, cp.hbar(), cp.mass());
    const double tail = guard_tail(evolved, "ring-exact evolved state");
    GraphWave expected = ring_state(target, grid, n);
    expected *= phase;
    return Measurement{distance(evolved, expected), tail};
  };
  finish(r, converge(measure, g, 0));
  return r;
}

// ---------------------------------------------------------------------------
// Half-line Neumann/Dirichlet wave operator

/// phi = chi_{centre, eta} (smooth cut-off profile), normalised on the grid.
struct BumpSpec {
  double centre = 4.0;
  double eta = 0.25;
};

inline EdgeWave bump_state(const BumpSpec& spec, const Grid& g) {
  const CutoffSpec chi = CutoffSpec::smooth(spec.eta);
  EdgeWave out(g);
  for (std::size_t j = 0; j < g.size(); ++j) out[j] = chi(spec.centre, g.node(j));
  out *= 1.0 / out.norm();
  return out;
}

inline Grid default_nd_grid() { return Grid(2048.0, 32768); }

struct NdStudy {
  std::vector<ExperimentReport> reports;
  double constant = 0.0;  ///< defect at |t| = 1
  double slope = 0.0;     ///< least-squares slope of log defect against log |t|
  bool monotone = true;
};

/// Defects ||U^N_{-t} U^D_t phi ∓ F_c^*F_s phi|| at hbar = 1, m = 1/2. The
/// minus sign is evaluated at -|t|. times should include 1, which fixes C.
inline NdStudy nd_decay_study(const BumpSpec& spec, const std::vector<double>& times, Sign sign,
                              const Grid& g = default_nd_grid()) {
  constexpr double hbar = 1.0;
  constexpr double mass = 0.5;
  const double tsign = sign == Sign::Plus ? 1.0 : -1.0;
  NdStudy study;

  std::vector<double> defects;
  std::vector<double> deltas;
  std::vector<double> tails;
  for (const double t : times) {
    double vals[2];
    double tail = 0.0;
    Grid grid = g;
    for (int k = 0; k < 2; ++k, grid = grid.refined()) {
      const EdgeWave phi = bump_state(spec, grid);
      const double tt = tsign * std::abs(t);
      const EdgeWave image = dirichlet_propagate(phi, tt, hbar, mass);
      tail = std::max(tail, guard_tail(image, "nd-decay Dirichlet-evolved state"));
      vals[k] = nd_defect(phi, tt, hbar, mass, sign);
    }
    defects.push_back(vals[1]);
    deltas.push_back(std::abs(vals[1] - vals[0]));
    tails.push_back(tail);
  }

  const auto it = std::find_if(times.begin(), times.end(), [](double t) { return std::abs(t) == 1.0; });
  if (it == times.end()) throw std::invalid_argument("nd_decay_study: time list must contain 1");
  study.constant = defects[static_cast<std::size_t>(it - times.begin())];

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double at = std::abs(times[i]);
    if (at < 1.0) continue;
    const double lx = std::log(at);
    const double ly = std::log(defects[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  const double md = static_cast<double>(m);
  study.slope = m >= 2 ? (md * sxy - sx * sy) / (md * sxx - sx * sx) : 0.0;

  for (std::size_t i = 0; i < times.size(); ++i) {
    ExperimentReport r;
    r.id = "nd-decay";
    r.params.hbar = hbar;
    r.params.mass = mass;
    r.params.q = spec.centre;
    r.params.cutoff = "smooth";
    r.params.eta = spec.eta;
    r.params.x_max = g.refined().x_max();
    r.params.n_points = g.refined().size();
    r.params.sign = sign_name(sign);
    r.t = tsign * std::abs(times[i]);
    r.lhs = defects[i];
    r.rhs = study.constant * std::pow(std::abs(times[i]), -0.25);
    r.refine_delta = deltas[i];
    r.tail_mass = tails[i];
    r.extras["fitted_slope"] = study.slope;
    if (tails[i] > kTailWarn) r.warnings.push_back("tail mass above 1e-10");
    r.pass = bound_holds(r);
    if (i > 0 && std::abs(times[i]) > std::abs(times[i - 1]) && defects[i] > defects[i - 1] + deltas[i] + 1e-12)
      study.monotone = false;
    study.reports.push_back(std::move(r));
  }
  return study;
}

}  // namespace stargraph
