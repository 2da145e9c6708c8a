#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "stargraph/grid.hpp"
#include "stargraph/phase_space.hpp"

namespace stargraph {

/// (hbar, m, sigma0, q, p) of a Gaussian coherent state on the line.
class CoherentParams {
 public:
  CoherentParams(double hbar, double mass, double sigma0, double q, double p)
      : hbar_(hbar), mass_(mass), sigma0_(sigma0), q_(q), p_(p) {
    if (!(hbar > 0.0)) throw std::invalid_argument("CoherentParams: hbar must be > 0");
    if (!(mass > 0.0)) throw std::invalid_argument("CoherentParams: mass must be > 0");
    if (!(sigma0 > 0.0)) throw std::invalid_argument("CoherentParams: sigma0 must be > 0");
    if (!(q > 0.0)) throw std::invalid_argument("CoherentParams: q must be > 0");
    if (!std::isfinite(p)) throw std::invalid_argument("CoherentParams: p must be finite");
  }

  double hbar() const { return hbar_; }
  double mass() const { return mass_; }
  double sigma0() const { return sigma0_; }
  double q() const { return q_; }
  double p() const { return p_; }

  CoherentParams with_hbar(double h) const { return {h, mass_, sigma0_, q_, p_}; }
  CoherentParams with_momentum(double p) const { return {hbar_, mass_, sigma0_, q_, p}; }

 private:
  double hbar_, mass_, sigma0_, q_, p_;
};

/// Free-flow parameters at time t: centre, action and complex width.
struct EvolvedParams {
  double q_t;
  double p_t;
  double action;
  cplx sigma_t;
};

inline EvolvedParams evolve_params(const CoherentParams& cp, double t) {
  const double m = cp.mass();
  return {cp.q() + cp.p() * t / m, cp.p(), cp.p() * cp.p() * t / (2.0 * m),
          cplx{cp.sigma0(), t / (2.0 * m * cp.sigma0())}};
}

/// Continue an already evolved parameter set by a further time t.
inline EvolvedParams evolve_params(const CoherentParams& cp, const EvolvedParams& from, double t) {
  const double m = cp.mass();
  return {from.q_t + from.p_t * t / m, from.p_t, from.action + from.p_t * from.p_t * t / (2.0 * m),
          from.sigma_t + cplx{0.0, t / (2.0 * m * cp.sigma0())}};
}

/// psi_{sigma,(q,p)}(x) on the whole line; the centre may be any real point.
struct GaussianPacket {
  double hbar;
  double sigma0;
  cplx sigma;
  double q;
  double p;

  cplx operator()(double x) const {
    const double d = x - q;
    const cplx prefactor = 1.0 / (std::pow(2.0 * std::numbers::pi * hbar, 0.25) * std::sqrt(sigma));
    const cplx exponent = -d * d / (4.0 * hbar * sigma0 * sigma) + cplx{0.0, p * d / hbar};
    return prefactor * std::exp(exponent);
  }

  /// |psi|^2 is a normal density with this standard deviation.
  double spread() const { return std::sqrt(hbar) * std::abs(sigma); }
};

inline GaussianPacket packet(const CoherentParams& cp, cplx sigma) {
  return {cp.hbar(), cp.sigma0(), sigma, cp.q(), cp.p()};
}

inline cplx coherent_eval(const CoherentParams& cp, cplx sigma, double x) {
  if (std::abs(sigma.real() - cp.sigma0()) > 1e-12 * cp.sigma0())
    throw std::invalid_argument("coherent_eval: Re(sigma) must equal sigma0");
  return packet(cp, sigma)(x);
}

// ---------------------------------------------------------------------------
// Cut-off functions chi_{q,eta}

class CutoffSpec {
 public:
  enum class Kind { Bare, Sharp, Smooth };

  static CutoffSpec bare() { return CutoffSpec(Kind::Bare, 1.0); }
  static CutoffSpec sharp(double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("sharp cutoff: eta must be in (0,1]");
    return CutoffSpec(Kind::Sharp, eta);
  }
  static CutoffSpec smooth(double eta) {
    if (!(eta > 0.0 && eta < 0.5)) throw std::invalid_argument("smooth cutoff: eta must be in (0,1/2)");
    return CutoffSpec(Kind::Smooth, eta);
  }

  Kind kind() const { return kind_; }
  /// Bare behaves as the sharp cut-off with eta = 1.
  double eta() const { return eta_; }
  double sup_norm() const { return 1.0; }

  std::string name() const {
    switch (kind_) {
      case Kind::Bare: return "bare";
      case Kind::Sharp: return "sharp";
      case Kind::Smooth: return "smooth";
    }
    return "";
  }

  double operator()(double q, double x) const {
    if (x <= 0.0) return 0.0;
    switch (kind_) {
      case Kind::Bare: return 1.0;
      case Kind::Sharp: return x > (1.0 - eta_) * q ? 1.0 : 0.0;
      case Kind::Smooth: {
        const double d = std::abs(x - q);
        const double inner = eta_ * q;
        const double outer = (1.0 - eta_) * q;
        if (d <= inner) return 1.0;
        if (d >= outer) return 0.0;
        return 1.0 - smooth_step((d - inner) / (outer - inner));
      }
    }
    return 0.0;
  }

  /// C^infinity step from 0 (s <= 0) to 1 (s >= 1).
  static double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
  }

 private:
  CutoffSpec(Kind k, double eta) : kind_(k), eta_(eta) {}
  Kind kind_;
  double eta_;
};

/// Constants (C0, eps) of the bound ||Xi - psi~|| <= C0 exp(-eps q^2 / (hbar |sigma|^2)).
/// eps is taken at half of its admissible supremum min{1/4, eta^2/8}.
struct CutoffConstants {
  double c0;
  double eps;
};

inline CutoffConstants cutoff_constants(const CutoffSpec& cut) {
  const double c0 = 1.0 / std::numbers::sqrt2 + std::pow(2.0, 1.25) * (1.0 + cut.sup_norm());
  const double eta = cut.eta();
  return {c0, 0.5 * std::min(0.25, eta * eta / 8.0)};
}

inline double cutoff_bound(const CutoffSpec& cut, double hbar, cplx sigma, double q) {
  const auto [c0, eps] = cutoff_constants(cut);
  return c0 * std::exp(-eps * q * q / (hbar * std::norm(sigma)));
}

// ---------------------------------------------------------------------------
// Truncated coherent states

/// Continuum norm ||chi_{q,eta} psi~_{sigma,(q,p)}||_{L^2(R+)}.
inline double truncated_norm(const GaussianPacket& g, const CutoffSpec& cut) {
  const double s = g.spread();
  const double q = g.q;
  const auto gaussian_mass = [&](double a) { return 0.5 * std::erfc(a / (std::numbers::sqrt2 * s)); };
  switch (cut.kind()) {
    case CutoffSpec::Kind::Bare: return std::sqrt(gaussian_mass(-q));
    case CutoffSpec::Kind::Sharp: return std::sqrt(gaussian_mass(-cut.eta() * q));
    case CutoffSpec::Kind::Smooth: {
      const double inner = cut.eta() * q;
      const double outer = (1.0 - cut.eta()) * q;
      const double plateau = std::erf(inner / (std::numbers::sqrt2 * s));
      const auto density = [&](double d) {
        const double chi = cut(q, q + d);
        return chi * chi * std::exp(-d * d / (2.0 * s * s)) / (std::sqrt(2.0 * std::numbers::pi) * s);
      };
      const double ramp =
          boost::math::quadrature::gauss_kronrod<double, 61>::integrate(density, inner, outer, 15, 1e-14);
      return std::sqrt(plateau + 2.0 * ramp);
    }
  }
  return 0.0;
}

/// Xi^hbar_{sigma,xi}(x) normalised in L^2(R+); zero for a centre q <= 0.
inline cplx truncated_value(const GaussianPacket& g, const CutoffSpec& cut, double x, double norm) {
  if (g.q <= 0.0 || x <= 0.0 || norm == 0.0) return {};
  const double chi = cut(g.q, x);
  return chi == 0.0 ? cplx{} : chi * g(x) / norm;
}

inline EdgeWave sample(const GaussianPacket& g, const Grid& grid) {
  EdgeWave out(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) out[j] = g(grid.node(j));
  return out;
}

/// Grid samples of chi * psi~ normalised to unit discrete norm.
inline EdgeWave truncated_state(const GaussianPacket& g, const CutoffSpec& cut, const Grid& grid) {
  if (!(g.q > 0.0)) throw std::invalid_argument("truncated_state: centre must satisfy q > 0");
  EdgeWave out(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.node(j);
    out[j] = cut(g.q, x) * g(x);
  }
  const double nrm = out.norm();
  if (nrm == 0.0) throw std::invalid_argument("truncated_state: cut-off support misses the grid");
  out *= 1.0 / nrm;
  guard_tail(out, "truncated_state");
  return out;
}

inline EdgeWave truncated_state(const CoherentParams& cp, cplx sigma, const CutoffSpec& cut, const Grid& grid) {
  return truncated_state(packet(cp, sigma), cut, grid);
}

/// Xi on edge 1, zero elsewhere.
inline GraphWave graph_initial_state(const CoherentParams& cp, cplx sigma, const CutoffSpec& cut,
                                     const Grid& grid, std::size_t n_edges) {
  GraphWave out(grid, n_edges);
  out.edge(0) = truncated_state(cp, sigma, cut, grid);
  return out;
}

class OddEdgeCount : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Even-n state: psi_{sigma,xi} on the first n/2 edges and psi_{sigma,-xi} on
/// the rest, restricted to the half-line without renormalisation.
inline GraphWave ring_state(const GaussianPacket& g, const Grid& grid, std::size_t n_edges) {
  if (n_edges == 0 || n_edges % 2 != 0) throw OddEdgeCount("ring_state: edge count must be even");
  GaussianPacket mirrored = g;
  mirrored.q = -g.q;
  mirrored.p = -g.p;
  const EdgeWave forward = sample(g, grid);
  const EdgeWave backward = sample(mirrored, grid);
  GraphWave out(grid, n_edges);
  for (std::size_t l = 0; l < n_edges; ++l) out.edge(l) = l < n_edges / 2 ? forward : backward;
  return out;
}

inline GraphWave ring_state(const CoherentParams& cp, cplx sigma, const Grid& grid, std::size_t n_edges) {
  return ring_state(packet(cp, sigma), grid, n_edges);
}

/// Classical counterpart of graph_initial_state: component 1 evaluates at
/// (x, q', p') to Xi_{sigma,(q',p')}(x), the other components vanish.
inline ClassicalField classical_field(const CoherentParams& cp, cplx sigma, const CutoffSpec& cut,
                                     std::size_t n_edges = 1) {
  if (n_edges == 0) throw std::invalid_argument("classical_field: need at least one edge");
  const double hbar = cp.hbar();
  const double sigma0 = cp.sigma0();
  // The norm depends on the centre q only; renders query one q many times.
  struct NormMemo {
    std::mutex mutex;
    double q = 0.0;
    double norm = 0.0;
  };
  auto memo = std::make_shared<NormMemo>();
  FieldComponent first = [=](double x, double q, double p) -> cplx {
    if (!(q > 0.0)) return {};
    const GaussianPacket g{hbar, sigma0, sigma, q, p};
    double norm;
    {
      std::lock_guard lock(memo->mutex);
      if (memo->q != q) {
        memo->norm = truncated_norm(g, cut);
        memo->q = q;
      }
      norm = memo->norm;
    }
    return truncated_value(g, cut, x, norm);
  };
  std::vector<FieldComponent> comps(n_edges, [](double, double, double) { return cplx{}; });
  comps[0] = std::move(first);
  return ClassicalField(std::move(comps));
}

}  // namespace stargraph
