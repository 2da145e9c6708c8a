#pragma once

// Classical transport on the half-line and the star graph. Fields are
// evaluated lazily: every operation here maps an evaluation point (x, q, p)
// to the point(s) at which the input field must be read.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "stargraph/grid.hpp"
#include "stargraph/phase_space.hpp"
#include "stargraph/quantum_graph.hpp"

namespace stargraph {

/// Where the free flow puts q after time t, and whether it hit the vertex.
struct FlowFoot {
  double q;  ///< q + p t / m
  bool free() const { return q > 0.0; }
  bool collision() const { return q == 0.0; }
};

inline FlowFoot flow_foot(const PhasePoint& xi, double t, double mass) { return {xi.q + xi.p * t / mass}; }

/// True when q + p t / m lands exactly on the vertex, where transported
/// values are defined as zero.
inline bool on_collision(const PhasePoint& xi, double t, double mass) { return flow_foot(xi, t, mass).collision(); }

/// (e^{itL_D} f)(q, p) for a one-component field.
inline cplx liouville_halfline(const ClassicalField& f, double t, double mass, const PhasePoint& xi, double x = 0.0) {
  if (f.size() != 1) throw DimensionMismatch("liouville_halfline: field must have one component");
  const FlowFoot foot = flow_foot(xi, t, mass);
  if (foot.collision()) return {};
  if (foot.free()) return f(0, x, foot.q, xi.p);
  return -f(0, x, -foot.q, -xi.p);
}

/// (e^{itL_K} F)(q, p) for an involutive S: the free branch reads F at the
/// advected point, the reflected branch mixes with -S (2/n - delta for
/// Kirchhoff).
inline std::vector<cplx> liouville_kirchhoff(const ClassicalField& f, double t, double mass, const PhasePoint& xi,
                                             const SMatrix& s, double x = 0.0) {
  const std::size_t n = f.size();
  if (s.size() != n) throw DimensionMismatch("liouville_kirchhoff: matrix size != field size");
  std::vector<cplx> out(n);
  const FlowFoot foot = flow_foot(xi, t, mass);
  if (foot.collision()) return out;
  if (foot.free()) {
    for (std::size_t l = 0; l < n; ++l) out[l] = f(l, x, foot.q, xi.p);
    return out;
  }
  std::vector<cplx> mirrored(n);
  for (std::size_t l = 0; l < n; ++l) mirrored[l] = f(l, x, -foot.q, -xi.p);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < n; ++k) out[l] -= s(l, k) * mirrored[k];
  return out;
}

inline std::vector<cplx> liouville_kirchhoff(const ClassicalField& f, double t, double mass, const PhasePoint& xi,
                                             double x = 0.0) {
  return liouville_kirchhoff(f, t, mass, xi, kirchhoff_s_matrix(f.size()), x);
}

/// e^{itL_K} F as a field in its own right.
inline ClassicalField liouville_field(const ClassicalField& f, double t, double mass, const SMatrix& s) {
  std::vector<FieldComponent> comps;
  comps.reserve(f.size());
  for (std::size_t l = 0; l < f.size(); ++l)
    comps.emplace_back([f, t, mass, s, l](double x, double q, double p) {
      return liouville_kirchhoff(f, t, mass, PhasePoint(q, p), s, x)[l];
    });
  return ClassicalField(std::move(comps));
}

/// Omega_cl^± F(xi) = [theta(±p) 1 + theta(∓p) S] F(xi); p = 0 leaves F unchanged.
inline std::vector<cplx> classical_wave_op(const ClassicalField& f, Sign sign, const PhasePoint& xi, const SMatrix& s,
                                           double x = 0.0) {
  const std::size_t n = f.size();
  if (s.size() != n) throw DimensionMismatch("classical_wave_op: matrix size != field size");
  std::vector<cplx> values(n);
  for (std::size_t l = 0; l < n; ++l) values[l] = f(l, x, xi.q, xi.p);
  const double sp = sign_value(sign) * xi.p;
  if (sp >= 0.0) return values;
  std::vector<cplx> out(n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < n; ++k) out[l] += s(l, k) * values[k];
  return out;
}

/// S F(xi), the classical scattering operator.
inline std::vector<cplx> classical_scattering(const ClassicalField& f, const PhasePoint& xi, const SMatrix& s,
                                              double x = 0.0) {
  const std::size_t n = f.size();
  if (s.size() != n) throw DimensionMismatch("classical_scattering: matrix size != field size");
  std::vector<cplx> out(n);
  for (std::size_t l = 0; l < n; ++l) {
    const cplx v = f(l, x, xi.q, xi.p);
    for (std::size_t k = 0; k < n; ++k) out[k] += s(k, l) * v;
  }
  return out;
}

/// Barra-Gaspard density at time t: rho_l(q - pt/m, p) on the free branch,
/// sum_l' |S_{l l'}|^2 rho_l'(-q + pt/m, -p) on the reflected one.
/// Components of rho are read as real densities.
inline std::vector<double> bg_density_transport(const ClassicalField& rho, double t, double mass, const PhasePoint& xi,
                                                const SMatrix& s, double x = 0.0) {
  const std::size_t n = rho.size();
  if (s.size() != n) throw DimensionMismatch("bg_density_transport: matrix size != field size");
  std::vector<double> out(n, 0.0);
  const double back = xi.q - xi.p * t / mass;
  if (back == 0.0) return out;
  if (back > 0.0) {
    for (std::size_t l = 0; l < n; ++l) out[l] = rho(l, x, back, xi.p).real();
    return out;
  }
  std::vector<double> mirrored(n);
  for (std::size_t l = 0; l < n; ++l) {
    mirrored[l] = rho(l, x, -back, -xi.p).real();
    if (mirrored[l] < 0.0) throw std::invalid_argument("bg_density_transport: negative density");
  }
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < n; ++k) out[l] += s(l, k) * s(l, k) * mirrored[k];
  return out;
}

/// Samples x -> values(x) on every node of the grid as an n-edge wave.
inline GraphWave render(const std::function<std::vector<cplx>(double)>& values, const Grid& grid, std::size_t n) {
  GraphWave out(grid, n);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto v = values(grid.node(j));
    if (v.size() != n) throw DimensionMismatch("render: value count != edge count");
    for (std::size_t l = 0; l < n; ++l) out.edge(l)[j] = v[l];
  }
  return out;
}

/// Field F evaluated at fixed xi, as a function of the spectator position x.
inline GraphWave render_field(const ClassicalField& f, const Grid& grid, const PhasePoint& xi) {
  return render(
      [&](double x) {
        std::vector<cplx> v(f.size());
        for (std::size_t l = 0; l < f.size(); ++l) v[l] = f(l, x, xi.q, xi.p);
        return v;
      },
      grid, f.size());
}

/// (sum_l int dx |F_l(x; xi) - G_l(x; xi)|^2)^{1/2} by the grid quadrature.
inline double classical_graph_distance_asfield(const ClassicalField& f, const ClassicalField& g, const Grid& grid,
                                               const PhasePoint& xi) {
  if (f.size() != g.size()) throw DimensionMismatch("classical_graph_distance_asfield: component count mismatch");
  return distance(render_field(f, grid, xi), render_field(g, grid, xi));
}

}  // namespace stargraph
