#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "stargraph/grid.hpp"
#include "stargraph/spectral.hpp"

namespace stargraph {

/// Real symmetric involutive n x n vertex matrix.
class SMatrix {
 public:
  /// Validates symmetry and S^2 = 1 to 1e-14.
  static SMatrix from_entries(std::size_t n, std::vector<double> entries) {
    if (n == 0) throw std::invalid_argument("SMatrix: n must be >= 1");
    if (entries.size() != n * n) throw DimensionMismatch("SMatrix: need n*n entries");
    SMatrix s(n, std::move(entries));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(s(i, j) - s(j, i)) > 1e-14) throw std::invalid_argument("SMatrix: not symmetric");
        double sq = 0.0;
        for (std::size_t k = 0; k < n; ++k) sq += s(i, k) * s(k, j);
        if (std::abs(sq - (i == j ? 1.0 : 0.0)) > 1e-14) throw std::invalid_argument("SMatrix: S^2 != 1");
      }
    return s;
  }

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  const std::vector<double>& entries() const { return entries_; }

  bool is_kirchhoff(double tol = 1e-14) const {
    const double nd = static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (std::abs((*this)(i, j) - ((i == j ? nd : 0.0) - 2.0) / nd) > tol) return false;
    return true;
  }

 private:
  friend SMatrix kirchhoff_s_matrix(std::size_t n);
  SMatrix(std::size_t n, std::vector<double> e) : n_(n), entries_(std::move(e)) {}
  std::size_t n_;
  std::vector<double> entries_;
};

/// S = 1 - (2/n) J.
inline SMatrix kirchhoff_s_matrix(std::size_t n) {
  if (n == 0) throw std::invalid_argument("kirchhoff_s_matrix: n must be >= 1");
  std::vector<double> e(n * n);
  const double nd = static_cast<double>(n);
  // (n delta - 2) / n is exact in the numerator, so each entry is correctly rounded.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) e[i * n + j] = ((i == j ? nd : 0.0) - 2.0) / nd;
  return SMatrix(n, std::move(e));
}

/// (S Psi)_l = sum_l' S_{l l'} Psi_l'.
inline GraphWave scattering_apply(const GraphWave& psi, const SMatrix& s) {
  const std::size_t n = psi.edge_count();
  if (s.size() != n) throw DimensionMismatch("scattering_apply: matrix size != edge count");
  GraphWave out(psi.grid(), n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < n; ++k) {
      const double c = s(l, k);
      if (c == 0.0) continue;
      auto& dst = out.edge(l).samples;
      const auto& src = psi.edge(k).samples;
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += c * src[j];
    }
  return out;
}

/// e^{-itH/hbar} for the vertex condition encoded by S:
/// out_l = U^-_t Psi_l - sum_l' S_{l l'} U^+_t Psi_l'.
inline GraphWave kirchhoff_propagate(const GraphWave& psi, double t, double hbar, double mass, const SMatrix& s) {
  const std::size_t n = psi.edge_count();
  if (s.size() != n) throw DimensionMismatch("kirchhoff_propagate: matrix size != edge count");
  std::vector<EdgeWave> minus, plus;
  minus.reserve(n);
  plus.reserve(n);
  for (const auto& e : psi.edges()) {
    auto halves = half_propagators(e, t, hbar, mass);
    minus.push_back(std::move(halves.minus));
    plus.push_back(std::move(halves.plus));
  }
  GraphWave reflected = scattering_apply(GraphWave(std::move(plus)), s);
  GraphWave out(std::move(minus));
  out -= reflected;
  return out;
}

inline GraphWave kirchhoff_propagate(const GraphWave& psi, double t, double hbar, double mass) {
  return kirchhoff_propagate(psi, t, hbar, mass, kirchhoff_s_matrix(psi.edge_count()));
}

/// Edgewise U^D = U^- - U^+.
inline GraphWave dirichlet_graph_propagate(const GraphWave& psi, double t, double hbar, double mass) {
  std::vector<EdgeWave> out;
  out.reserve(psi.edge_count());
  for (const auto& e : psi.edges()) out.push_back(dirichlet_propagate(e, t, hbar, mass));
  return GraphWave(std::move(out));
}

enum class Sign { Plus = +1, Minus = -1 };

inline double sign_value(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }
inline const char* sign_name(Sign s) { return s == Sign::Plus ? "+" : "-"; }

namespace detail {

// Psi_l - (1/n) sum_l' (1 -/+ T) Psi_l', where T is cosine_of_sine or its adjoint.
template <class Transform>
GraphWave kirchhoff_wave_form(const GraphWave& psi, Sign sign, const SMatrix& s, Transform&& transform) {
  if (!s.is_kirchhoff()) throw std::invalid_argument("wave_operator: only the Kirchhoff vertex matrix is supported");
  const std::size_t n = psi.edge_count();
  if (s.size() != n) throw DimensionMismatch("wave_operator: matrix size != edge count");
  EdgeWave total(psi.grid());
  for (const auto& e : psi.edges()) total += e;
  const EdgeWave mapped = transform(total);
  const double sg = sign_value(sign);
  const double inv_n = 1.0 / static_cast<double>(n);
  GraphWave out = psi;
  for (std::size_t l = 0; l < n; ++l) {
    auto& dst = out.edge(l).samples;
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] -= inv_n * (total[j] - sg * mapped[j]);
  }
  return out;
}

}  // namespace detail

/// Omega^± = 1 - (1/n) J (1 ∓ F_c^* F_s) on the Kirchhoff star graph.
inline GraphWave wave_operator(const GraphWave& psi, Sign sign, const SMatrix& s) {
  return detail::kirchhoff_wave_form(psi, sign, s, [](const EdgeWave& f) { return cosine_of_sine(f); });
}

/// (Omega^±)^* = 1 - (1/n) J (1 ∓ F_s^* F_c).
inline GraphWave wave_operator_adjoint(const GraphWave& psi, Sign sign, const SMatrix& s) {
  return detail::kirchhoff_wave_form(psi, sign, s, [](const EdgeWave& f) { return sine_of_cosine(f); });
}

/// Omega^±_ND = ± F_c^* F_s on the half-line.
inline EdgeWave wave_operator_nd(const EdgeWave& psi, Sign sign) {
  EdgeWave out = cosine_of_sine(psi);
  if (sign == Sign::Minus) out *= -1.0;
  return out;
}

/// || U^N_{-t} U^D_t phi ∓ F_c^* F_s phi ||.
inline double nd_defect(const EdgeWave& phi, double t, double hbar, double mass, Sign sign) {
  const EdgeWave evolved = neumann_propagate(dirichlet_propagate(phi, t, hbar, mass), -t, hbar, mass);
  return distance(evolved, wave_operator_nd(phi, sign));
}

// ---------------------------------------------------------------------------
// Vertex-condition diagnostics

/// Finite-difference weights at x0 for derivatives 0..max_order on arbitrary
/// nodes (Fornberg's recursion). Result is weights[order][node].
inline std::vector<std::vector<double>> fd_weights(const std::vector<double>& nodes, double x0, std::size_t max_order) {
  const std::size_t n = nodes.size();
  std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k)
          c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k)
        c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

struct BoundaryResidual {
  double continuity;  ///< max_{l,l'} |psi_l(0+) - psi_l'(0+)|
  double flux;        ///< |sum_l psi_l'(0+)|
  double norm;        ///< ||Psi||, for normalising the two residuals
};

/// Boundary values and derivatives at the vertex are extrapolated from the
/// first nodes with fourth-order one-sided stencils (4 nodes for the value,
/// 5 for the derivative).
inline BoundaryResidual kirchhoff_bc_residual(const GraphWave& psi) {
  const Grid& g = psi.grid();
  std::vector<double> nodes(5);
  for (std::size_t j = 0; j < 5; ++j) nodes[j] = g.node(j);
  const auto value_w = fd_weights({nodes.begin(), nodes.begin() + 4}, 0.0, 0)[0];
  const auto deriv_w = fd_weights(nodes, 0.0, 1)[1];

  std::vector<cplx> values;
  cplx flux{};
  for (const auto& e : psi.edges()) {
    cplx v{}, d{};
    for (std::size_t j = 0; j < 4; ++j) v += value_w[j] * e[j];
    for (std::size_t j = 0; j < 5; ++j) d += deriv_w[j] * e[j];
    values.push_back(v);
    flux += d;
  }
  double cont = 0.0;
  for (std::size_t a = 0; a < values.size(); ++a)
    for (std::size_t b = a + 1; b < values.size(); ++b) cont = std::max(cont, std::abs(values[a] - values[b]));
  return {cont, std::abs(flux), psi.norm()};
}

}  // namespace stargraph
