#pragma once

// Reference implementations for the tests. Everything here is a direct
// O(N^2) sum over modes or nodes in long double and never touches FFTW.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "stargraph/grid.hpp"

namespace oracle {

using stargraph::cplx;
using stargraph::EdgeWave;
using stargraph::Grid;
using lcplx = std::complex<long double>;

inline constexpr long double kPi = std::numbers::pi_v<long double>;

inline long double node(const Grid& g, std::size_t j) {
  return (static_cast<long double>(j) + 0.5L) * static_cast<long double>(g.x_max()) / static_cast<long double>(g.size());
}
inline long double wavenumber(const Grid& g, std::size_t r) {
  return static_cast<long double>(r) * kPi / static_cast<long double>(g.x_max());
}
inline long double dx(const Grid& g) { return static_cast<long double>(g.x_max()) / g.size(); }
inline long double dk(const Grid& g) { return kPi / static_cast<long double>(g.x_max()); }

/// Sine coefficients c_r, r = 1..N (stored at r-1).
inline std::vector<cplx> sine_forward(const EdgeWave& f) {
  const Grid& g = f.grid;
  const std::size_t n = g.size();
  const long double pref = std::sqrt(2.0L / kPi) * dx(g);
  std::vector<cplx> out(n);
  for (std::size_t r = 1; r <= n; ++r) {
    lcplx acc = 0;
    for (std::size_t j = 0; j < n; ++j) acc += std::sin(wavenumber(g, r) * node(g, j)) * lcplx(f[j]);
    out[r - 1] = cplx(lcplx(0, -pref) * acc);
  }
  return out;
}

inline EdgeWave sine_inverse(const Grid& g, const std::vector<cplx>& c) {
  const std::size_t n = g.size();
  const long double pref = std::sqrt(2.0L / kPi) * dk(g);
  EdgeWave out(g);
  for (std::size_t j = 0; j < n; ++j) {
    lcplx acc = 0;
    for (std::size_t r = 1; r <= n; ++r) {
      const long double w = r == n ? 0.5L : 1.0L;
      acc += w * std::sin(wavenumber(g, r) * node(g, j)) * lcplx(c[r - 1]);
    }
    out[j] = cplx(lcplx(0, pref) * acc);
  }
  return out;
}

/// Cosine coefficients c_r, r = 0..N-1.
inline std::vector<cplx> cosine_forward(const EdgeWave& f) {
  const Grid& g = f.grid;
  const std::size_t n = g.size();
  const long double pref = std::sqrt(2.0L / kPi) * dx(g);
  std::vector<cplx> out(n);
  for (std::size_t r = 0; r < n; ++r) {
    lcplx acc = 0;
    for (std::size_t j = 0; j < n; ++j) acc += std::cos(wavenumber(g, r) * node(g, j)) * lcplx(f[j]);
    out[r] = cplx(pref * acc);
  }
  return out;
}

inline EdgeWave cosine_inverse(const Grid& g, const std::vector<cplx>& c) {
  const std::size_t n = g.size();
  const long double pref = std::sqrt(2.0L / kPi) * dk(g);
  EdgeWave out(g);
  for (std::size_t j = 0; j < n; ++j) {
    lcplx acc = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const long double w = r == 0 ? 0.5L : 1.0L;
      acc += w * std::cos(wavenumber(g, r) * node(g, j)) * lcplx(c[r]);
    }
    out[j] = cplx(pref * acc);
  }
  return out;
}

inline lcplx phase(long double k, double t, double hbar, double mass) {
  const long double a = -static_cast<long double>(hbar) * k * k * t / (2.0L * mass);
  return {std::cos(a), std::sin(a)};
}

/// Kernel of e^{-itH/hbar} built from the sine (dirichlet) or cosine modes:
/// K(x_i, x_j) = (2/pi) dk dx sum_r w_r phase_r mode_r(x_i) mode_r(x_j).
inline std::vector<lcplx> kernel(const Grid& g, double t, double hbar, double mass, bool dirichlet) {
  const std::size_t n = g.size();
  std::vector<lcplx> k(n * n);
  const long double pref = 2.0L / kPi * dk(g) * dx(g);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      lcplx acc = 0;
      if (dirichlet) {
        for (std::size_t r = 1; r <= n; ++r) {
          const long double w = r == n ? 0.5L : 1.0L;
          const long double kr = wavenumber(g, r);
          acc += w * phase(kr, t, hbar, mass) * std::sin(kr * node(g, i)) * std::sin(kr * node(g, j));
        }
      } else {
        for (std::size_t r = 0; r < n; ++r) {
          const long double w = r == 0 ? 0.5L : 1.0L;
          const long double kr = wavenumber(g, r);
          acc += w * phase(kr, t, hbar, mass) * std::cos(kr * node(g, i)) * std::cos(kr * node(g, j));
        }
      }
      k[i * n + j] = pref * acc;
    }
  return k;
}

inline EdgeWave apply_kernel(const std::vector<lcplx>& k, const EdgeWave& f) {
  const std::size_t n = f.size();
  EdgeWave out(f.grid);
  for (std::size_t i = 0; i < n; ++i) {
    lcplx acc = 0;
    for (std::size_t j = 0; j < n; ++j) acc += k[i * n + j] * lcplx(f[j]);
    out[i] = cplx(acc);
  }
  return out;
}

inline EdgeWave dirichlet(const EdgeWave& f, double t, double hbar, double mass) {
  return apply_kernel(kernel(f.grid, t, hbar, mass, true), f);
}
inline EdgeWave neumann(const EdgeWave& f, double t, double hbar, double mass) {
  return apply_kernel(kernel(f.grid, t, hbar, mass, false), f);
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}
inline double max_abs_diff(const EdgeWave& a, const EdgeWave& b) { return max_abs_diff(a.samples, b.samples); }

/// Independent complex Gaussian samples.
inline EdgeWave random_wave(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  EdgeWave out(g);
  for (auto& v : out.samples) v = {nd(rng), nd(rng)};
  return out;
}

/// Smooth random state: a few Gaussian packets with random centres, widths,
/// momenta and amplitudes, kept away from x = 0 and x = L.
inline EdgeWave random_packets(const Grid& g, std::mt19937_64& rng, int count = 3) {
  std::uniform_real_distribution<double> centre(0.4 * g.x_max(), 0.6 * g.x_max());
  std::uniform_real_distribution<double> width(0.03 * g.x_max(), 0.05 * g.x_max());
  std::uniform_real_distribution<double> momentum(-3.0, 3.0);
  std::normal_distribution<double> amp;
  EdgeWave out(g);
  for (int c = 0; c < count; ++c) {
    const double x0 = centre(rng), w = width(rng), k0 = momentum(rng);
    const cplx a{amp(rng), amp(rng)};
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double d = (g.node(j) - x0) / w;
      out[j] += a * std::exp(cplx{-0.5 * d * d, k0 * g.node(j)});
    }
  }
  return out;
}

}  // namespace oracle
