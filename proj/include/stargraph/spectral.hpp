#pragma once

// Half-line Fourier sine/cosine transforms and the spectral propagators
// U^D, U^N and U^-/U^+ on a cell-centred grid.
//
// Discrete conventions (dx = L/N, dk = pi/L, x_j = (j+1/2)dx):
//   (F_s f)(k_r) = -i sqrt(2/pi) dx sum_j sin(k_r x_j) f_j,   r = 1..N
//   (F_c f)(k_r) =    sqrt(2/pi) dx sum_j cos(k_r x_j) f_j,   r = 0..N-1
// with spectral inner products weighted by dk and a half weight on the
// sine mode r = N and the cosine mode r = 0. Both maps are exactly unitary.

#include <fftw3.h>

#include <map>
#include <mutex>
#include <span>
#include <utility>

#include "stargraph/grid.hpp"

namespace stargraph {

namespace detail {

enum class R2RKind { DstII, DstIII, DctII, DctIII };

inline fftw_r2r_kind fftw_kind(R2RKind k) {
  switch (k) {
    case R2RKind::DstII: return FFTW_RODFT10;
    case R2RKind::DstIII: return FFTW_RODFT01;
    case R2RKind::DctII: return FFTW_REDFT10;
    case R2RKind::DctIII: return FFTW_REDFT01;
  }
  return FFTW_REDFT10;
}

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  // Planner calls are not thread-safe in FFTW; execution on new arrays is.
  fftw_plan get(R2RKind kind, int n) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(static_cast<int>(kind), n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<double> scratch(2 * static_cast<std::size_t>(n));
    const fftw_r2r_kind k = fftw_kind(kind);
    // Interleaved complex data: two real transforms with stride 2, distance 1.
    fftw_plan plan = fftw_plan_many_r2r(1, &n, 2, scratch.data(), nullptr, 2, 1, scratch.data(),
                                        nullptr, 2, 1, &k, FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

inline PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

/// Unnormalised FFTW r2r transform of complex data (real and imaginary parts
/// transformed independently), in place.
inline void r2r_inplace(R2RKind kind, std::span<cplx> data) {
  fftw_plan plan = plan_cache().get(kind, static_cast<int>(data.size()));
  auto* raw = reinterpret_cast<double*>(data.data());
  fftw_execute_r2r(plan, raw, raw);
}

}  // namespace detail

/// Sine coefficients; coeffs[r-1] is the value at k_r, r = 1..N.
struct SineSpectrum {
  Grid grid;
  std::vector<cplx> coeffs;

  double weight(std::size_t index) const { return index + 1 == coeffs.size() ? 0.5 : 1.0; }
  double wavenumber(std::size_t index) const { return grid.wavenumber(index + 1); }
  double norm_squared() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) acc += weight(i) * std::norm(coeffs[i]);
    return acc * grid.dk();
  }
};

/// Cosine coefficients; coeffs[r] is the value at k_r, r = 0..N-1.
struct CosineSpectrum {
  Grid grid;
  std::vector<cplx> coeffs;

  double weight(std::size_t index) const { return index == 0 ? 0.5 : 1.0; }
  double wavenumber(std::size_t index) const { return grid.wavenumber(index); }
  double norm_squared() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) acc += weight(i) * std::norm(coeffs[i]);
    return acc * grid.dk();
  }
};

inline SineSpectrum fs_forward(const EdgeWave& f) {
  SineSpectrum out{f.grid, f.samples};
  detail::r2r_inplace(detail::R2RKind::DstII, out.coeffs);
  // FFTW's RODFT10 carries a factor 2 relative to the plain sum.
  const cplx scale{0.0, -std::sqrt(2.0 / std::numbers::pi) * f.grid.dx() * 0.5};
  for (auto& c : out.coeffs) c *= scale;
  return out;
}

inline EdgeWave fs_inverse(const SineSpectrum& s) {
  EdgeWave out(s.grid, s.coeffs);
  detail::r2r_inplace(detail::R2RKind::DstIII, out.samples);
  const cplx scale{0.0, std::sqrt(2.0 / std::numbers::pi) * s.grid.dk() * 0.5};
  for (auto& v : out.samples) v *= scale;
  return out;
}

inline CosineSpectrum fc_forward(const EdgeWave& f) {
  CosineSpectrum out{f.grid, f.samples};
  detail::r2r_inplace(detail::R2RKind::DctII, out.coeffs);
  const double scale = std::sqrt(2.0 / std::numbers::pi) * f.grid.dx() * 0.5;
  for (auto& c : out.coeffs) c *= scale;
  return out;
}

inline EdgeWave fc_inverse(const CosineSpectrum& s) {
  EdgeWave out(s.grid, s.coeffs);
  detail::r2r_inplace(detail::R2RKind::DctIII, out.samples);
  const double scale = std::sqrt(2.0 / std::numbers::pi) * s.grid.dk() * 0.5;
  for (auto& v : out.samples) v *= scale;
  return out;
}

/// Phase e^{-i hbar k^2 t / (2m)} picked up by a mode of wavenumber k.
inline cplx free_phase(double k, double t, double hbar, double mass) {
  const double phase = -hbar * k * k * t / (2.0 * mass);
  return {std::cos(phase), std::sin(phase)};
}

inline EdgeWave dirichlet_propagate(const EdgeWave& f, double t, double hbar, double mass) {
  if (t == 0.0) return f;
  SineSpectrum s = fs_forward(f);
  for (std::size_t i = 0; i < s.coeffs.size(); ++i)
    s.coeffs[i] *= free_phase(s.wavenumber(i), t, hbar, mass);
  return fs_inverse(s);
}

inline EdgeWave neumann_propagate(const EdgeWave& f, double t, double hbar, double mass) {
  if (t == 0.0) return f;
  CosineSpectrum s = fc_forward(f);
  for (std::size_t i = 0; i < s.coeffs.size(); ++i)
    s.coeffs[i] *= free_phase(s.wavenumber(i), t, hbar, mass);
  return fc_inverse(s);
}

/// Image-method halves of the free propagator: U^- keeps the direct kernel
/// U0(x-y), U^+ the reflected kernel U0(x+y).
struct HalfPropagators {
  EdgeWave minus;
  EdgeWave plus;
};

inline HalfPropagators half_propagators(const EdgeWave& f, double t, double hbar, double mass) {
  if (t == 0.0) return {f, EdgeWave(f.grid)};
  const EdgeWave n = neumann_propagate(f, t, hbar, mass);
  const EdgeWave d = dirichlet_propagate(f, t, hbar, mass);
  HalfPropagators out{n, n};
  for (std::size_t j = 0; j < f.size(); ++j) {
    out.minus[j] = 0.5 * (n[j] + d[j]);
    out.plus[j] = 0.5 * (n[j] - d[j]);
  }
  return out;
}

inline EdgeWave u_minus(const EdgeWave& f, double t, double hbar, double mass) {
  return half_propagators(f, t, hbar, mass).minus;
}

inline EdgeWave u_plus(const EdgeWave& f, double t, double hbar, double mass) {
  return half_propagators(f, t, hbar, mass).plus;
}

/// F_c^* F_s: sine coefficient r becomes cosine coefficient r for r = 1..N-1;
/// the cosine r = 0 mode is zero and the sine r = N mode is dropped.
inline EdgeWave cosine_of_sine(const EdgeWave& f) {
  const SineSpectrum s = fs_forward(f);
  CosineSpectrum c{f.grid, std::vector<cplx>(f.size(), cplx{})};
  for (std::size_t r = 1; r < f.size(); ++r) c.coeffs[r] = s.coeffs[r - 1];
  return fc_inverse(c);
}

/// Adjoint of cosine_of_sine, i.e. F_s^* F_c.
inline EdgeWave sine_of_cosine(const EdgeWave& f) {
  const CosineSpectrum c = fc_forward(f);
  SineSpectrum s{f.grid, std::vector<cplx>(f.size(), cplx{})};
  for (std::size_t r = 1; r < f.size(); ++r) s.coeffs[r - 1] = c.coeffs[r];
  return fs_inverse(s);
}

}  // namespace stargraph
