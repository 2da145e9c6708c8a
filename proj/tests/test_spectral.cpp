#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "stargraph/spectral.hpp"
#include "stargraph/states.hpp"

using namespace stargraph;
using Catch::Matchers::WithinAbs;

namespace {

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

TEST_CASE("grid rejects bad sizes and exposes cell-centred nodes", "[spectral][grid]") {
  CHECK_THROWS_AS(Grid(1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(Grid(1.0, 12), std::invalid_argument);
  CHECK_THROWS_AS(Grid(-1.0, 16), std::invalid_argument);
  const Grid g(8.0, 16);
  CHECK(g.dx() * 16 == 8.0);
  CHECK(g.node(0) == 0.25);
  CHECK(g.node(15) == 7.75);
  CHECK(g.refined().size() == 32);
  CHECK(g.refined().x_max() == 8.0);
}

TEST_CASE("sine eigenmode transforms to a single coefficient", "[spectral]") {
  const Grid g(5.0, 64);
  EdgeWave f(g);
  for (std::size_t j = 0; j < g.size(); ++j) f[j] = std::sin(g.wavenumber(1) * g.node(j));
  const SineSpectrum s = fs_forward(f);
  for (std::size_t i = 1; i < s.coeffs.size(); ++i) CHECK(std::abs(s.coeffs[i]) < 1e-12);
  CHECK(std::abs(s.coeffs[0]) > 0.1);
}

TEST_CASE("constant transforms to the zero cosine mode", "[spectral]") {
  const Grid g(5.0, 64);
  EdgeWave f(g);
  for (auto& v : f.samples) v = 1.0;
  const CosineSpectrum c = fc_forward(f);
  for (std::size_t i = 1; i < c.coeffs.size(); ++i) CHECK(std::abs(c.coeffs[i]) < 1e-12);
  CHECK(std::abs(c.coeffs[0]) > 0.1);
}

TEST_CASE("Parseval and round trips on random data", "[spectral][property]") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {8u, 64u, 1024u}) {
    const Grid g(7.0, n);
    for (int rep = 0; rep < 5; ++rep) {
      const EdgeWave f = oracle::random_wave(g, rng);
      const double nf = f.norm_squared();
      CHECK_THAT(fs_forward(f).norm_squared() / nf, WithinAbs(1.0, 1e-12));
      CHECK_THAT(fc_forward(f).norm_squared() / nf, WithinAbs(1.0, 1e-12));
      CHECK(distance(fs_inverse(fs_forward(f)), f) / f.norm() < 1e-12);
      CHECK(distance(fc_inverse(fc_forward(f)), f) / f.norm() < 1e-12);
    }
  }
}

TEST_CASE("transforms match direct sums", "[spectral][oracle]") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {8u, 16u, 32u}) {
    const Grid g(3.0, n);
    const EdgeWave f = oracle::random_wave(g, rng);
    CHECK(oracle::max_abs_diff(fs_forward(f).coeffs, oracle::sine_forward(f)) < 1e-12);
    CHECK(oracle::max_abs_diff(fc_forward(f).coeffs, oracle::cosine_forward(f)) < 1e-12);
    const std::vector<cplx> c = oracle::random_wave(g, rng).samples;
    CHECK(oracle::max_abs_diff(fs_inverse(SineSpectrum{g, c}), oracle::sine_inverse(g, c)) < 1e-12);
    CHECK(oracle::max_abs_diff(fc_inverse(CosineSpectrum{g, c}), oracle::cosine_inverse(g, c)) < 1e-12);
  }
}

TEST_CASE("propagators match direct kernel sums", "[spectral][oracle]") {
  std::mt19937_64 rng(5);
  for (std::size_t n : {8u, 16u, 32u}) {
    const Grid g(4.0, n);
    const EdgeWave f = oracle::random_wave(g, rng);
    for (double t : {0.3, 1.0, 7.5}) {
      const double hbar = 0.7, mass = 1.3;
      const EdgeWave d = oracle::dirichlet(f, t, hbar, mass);
      const EdgeWave nn = oracle::neumann(f, t, hbar, mass);
      CHECK(oracle::max_abs_diff(dirichlet_propagate(f, t, hbar, mass), d) < 1e-10);
      CHECK(oracle::max_abs_diff(neumann_propagate(f, t, hbar, mass), nn) < 1e-10);
      CHECK(oracle::max_abs_diff(u_minus(f, t, hbar, mass), 0.5 * (nn + d)) < 1e-10);
      CHECK(oracle::max_abs_diff(u_plus(f, t, hbar, mass), 0.5 * (nn - d)) < 1e-10);
    }
  }
}

TEST_CASE("propagation at t = 0 is the identity", "[spectral]") {
  std::mt19937_64 rng(9);
  const Grid g(10.0, 256);
  const EdgeWave f = oracle::random_wave(g, rng);
  CHECK(dirichlet_propagate(f, 0.0, 1.0, 1.0).samples == f.samples);
  CHECK(neumann_propagate(f, 0.0, 1.0, 1.0).samples == f.samples);
  CHECK(u_plus(f, 0.0, 1.0, 1.0).norm() == 0.0);
}

TEST_CASE("eigenmodes acquire the free phase", "[spectral]") {
  const Grid g(6.0, 128);
  const double t = 0.8, hbar = 0.5, mass = 2.0;
  for (std::size_t r : {1u, 5u, 40u}) {
    EdgeWave s(g), c(g);
    for (std::size_t j = 0; j < g.size(); ++j) {
      s[j] = std::sin(g.wavenumber(r) * g.node(j));
      c[j] = std::cos(g.wavenumber(r) * g.node(j));
    }
    const cplx ph = free_phase(g.wavenumber(r), t, hbar, mass);
    CHECK(oracle::max_abs_diff(dirichlet_propagate(s, t, hbar, mass), ph * s) < 1e-12);
    CHECK(oracle::max_abs_diff(neumann_propagate(c, t, hbar, mass), ph * c) < 1e-12);
  }
}

TEST_CASE("unitarity, group law and time reversal", "[spectral][property]") {
  std::mt19937_64 rng(17);
  const Grid g(12.0, 512);
  for (int rep = 0; rep < 10; ++rep) {
    const EdgeWave f = oracle::random_wave(g, rng);
    const double nf = f.norm();
    for (double t : {-3.0, 0.1, 1.0, 25.0}) {
      CHECK_THAT(dirichlet_propagate(f, t, 1.0, 0.5).norm() / nf, WithinAbs(1.0, 1e-12));
      CHECK_THAT(neumann_propagate(f, t, 1.0, 0.5).norm() / nf, WithinAbs(1.0, 1e-12));
    }
    const double s = 0.37, t = 1.21;
    CHECK(distance(dirichlet_propagate(dirichlet_propagate(f, s, 1, 1), t, 1, 1), dirichlet_propagate(f, s + t, 1, 1)) /
              nf <
          1e-12);
    CHECK(distance(neumann_propagate(neumann_propagate(f, s, 1, 1), t, 1, 1), neumann_propagate(f, s + t, 1, 1)) / nf <
          1e-12);
    CHECK(distance(dirichlet_propagate(dirichlet_propagate(f, t, 1, 1), -t, 1, 1), f) / nf < 1e-12);
    CHECK(distance(neumann_propagate(neumann_propagate(f, t, 1, 1), -t, 1, 1), f) / nf < 1e-12);
  }
}

TEST_CASE("half propagators decompose the Dirichlet propagator", "[spectral]") {
  std::mt19937_64 rng(23);
  const Grid g(9.0, 256);
  const EdgeWave f = oracle::random_wave(g, rng);
  for (double t : {0.2, 2.0}) {
    const auto h = half_propagators(f, t, 1.0, 1.0);
    CHECK(oracle::max_abs_diff(h.minus - h.plus, dirichlet_propagate(f, t, 1.0, 1.0)) < 1e-14 * 100);
    CHECK(h.plus.norm() <= f.norm() * (1 + 1e-14));
    CHECK(h.minus.norm() <= f.norm() * (1 + 1e-14));
  }
}

TEST_CASE("half propagators approach identity and zero as t -> 0", "[spectral]") {
  const CoherentParams cp(0.1, 1.0, 1.0, 3.0, 0.5);
  const Grid g(10.0, 1024);
  const EdgeWave f = sample(packet(cp, cplx{1.0, 0.0}), g);
  const auto h = half_propagators(f, 1e-8, cp.hbar(), cp.mass());
  // The minus half still carries the free phase, of order hbar k^2 t / 2m.
  CHECK(distance(h.minus, f) < 1e-6);
  CHECK(h.plus.norm() < 1e-10);
}

TEST_CASE("Dirichlet propagation of a distant Gaussian follows the free flow", "[spectral]") {
  // Packet far from both ends: the image terms are below roundoff.
  const CoherentParams cp(0.05, 1.0, 1.0, 10.0, 0.7);
  const Grid g(20.0, 2048);
  const EdgeWave f = sample(packet(cp, cplx{1.0, 0.0}), g);
  for (double t : {0.5, 2.0}) {
    const EvolvedParams ev = evolve_params(cp, t);
    EdgeWave expected = sample(GaussianPacket{cp.hbar(), cp.sigma0(), ev.sigma_t, ev.q_t, ev.p_t}, g);
    expected *= std::exp(cplx{0.0, ev.action / cp.hbar()});
    CHECK(oracle::max_abs_diff(dirichlet_propagate(f, t, cp.hbar(), cp.mass()), expected) <= 1e-8);
    CHECK(oracle::max_abs_diff(neumann_propagate(f, t, cp.hbar(), cp.mass()), expected) <= 1e-8);
  }
}

TEST_CASE("cosine_of_sine and its adjoint", "[spectral]") {
  std::mt19937_64 rng(29);
  const Grid g(20.0, 512);
  const EdgeWave f = oracle::random_wave(g, rng);
  const EdgeWave h = oracle::random_wave(g, rng);
  const cplx lhs = inner(cosine_of_sine(f), h);
  const cplx rhs = inner(f, sine_of_cosine(h));
  CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));

  // Smooth data: the dropped modes carry no mass, so T is isometric and T* T = 1.
  const EdgeWave p = oracle::random_packets(g, rng);
  CHECK_THAT(cosine_of_sine(p).norm() / p.norm(), WithinAbs(1.0, 1e-10));
  CHECK(distance(sine_of_cosine(cosine_of_sine(p)), p) / p.norm() < 1e-10);

  // Matches the direct-sum transforms composed index by index.
  const Grid small(2.0, 16);
  const EdgeWave q = oracle::random_wave(small, rng);
  const auto sc = oracle::sine_forward(q);
  std::vector<cplx> cc(16, cplx{});
  for (std::size_t r = 1; r < 16; ++r) cc[r] = sc[r - 1];
  CHECK(oracle::max_abs_diff(cosine_of_sine(q), oracle::cosine_inverse(small, cc)) < 1e-12);
}

TEST_CASE("spectrum weights and wavenumbers", "[spectral]") {
  const Grid g(4.0, 8);
  const SineSpectrum s{g, std::vector<cplx>(8, 1.0)};
  const CosineSpectrum c{g, std::vector<cplx>(8, 1.0)};
  CHECK(s.weight(7) == 0.5);
  CHECK(s.weight(0) == 1.0);
  CHECK(c.weight(0) == 0.5);
  CHECK(c.weight(7) == 1.0);
  CHECK(s.wavenumber(0) == g.wavenumber(1));
  CHECK(c.wavenumber(0) == 0.0);
  CHECK(max_abs(s.coeffs) == 1.0);
}
