#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace stargraph {

using cplx = std::complex<double>;

/// Raised when a state carries too much squared norm near the far end x = L,
/// where the image-method propagators stop representing the half-line.
class TailMassExceeded : public std::runtime_error {
 public:
  TailMassExceeded(double fraction, const std::string& where)
      : std::runtime_error("tail-mass guard: " + where + " has fraction " +
                           std::to_string(fraction) +
                           " of its squared norm in the last 5% of the grid (limit 1e-6)"),
        fraction_(fraction) {}
  double fraction() const { return fraction_; }

 private:
  double fraction_;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kTailError = 1e-6;
inline constexpr double kTailWarn = 1e-10;

/// Uniform cell-centred grid on [0, L]: nodes x_j = (j + 1/2) dx, j = 0..N-1.
///
/// The same N samples carry both the half-sample-odd (sine, Dirichlet) and
/// half-sample-even (cosine, Neumann) extensions, so sine wavenumbers are
/// k_r = r pi / L for r = 1..N and cosine wavenumbers for r = 0..N-1.
class Grid {
 public:
  Grid(double x_max, std::size_t n_points) : x_max_(x_max), n_(n_points) {
    if (!(x_max > 0.0) || !std::isfinite(x_max))
      throw std::invalid_argument("Grid: x_max must be positive and finite");
    if (n_points < 8 || (n_points & (n_points - 1)) != 0)
      throw std::invalid_argument("Grid: n_points must be a power of two >= 8");
    dx_ = x_max_ / static_cast<double>(n_);
  }

  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  double dx() const { return dx_; }
  double dk() const { return std::numbers::pi / x_max_; }
  double node(std::size_t j) const { return (static_cast<double>(j) + 0.5) * dx_; }
  double wavenumber(std::size_t r) const { return static_cast<double>(r) * dk(); }

  /// Same domain, twice the resolution.
  Grid refined() const { return Grid(x_max_, 2 * n_); }

  bool operator==(const Grid& o) const { return x_max_ == o.x_max_ && n_ == o.n_; }

 private:
  double x_max_;
  std::size_t n_;
  double dx_;
};

/// Complex samples of a half-line function at the nodes of a Grid.
struct EdgeWave {
  Grid grid;
  std::vector<cplx> samples;

  explicit EdgeWave(const Grid& g) : grid(g), samples(g.size(), cplx{}) {}
  EdgeWave(const Grid& g, std::vector<cplx> s) : grid(g), samples(std::move(s)) {
    if (samples.size() != grid.size())
      throw DimensionMismatch("EdgeWave: sample count does not match grid");
  }

  std::size_t size() const { return samples.size(); }
  cplx& operator[](std::size_t j) { return samples[j]; }
  const cplx& operator[](std::size_t j) const { return samples[j]; }

  double norm_squared() const {
    double acc = 0.0;
    for (const auto& v : samples) acc += std::norm(v);
    return acc * grid.dx();
  }
  double norm() const { return std::sqrt(norm_squared()); }

  EdgeWave& operator+=(const EdgeWave& o) {
    check_same(o);
    for (std::size_t j = 0; j < size(); ++j) samples[j] += o.samples[j];
    return *this;
  }
  EdgeWave& operator-=(const EdgeWave& o) {
    check_same(o);
    for (std::size_t j = 0; j < size(); ++j) samples[j] -= o.samples[j];
    return *this;
  }
  EdgeWave& operator*=(cplx a) {
    for (auto& v : samples) v *= a;
    return *this;
  }

  void check_same(const EdgeWave& o) const {
    if (!(grid == o.grid)) throw DimensionMismatch("EdgeWave: grid mismatch");
  }
};

inline EdgeWave operator+(EdgeWave a, const EdgeWave& b) { return a += b; }
inline EdgeWave operator-(EdgeWave a, const EdgeWave& b) { return a -= b; }
inline EdgeWave operator*(cplx s, EdgeWave a) { return a *= s; }

inline cplx inner(const EdgeWave& a, const EdgeWave& b) {
  a.check_same(b);
  cplx acc{};
  for (std::size_t j = 0; j < a.size(); ++j) acc += std::conj(a[j]) * b[j];
  return acc * a.grid.dx();
}

/// Fraction of the squared norm carried by nodes with x >= 0.95 L.
inline double tail_fraction(const EdgeWave& f) {
  const double total = f.norm_squared();
  if (total == 0.0) return 0.0;
  double tail = 0.0;
  const double cut = 0.95 * f.grid.x_max();
  for (std::size_t j = 0; j < f.size(); ++j)
    if (f.grid.node(j) >= cut) tail += std::norm(f[j]);
  return tail * f.grid.dx() / total;
}

/// n half-line components on one shared grid.
class GraphWave {
 public:
  GraphWave(const Grid& g, std::size_t n_edges) : grid_(g), edges_(n_edges, EdgeWave(g)) {
    if (n_edges == 0) throw std::invalid_argument("GraphWave: need at least one edge");
  }
  explicit GraphWave(std::vector<EdgeWave> edges) : grid_(edges.at(0).grid), edges_(std::move(edges)) {
    for (const auto& e : edges_) e.check_same(edges_.front());
  }

  const Grid& grid() const { return grid_; }
  std::size_t edge_count() const { return edges_.size(); }
  EdgeWave& edge(std::size_t l) { return edges_.at(l); }
  const EdgeWave& edge(std::size_t l) const { return edges_.at(l); }
  const std::vector<EdgeWave>& edges() const { return edges_; }

  double norm_squared() const {
    double acc = 0.0;
    for (const auto& e : edges_) acc += e.norm_squared();
    return acc;
  }
  double norm() const { return std::sqrt(norm_squared()); }

  GraphWave& operator-=(const GraphWave& o) {
    check_same(o);
    for (std::size_t l = 0; l < edges_.size(); ++l) edges_[l] -= o.edges_[l];
    return *this;
  }
  GraphWave& operator+=(const GraphWave& o) {
    check_same(o);
    for (std::size_t l = 0; l < edges_.size(); ++l) edges_[l] += o.edges_[l];
    return *this;
  }
  GraphWave& operator*=(cplx a) {
    for (auto& e : edges_) e *= a;
    return *this;
  }

  void check_same(const GraphWave& o) const {
    if (edges_.size() != o.edges_.size() || !(grid_ == o.grid_))
      throw DimensionMismatch("GraphWave: shape mismatch");
  }

 private:
  Grid grid_;
  std::vector<EdgeWave> edges_;
};

inline GraphWave operator-(GraphWave a, const GraphWave& b) { return a -= b; }
inline GraphWave operator+(GraphWave a, const GraphWave& b) { return a += b; }

inline double distance(const GraphWave& a, const GraphWave& b) { return (a - b).norm(); }
inline double distance(const EdgeWave& a, const EdgeWave& b) { return (a - b).norm(); }

inline double tail_fraction(const GraphWave& w) {
  const double total = w.norm_squared();
  if (total == 0.0) return 0.0;
  double tail = 0.0;
  for (const auto& e : w.edges()) tail += tail_fraction(e) * e.norm_squared();
  return tail / total;
}

/// Throws TailMassExceeded above 1e-6; returns the measured fraction.
template <class Wave>
double guard_tail(const Wave& w, const std::string& where) {
  const double f = tail_fraction(w);
  if (f > kTailError) throw TailMassExceeded(f, where);
  return f;
}

}  // namespace stargraph
