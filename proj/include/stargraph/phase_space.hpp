#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stargraph/grid.hpp"

namespace stargraph {

/// A point (q, p) of the one-edge phase space R+ x R.
struct PhasePoint {
  double q;
  double p;

  PhasePoint(double q_, double p_) : q(q_), p(p_) {
    if (!(q_ > 0.0)) throw std::invalid_argument("PhasePoint: q must be > 0");
  }
};

/// One component of a classical field: (x, q, p) -> value. The position x is
/// a spectator parameter (the classical states built from coherent data are
/// families indexed by x); plain phase-space fields ignore it.
using FieldComponent = std::function<cplx(double x, double q, double p)>;

/// n-component field over R+ x R; components are pure closures.
class ClassicalField {
 public:
  explicit ClassicalField(std::vector<FieldComponent> components) : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("ClassicalField: need at least one component");
  }

  /// n components, all identically zero.
  static ClassicalField zero(std::size_t n) {
    return ClassicalField(std::vector<FieldComponent>(n, [](double, double, double) { return cplx{}; }));
  }

  std::size_t size() const { return components_.size(); }
  cplx operator()(std::size_t l, double x, double q, double p) const { return components_.at(l)(x, q, p); }
  const FieldComponent& component(std::size_t l) const { return components_.at(l); }

 private:
  std::vector<FieldComponent> components_;
};

}  // namespace stargraph
