#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "levyflow/grid.hpp"

namespace levyflow {

/// Real scalar sample values on a TorusGrid, row-major (x varies fastest
/// along the last axis for dim == 2: index = i * n + j).
struct ScalarField {
  TorusGrid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const TorusGrid& g, double fill = 0.0)
      : grid(g), values(g.size(), fill) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

/// Divergence-free velocity sample values; component c, flat index i.
/// `bmo_bound` is the recorded dissipation-scale budget mu used by the
/// molecule machinery; it must dominate the measured bmo estimate.
struct VelocityField {
  TorusGrid grid;
  std::array<std::vector<double>, 2> comp;
  double bmo_bound = 0.0;

  VelocityField() = default;
  explicit VelocityField(const TorusGrid& g, double mu = 0.0) : grid(g), bmo_bound(mu) {
    for (int c = 0; c < g.dim; ++c) comp[c].assign(g.size(), 0.0);
  }
};

/// Coordinates of the flat index.
inline std::array<double, 2> point_of(const TorusGrid& g, std::size_t idx) {
  const double h = g.spacing();
  if (g.dim == 1) return {double(idx) * h, 0.0};
  return {double(idx / std::size_t(g.n)) * h, double(idx % std::size_t(g.n)) * h};
}

/// Squared periodic distance between a grid point and an arbitrary point.
inline double periodic_dist2(const TorusGrid& g, std::size_t idx,
                             const std::array<double, 2>& q) {
  auto p = point_of(g, idx);
  double d0 = g.periodic_delta(p[0], q[0]);
  if (g.dim == 1) return d0 * d0;
  double d1 = g.periodic_delta(p[1], q[1]);
  return d0 * d0 + d1 * d1;
}

}  // namespace levyflow
