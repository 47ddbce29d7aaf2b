#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include "levyflow/errors.hpp"

namespace levyflow {

/// Uniform periodic grid on the torus [0, L)^dim, dim in {1, 2}.
///
/// Points are x_i = i * h with h = L / n.  The Fourier lattice carries the
/// integer wavenumbers k in [-n/2, n/2) per axis, with physical frequency
/// xi = (2*pi / L) * k.
struct TorusGrid {
  int dim = 2;
  int n = 64;             // points per axis, power of two, >= 8
  double box = 2.0 * std::numbers::pi;

  bool operator==(const TorusGrid&) const = default;

  std::size_t size() const { return dim == 1 ? std::size_t(n) : std::size_t(n) * n; }
  double spacing() const { return box / n; }
  double volume() const { return dim == 1 ? box : box * box; }
  double cell_measure() const { return std::pow(spacing(), dim); }

  /// Integer wavenumber of a flat index along one axis (standard FFT order).
  int wavenumber(int i) const { return i < n / 2 ? i : i - n; }
  /// Physical frequency of an integer wavenumber.
  double frequency(int k) const { return 2.0 * std::numbers::pi * k / box; }

  /// Shortest signed periodic displacement from b to a along one axis.
  double periodic_delta(double a, double b) const {
    double d = a - b;
    d -= box * std::round(d / box);
    return d;
  }
};

inline void validate(const TorusGrid& g) {
  if (g.dim != 1 && g.dim != 2)
    throw PreconditionError("TorusGrid: dim must be 1 or 2");
  if (g.n < 8 || (g.n & (g.n - 1)) != 0)
    throw PreconditionError("TorusGrid: n must be a power of two >= 8");
  if (!(g.box > 0.0))
    throw PreconditionError("TorusGrid: box length must be positive");
}

}  // namespace levyflow
