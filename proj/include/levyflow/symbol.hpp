#pragma once

#include <vector>

#include "levyflow/grid.hpp"
#include "levyflow/kernel.hpp"

namespace levyflow {

/// Quadrature controls for the jump-symbol integral
///   a(xi) = integral over R^dim of (1 - cos(xi . y)) pi(y) dy.
/// The integrand is reduced to a radial one (the kernels are radial), the
/// mesh is geometric on [r_min, r_max] and conforms to family breakpoints,
/// the region below r_min uses the quadratic small-argument expansion, and
/// the tail beyond r_max is integrated analytically from the family's exact
/// power envelope.
struct SymbolQuadrature {
  int radial_nodes = 2048;
  double r_min = 1e-6;
  double r_max = 64.0;
  double tail_tol = 0.1;  // compute_symbol raises NumericalError beyond this
};

/// a(xi) sampled on the full Fourier lattice of a grid.  a(0) == 0 exactly;
/// values are symmetric and nonnegative.  `tail_bound` bounds the modulus of
/// the neglected oscillatory tail remainder, maximized over the lattice.
struct SymbolTable {
  TorusGrid grid;
  std::vector<double> a;
  SymbolQuadrature quad;
  double tail_bound = 0.0;

  double operator[](std::size_t i) const { return a[i]; }
};

/// Radial symbol value at |xi| = xi_mag (exact zero at xi_mag == 0).
double symbol_value(const KernelSpec& k, double xi_mag, const SymbolQuadrature& q = {});

/// Symbol sampled over the whole lattice; distinct lattice radii are
/// evaluated once (the lattice norm |k|^2 is an integer key).
SymbolTable compute_symbol(const KernelSpec& k, const TorusGrid& g,
                           const SymbolQuadrature& q = {});

/// Fitted constants of the two-sided symbol bounds:
///   upper_constant = max over xi != 0 of a(xi) / (|xi|^{2 beta} + |xi|^{2 delta})
///   lower_constant = max over xi of (|xi|^{2 alpha} - a(xi))_+
struct SymbolMargins {
  double upper_constant = 0.0;
  double lower_constant = 0.0;
};
SymbolMargins symbol_bound_margins(const SymbolTable& t, const KernelSpec& k);

/// Bessel J0 via the classical two-regime rational approximations
/// (absolute error below 5e-8); hot path of the dim == 2 quadrature.
double fast_j0(double x);

}  // namespace levyflow
