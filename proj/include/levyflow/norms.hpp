#pragma once

#include <limits>

#include "levyflow/field.hpp"

namespace levyflow {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Lebesgue norm with the Riemann cell measure h^dim; p == kInfinity gives
/// the max norm.  p < 1 is rejected.
double lp_norm(const ScalarField& f, double p);

/// Hoelder seminorm sup_{x != y} |f(x) - f(y)| / d(x, y)^gamma with the
/// periodic metric, gamma in (0, 1].  Pairs are scanned exhaustively for
/// n <= 128 and on a stride-4 sublattice above (stride == 0 selects this
/// policy; any positive stride overrides it).
double holder_seminorm(const ScalarField& f, double gamma, int stride = 0);

/// Discrete Besov seminorm
///   [ sum_{0 < |y| <= L/2} h^dim / |y|^{dim + p s} *
///         h^dim sum_x |f(x) - f(x - y)|^p ]^{1/p}
/// over lattice offsets y with min-image length at most L/2; s in (0, 1).
double besov_seminorm(const ScalarField& f, double s, double p);

/// Spectral Sobolev seminorm [ L^-dim sum_k |xi_k|^{2s} |c_k|^2 ]^{1/2};
/// the zero mode is excluded for s > 0 and included at s == 0, where the
/// value equals lp_norm(f, 2).
double sobolev_seminorm(const ScalarField& f, double s);

/// Dissipation-scale norm estimate over a dyadic family of periodic balls:
/// mean oscillation on balls of measure <= 1, plain average of |f| on larger
/// balls.  Radii run over 2h * powers of two up to L/2; centers sit on a
/// sublattice of stride n/16 (center_stride == 0 selects this default).
/// Requires box length > 2 so both regimes are populated.
double bmo_norm_estimate(const ScalarField& f, int center_stride = 0);

/// Pointwise clamp to [-k, k], k > 0.
ScalarField truncate_clamp(const ScalarField& f, double k);

}  // namespace levyflow
