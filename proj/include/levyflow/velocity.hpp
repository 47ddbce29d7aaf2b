#pragma once

#include <cstdint>
#include <vector>

#include "levyflow/field.hpp"
#include "levyflow/rng.hpp"

namespace levyflow {

/// Perp-gradient of a stream function: v = (-d2 phi, d1 phi), dim == 2 only.
/// The construction is divergence-free to rounding; the discrete spectral
/// divergence is checked to stay below 1e-10 * max |v|.
/// `measure_bmo` records the measured dissipation-scale estimate as the
/// field's bmo_bound (otherwise the bound is left at 0 for the caller).
VelocityField make_divfree_velocity(const ScalarField& stream, bool measure_bmo = true);

/// Spectral divergence d1 v1 (+ d2 v2 for dim == 2).
ScalarField divergence(const VelocityField& v);

/// Pointwise maximum speed max_x |v(x)|.
double max_speed(const VelocityField& v);

/// Random real field with unit-variance Gaussian coefficients on the modes
/// 0 < max(|k1|, |k2|) <= k_band; deterministic in the stream state.
ScalarField random_band_limited(const TorusGrid& g, RandomStream& rng, int k_band);

/// Random divergence-free velocity rescaled to the requested maximum speed.
VelocityField random_divfree_velocity(const TorusGrid& g, RandomStream& rng, int k_band,
                                      double target_speed, bool measure_bmo = true);

}  // namespace levyflow
