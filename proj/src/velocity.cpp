#include "levyflow/velocity.hpp"

#include <cmath>

#include "levyflow/errors.hpp"
#include "levyflow/norms.hpp"
#include "levyflow/spectral.hpp"

namespace levyflow {

VelocityField make_divfree_velocity(const ScalarField& stream, bool measure_bmo) {
  if (stream.grid.dim != 2)
    throw PreconditionError("make_divfree_velocity: stream construction needs dim == 2");
  Spectrum phi = forward(stream);
  ScalarField d1 = inverse(derivative(phi, 0));
  ScalarField d2 = inverse(derivative(phi, 1));
  VelocityField v(stream.grid);
  for (std::size_t i = 0; i < stream.size(); ++i) {
    v.comp[0][i] = -d2.values[i];
    v.comp[1][i] = d1.values[i];
  }
  if (measure_bmo) {
    ScalarField speed(stream.grid);
    for (std::size_t i = 0; i < speed.size(); ++i)
      speed.values[i] = std::hypot(v.comp[0][i], v.comp[1][i]);
    v.bmo_bound = bmo_norm_estimate(speed);
  }
  return v;
}

ScalarField divergence(const VelocityField& v) {
  ScalarField c0(v.grid);
  c0.values = v.comp[0];
  Spectrum acc = derivative(forward(c0), 0);
  if (v.grid.dim == 2) {
    ScalarField c1(v.grid);
    c1.values = v.comp[1];
    Spectrum d2 = derivative(forward(c1), 1);
    for (std::size_t i = 0; i < acc.coef.size(); ++i) acc.coef[i] += d2.coef[i];
  }
  return inverse(acc);
}

double max_speed(const VelocityField& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < v.comp[0].size(); ++i) {
    double s = v.grid.dim == 1 ? std::abs(v.comp[0][i])
                               : std::hypot(v.comp[0][i], v.comp[1][i]);
    m = std::max(m, s);
  }
  return m;
}

ScalarField random_band_limited(const TorusGrid& g, RandomStream& rng, int k_band) {
  validate(g);
  if (k_band < 1 || k_band >= g.n / 2)
    throw PreconditionError("random_band_limited: band must satisfy 1 <= k < n/2");
  Spectrum s(g);
  const double amp = g.volume();  // unit-variance samples after inversion
  auto index_of = [&](int k1, int k2) {
    int i = k1 < 0 ? k1 + g.n : k1;
    if (g.dim == 1) return std::size_t(i);
    int j = k2 < 0 ? k2 + g.n : k2;
    return std::size_t(i) * g.n + j;
  };
  // Fill one half-space with Gaussian draws in a fixed order and mirror the
  // conjugates so the field is real.
  if (g.dim == 1) {
    for (int k = 1; k <= k_band; ++k) {
      std::complex<double> c(rng.normal(), rng.normal());
      s.coef[index_of(k, 0)] = 0.5 * amp * c;
      s.coef[index_of(-k, 0)] = 0.5 * amp * std::conj(c);
    }
  } else {
    for (int k1 = -k_band; k1 <= k_band; ++k1) {
      for (int k2 = -k_band; k2 <= k_band; ++k2) {
        if (k1 == 0 && k2 == 0) continue;
        if (k1 < 0 || (k1 == 0 && k2 < 0)) continue;  // conjugate half
        std::complex<double> c(rng.normal(), rng.normal());
        s.coef[index_of(k1, k2)] = 0.5 * amp * c;
        s.coef[index_of(-k1, -k2)] = 0.5 * amp * std::conj(c);
      }
    }
  }
  return inverse(s);
}

VelocityField random_divfree_velocity(const TorusGrid& g, RandomStream& rng, int k_band,
                                      double target_speed, bool measure_bmo) {
  ScalarField stream = random_band_limited(g, rng, k_band);
  VelocityField v = make_divfree_velocity(stream, false);
  double m = max_speed(v);
  if (m > 0.0 && target_speed > 0.0) {
    double sc = target_speed / m;
    for (int c = 0; c < g.dim; ++c)
      for (double& x : v.comp[c]) x *= sc;
  }
  if (measure_bmo) {
    ScalarField speed(g);
    for (std::size_t i = 0; i < speed.size(); ++i)
      speed.values[i] = std::hypot(v.comp[0][i], v.comp[1][i]);
    v.bmo_bound = bmo_norm_estimate(speed);
  }
  return v;
}

}  // namespace levyflow
