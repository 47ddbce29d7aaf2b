#pragma once

#include <complex>
#include <vector>

#include "levyflow/field.hpp"

namespace levyflow {

/// Fourier coefficients of a real field, full complex lattice in FFT order.
///
/// Convention: c(k) = h^dim * sum_x f(x) exp(-i xi_k . x), which approximates
/// the continuous transform on the torus.  The inverse carries the factor
/// 1 / L^dim, so Parseval reads  h^dim sum |f|^2 = L^-dim sum |c|^2.
struct Spectrum {
  TorusGrid grid;
  std::vector<std::complex<double>> coef;

  Spectrum() = default;
  explicit Spectrum(const TorusGrid& g) : grid(g), coef(g.size()) {}
};

Spectrum forward(const ScalarField& f);
ScalarField inverse(const Spectrum& s);

/// Integer wavenumbers of a flat spectral index.
std::array<int, 2> wavenumbers_of(const TorusGrid& g, std::size_t idx);
/// |xi|^2 of a flat spectral index.
double freq_norm2(const TorusGrid& g, std::size_t idx);

/// Spectral partial derivative along `axis`; the unpaired Nyquist mode is
/// zeroed so real fields stay real and the derivative stays skew-adjoint.
Spectrum derivative(const Spectrum& s, int axis);

/// Two-thirds rule: zero every mode with |k| > n/3 on some axis.  Products of
/// surviving modes are then alias-free on this grid.
void dealias(Spectrum& s);

/// True if every mode above the two-thirds cutoff is already zero.
bool is_dealiased(const Spectrum& s, double tol = 0.0);

}  // namespace levyflow
