#pragma once

#include <string>
#include <utility>
#include <vector>

#include "levyflow/field.hpp"
#include "levyflow/grid.hpp"
#include "levyflow/kernel.hpp"
#include "levyflow/symbol.hpp"

namespace levyflow {

// One inequality or scaling diagnostic.  For inequality checks, pass means
// lhs <= constant * rhs + tolerance; for scaling checks, lhs/rhs hold the
// fitted and predicted slopes and pass means |slope - expected| <= tolerance.
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;        // fitted multiplicative constant (0 if n/a)
  double slope = 0.0;           // fitted slope (scaling checks)
  double expected_slope = 0.0;  // predicted slope (scaling checks)
  double tolerance = 0.0;
  bool pass = false;
  std::string description;
  std::vector<std::pair<std::string, double>> metadata;  // ordered extras
};

// Smooth radial cutoff phi(dist(x, center) / R): 1 inside R/2, 0 outside R,
// C^2 quintic ramp between.
ScalarField cutoff_field(const TorusGrid& grid, const std::array<double, 2>& center,
                         double R);

// <L g, g> versus <L f, f^{p-1}> with the plain power g = f^{p/2}.  Both
// quadratic forms must be nonnegative up to 1e-10 * ||f||_p^p; the reported
// constant is their ratio (exactly 1 at p = 2).  p must be even.
InequalityReport strook_varopoulos_check(const ScalarField& f, const SymbolTable& table,
                                         int p);

// Chain  ||f||_{B^{2a/p,p}_p}^p  <=  C1 ||f^{p/2}||_{H^a}^2
//        <=  C1 C2 (||f^{p/2}||_2^2 + <L f, f^{p-1}>),   a = kern.alpha.
// Nonnegative f runs the chain directly; signed f runs it on the positive and
// negative parts and checks the cross pairings -<f_+^{p-1}, L f_-> (direct
// periodized-kernel quadrature) for nonnegativity.
InequalityReport besov_regularity_check(const ScalarField& f, const SymbolTable& table,
                                        const KernelSpec& kern, int p);

// Sup-norm of [L, phi_R] 1 = L(phi_R) across the radii, log-log slope versus
// the prediction -2 min(beta, delta).  Radii must span at least one octave
// inside (8h, Lbox/4).  The L2 norms are recorded in the metadata.
InequalityReport commutator_scaling_check(const SymbolTable& table, const KernelSpec& kern,
                                          const TorusGrid& grid,
                                          const std::vector<double>& radii,
                                          double slope_tol = 0.3);

// Radial power fit of |xi| applied to the windowed field |x - xc|^omega.
// The window leaves a smooth O(1) background on the fit annulus [8h, Lbox/8],
// so the shell means are fitted as A r^p + c0 + c1 r; the exponent p is
// compared with omega - 1 (constant carries the fitted amplitude A).
InequalityReport fractional_identity_check(const TorusGrid& grid, double omega,
                                           double slope_tol = 0.1);

// Direct lattice realization of L: (Lf)(x) = h^n sum_{y != x} (f(x) - f(y))
// pi_per(x - y), with the kernel periodized over (2 images + 1)^dim shifts.
ScalarField apply_levy_direct(const ScalarField& f, const KernelSpec& kern,
                              int images = 1);

// Least-squares slope of log y against log x; entries must be positive.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace levyflow
