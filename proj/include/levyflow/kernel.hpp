#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "levyflow/errors.hpp"

namespace levyflow {

/// Exponent regime of the jump kernel.
///   A: 0 < alpha <= beta < 1/2,  0 < delta < 1/2
///   B: alpha == beta == delta < 1/2
///   C: alpha == beta == 1/2,     0 < delta < 1/2
///   D: alpha == beta == delta == 1/2
enum class KernelCase { A, B, C, D };

enum class KernelFamily { PowerLaw, PiecewisePower, TruncatedPower };

/// Radially symmetric jump kernel pi(y) with power-law envelopes:
///   c1 |y|^-(dim+2 alpha) <= pi(y) <= c2 |y|^-(dim+2 beta)   for |y| <= 1,
///   0 <= pi(y) <= c3 |y|^-(dim+2 delta)                      for |y| > 1.
///
/// Families:
///   PowerLaw        pi(y) = scale * |y|^-(dim+2 alpha) everywhere
///                   (requires alpha == beta == delta)
///   PiecewisePower  pi(y) = inner_scale * |y|^-(dim+2 beta) for |y| <= 1,
///                   outer_scale * |y|^-(dim+2 delta) for |y| > 1
///   TruncatedPower  pi(y) = scale * |y|^-(dim+2 alpha) for |y| <= cutoff_radius,
///                   0 beyond (cutoff_radius >= 1, alpha == beta)
struct KernelSpec {
  int dim = 2;
  KernelCase case_tag = KernelCase::D;
  KernelFamily family = KernelFamily::PowerLaw;
  double alpha = 0.5, beta = 0.5, delta = 0.5;
  double c1 = 1.0, c2 = 1.0, c3 = 1.0;
  double scale = 1.0;
  double inner_scale = 1.0, outer_scale = 1.0;
  double cutoff_radius = 1.0;
};

/// Throws PreconditionError when exponents, constants, or family parameters
/// are inconsistent with the declared case.
void validate(const KernelSpec& k);

/// Radial density pi(|y| = r); r must be positive.
double kernel_profile(const KernelSpec& k, double r);

/// pi(y); throws std::domain_error at y = 0 where the density is singular.
double eval_kernel(const KernelSpec& k, const std::array<double, 2>& y);

struct BoundViolation {
  double radius;
  std::string which;  // "lower" or "upper"
  double density, envelope;
};

struct BoundsReport {
  bool pass = true;
  std::vector<BoundViolation> violations;
  double fitted_c4 = 0.0;  // max pi(r) / (r^-(n+2b) + r^-(n+2d)) over the scan
};

/// Checks the two-sided envelopes on the given radii (relative slack 1e-12)
/// and fits the combined-envelope constant.  Profile-level entry point; the
/// KernelSpec overload scans the spec's own density.
BoundsReport validate_bounds(const std::function<double(double)>& profile, int dim,
                             double alpha, double beta, double delta, double c1,
                             double c2, double c3, const std::vector<double>& radii);
BoundsReport validate_bounds(const KernelSpec& k, const std::vector<double>& radii);

struct LevyQuadrature {
  int radial_nodes = 2048;
  double r_min = 1e-8;
  double r_max = 64.0;
  double tail_tol = 1e-3;  // NumericalError when the tail estimate exceeds this
};

/// integral of min(1, |y|^2) pi(y) dy over R^dim, by graded radial quadrature
/// with the tail beyond r_max integrated from the declared power envelope.
/// `tail_delta`/`tail_scale` describe that envelope; a non-positive
/// tail_delta makes the tail divergent and raises NumericalError.
double levy_integrability(const std::function<double(double)>& profile, int dim,
                          double tail_delta, double tail_scale,
                          const LevyQuadrature& q = {});
double levy_integrability(const KernelSpec& k, const LevyQuadrature& q = {});

/// Tail scale/exponent of a family beyond r_max (exact for all families).
struct TailEnvelope {
  double exponent;  // delta-type exponent
  double scale;     // coefficient of r^-(dim+2*exponent); 0 for truncated tails
};
TailEnvelope tail_envelope(const KernelSpec& k);

}  // namespace levyflow
