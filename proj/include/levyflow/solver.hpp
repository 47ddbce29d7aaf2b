#pragma once

#include <vector>

#include "levyflow/field.hpp"
#include "levyflow/kernel.hpp"
#include "levyflow/symbol.hpp"

namespace levyflow {

/// Time integration schemes.
///   ExponentialEuler: exact diffusion multiplier exp(-dt (a + eps |xi|^2)),
///     explicit conservation-form transport; the only scheme valid at eps = 0.
///   DuhamelPicard: mild-solution fixed point iterated per contraction
///     window, chained to the horizon.
enum class Scheme { ExponentialEuler, DuhamelPicard };

struct SolverConfig {
  double epsilon = 1e-3;
  double dt = 1e-2;
  double T = 1.0;
  Scheme scheme = Scheme::ExponentialEuler;
  double picard_tol = 1e-10;
  int picard_max_iter = 64;
  double budget_constant = 1.0;  // leading constant of the contraction budget
  double multiplier_cap = 1e4;   // precondition: dt * max(a + eps |xi|^2) <= cap
  int store_every = 0;           // keep every k-th state in the trajectory (0: none)
};

/// Piecewise-constant-in-time velocity: one static field, or frames spanning
/// [0, horizon] sampled at the nearest frame time.
class VelocityPath {
 public:
  VelocityPath() = default;
  explicit VelocityPath(VelocityField static_field);
  VelocityPath(std::vector<VelocityField> frames, double horizon);

  bool empty() const { return frames_.empty(); }
  std::size_t frame_count() const { return frames_.size(); }
  const VelocityField& sample(double t) const;
  double horizon() const { return horizon_; }
  double max_speed() const;
  double bmo_bound() const;
  const TorusGrid& grid() const;

 private:
  std::vector<VelocityField> frames_;
  double horizon_ = 0.0;
};

struct StepStats {
  double t, l1, l2, linf, min, max;
};

struct Trajectory {
  std::vector<StepStats> series;     // one row per step, including t = 0
  std::vector<double> stored_times;  // times of retained states
  std::vector<ScalarField> states;   // retained per store_every (incl. final)
};

/// Heat propagator exp(eps tau Laplacian); tau >= 0, eps >= 0.
ScalarField heat_semigroup(const ScalarField& f, double epsilon, double tau);

/// Jump operator L f via the symbol table (annihilates constants).
ScalarField apply_levy(const ScalarField& f, const SymbolTable& a);

/// Component-wise convolution with a Gaussian bump of width eps (spectral
/// multiplier exp(-eps^2 |xi|^2 / 2)); positive kernel, so the discrete
/// sup norm never increases.
VelocityField mollify_velocity(const VelocityField& v, double eps_mollify);

/// Contraction budget of one mild-solution window:
///   budget = C * (Phi_case(T', eps) + sqrt(T' / eps) * v_inf).
double contraction_budget(const KernelSpec& k, double T_prime, double epsilon,
                          double v_inf, double budget_constant);

struct PicardStats {
  std::vector<double> increments;  // sup-in-time L2 distance of iterate pairs
  int iterations = 0;
  double budget = 0.0;
};

/// Fixed point of the mild form
///   theta(t) = e^{eps t D} theta0 - int_0^t e^{eps (t-s) D} div(v_eps theta) ds
///            - int_0^t e^{eps (t-s) D} L theta ds
/// on [0, T'] (left-endpoint quadrature on the dt sub-grid).  Requires the
/// contraction budget of the window to be at most 1/2.
ScalarField picard_solve(const ScalarField& theta0, const VelocityPath& v,
                         const KernelSpec& k, const SymbolTable& a,
                         const SolverConfig& cfg, double T_prime,
                         PicardStats* stats = nullptr);

/// March d/dt theta = div(v theta) - L theta + eps Laplacian theta to the
/// horizon cfg.T.  The DuhamelPicard scheme chains fixed-point windows whose
/// budget stays below 1/2.
Trajectory solve_forward(const ScalarField& theta0, const VelocityPath& v,
                         const KernelSpec& k, const SymbolTable& a,
                         const SolverConfig& cfg);

/// Dual evolution d/ds psi = -div(v(., T-s) psi) - L psi + eps Laplacian psi,
/// the adjoint march of solve_forward with the same horizon.
Trajectory solve_backward_dual(const ScalarField& psi0, const VelocityPath& v,
                               const KernelSpec& k, const SymbolTable& a,
                               const SolverConfig& cfg);

/// L1 norm of the field with spectrum a(xi) exp(-eps tau |xi|^2), i.e. of the
/// jump operator applied to the heat kernel at time eps * tau.
double heat_levy_l1_norm(const SymbolTable& a, double epsilon, double tau);

/// Volume of the unit ball (2 for dim 1, pi for dim 2).
double unit_ball_volume(int dim);

}  // namespace levyflow
