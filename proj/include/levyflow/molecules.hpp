#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "levyflow/field.hpp"
#include "levyflow/grid.hpp"
#include "levyflow/kernel.hpp"
#include "levyflow/solver.hpp"
#include "levyflow/symbol.hpp"

namespace levyflow {

// Parameters of an r-molecule.  gamma and sigma are locked together by
// gamma = n (1/sigma - 1), equivalently sigma = n / (n + gamma).
struct MoleculeParams {
  int dim = 2;
  double sigma = 0.0;   // in (n/(n+1), 1)
  double gamma = 0.0;   // n (1/sigma - 1), in (0, 1)
  double omega = 0.0;   // concentration exponent, gamma < omega < 1
  double r = 0.0;       // molecule size
  std::array<double, 2> x0{0.0, 0.0};

  // Builds params from gamma, setting sigma = n/(n+gamma).
  static MoleculeParams from_gamma(int dim, double gamma, double omega, double r,
                                   std::array<double, 2> x0);

  // Throws PreconditionError on inconsistent fields.  When a kernel is
  // supplied, also enforces omega < 2*delta for case (c).
  void validate(const KernelSpec* kernel = nullptr) const;

  double height_bound() const;         // r^{-(n+gamma)}
  double concentration_bound() const;  // r^{omega-gamma}
};

// Three measured molecule quantities against their admissible bounds.
struct MoleculeCheck {
  double concentration = 0.0;  // h^n sum |psi| |x-x0|^omega  (periodic distance)
  double height = 0.0;         // max |psi|
  double l1 = 0.0;             // h^n sum |psi|
  double mean = 0.0;           // h^n sum psi
  double concentration_bound = 0.0;
  double height_bound = 0.0;
  double l1_constant = 0.0;  // l1 * r^gamma, the measured constant of l1 <= C r^{-gamma}
  bool concentration_pass = false;
  bool height_pass = false;
  bool moment_pass = false;  // |mean| <= 1e-12 * height; vacuous for r >= 1
  bool pass = false;
};

// Envelope snapshot at backward time s.
struct EnvelopeState {
  double s = 0.0;
  double K = 0.0;
  std::array<double, 3> measured{0.0, 0.0, 0.0};  // concentration, height, l1
  std::array<double, 3> bounds{0.0, 0.0, 0.0};    // (r+Ks)^{omega-gamma},
                                                  // (r+Ks)^{-(n+gamma)},
                                                  // v_n (r+Ks)^{-gamma}
  std::array<double, 2> center{0.0, 0.0};         // x(s)
  std::array<bool, 3> violated{false, false, false};
  bool saturated = false;  // r+Ks >= Lbox/4: torus metric caps the concentration
};

// Full iterated run: window-chained backward evolution until the accumulated
// backward time reaches T0.
struct MoleculeRun {
  std::vector<EnvelopeState> history;
  int windows = 0;
  double total_s = 0.0;
  double eps_win = 0.0;
  double final_l1 = 0.0;
  double l1_cap = 0.0;      // v_n (r + K total_s)^{-gamma}
  double measured_C = 0.0;  // final_l1 * T0^{gamma}
  bool any_violation = false;
  bool any_saturation = false;
};

// Pairing scan of a field against a molecule family.
struct PairingReport {
  struct Entry {
    double r = 0.0;
    std::array<double, 2> x0{0.0, 0.0};
    double pairing = 0.0;  // |h^n sum theta psi|
  };
  std::vector<Entry> entries;
  double max_pairing = 0.0;
  double holder_value = 0.0;      // holder_seminorm(theta, gamma)
  double fitted_constant = 0.0;   // max_pairing / holder_value (0 if seminorm 0)
};

// K = C_cal (mu + 1) / (omega - gamma); throws unless omega > gamma,
// mu >= 0, C_cal > 0.
double choose_K(double mu, double omega, double gamma, double C_cal);

// Smooth dipole molecule: two opposite Gaussian bumps of width r/4 separated
// by r/2 along axis 0, scaled so max |psi| = 0.9 r^{-(n+gamma)}; small
// molecules (r < 1) are mean-projected.  Requires 4h <= r < Lbox/8.
ScalarField build_molecule(const MoleculeParams& p, const TorusGrid& grid);

MoleculeCheck check_molecule(const ScalarField& f, const MoleculeParams& p);

// Explicit Euler for x'(s) = average of v(.,s) over the periodic ball
// B(x(s), r + K s), radius capped at Lbox/2.  `times` must increase from 0.
// Throws NumericalError if a ball captures no lattice point.
std::vector<std::array<double, 2>> evolve_center(const VelocityPath& v, double r,
                                                 std::array<double, 2> x0, double K,
                                                 const std::vector<double>& times);

// Envelope measurements at the trajectory's stored states; `centers` must be
// aligned with traj.stored_times.
std::vector<EnvelopeState> track_envelopes(const Trajectory& traj,
                                           const MoleculeParams& p, double K,
                                           const std::vector<std::array<double, 2>>& centers);

// Convenience overload: evolves the center along traj.stored_times first.
std::vector<EnvelopeState> track_envelopes(const Trajectory& traj,
                                           const MoleculeParams& p, double K,
                                           const VelocityPath& v);

// Window-chained backward evolution with windows s_i = eps_win * r, stopping
// once the accumulated backward time reaches T0.  The velocity is frozen at
// each window's start time.  Requires cfg.scheme == ExponentialEuler.
MoleculeRun iterate_molecule(const ScalarField& psi0, const VelocityPath& v,
                             const SymbolTable& table, const MoleculeParams& p,
                             double K, double T0, const SolverConfig& cfg,
                             double eps_win = 0.5);

// Relative defect of the duality pairing: forward theta to time t against
// psi0, versus backward psi to time t against theta0.  Both runs share dt.
// Requires cfg.scheme == ExponentialEuler; t = 0 returns 0 exactly.
double transfer_check(const ScalarField& theta0, const ScalarField& psi0,
                      const VelocityPath& v, const SymbolTable& table,
                      const SolverConfig& cfg, double t);

// Max |<theta, psi>| over a family of built molecules, reported next to the
// direct Holder seminorm at the family's (common) gamma.
PairingReport holder_by_duality(const ScalarField& theta,
                                const std::vector<MoleculeParams>& family);

}  // namespace levyflow
