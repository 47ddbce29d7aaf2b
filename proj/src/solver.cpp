#include "levyflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "levyflow/errors.hpp"
#include "levyflow/norms.hpp"
#include "levyflow/spectral.hpp"

namespace levyflow {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

StepStats stats_of(double t, const ScalarField& f) {
  long double s1 = 0.0, s2 = 0.0;
  double mx = -kInfinity, mn = kInfinity, ab = 0.0;
  for (double v : f.values) {
    s1 += std::abs(v);
    s2 += v * v;
    mx = std::max(mx, v);
    mn = std::min(mn, v);
    ab = std::max(ab, std::abs(v));
  }
  const double w = f.grid.cell_measure();
  return {t, double(s1) * w, std::sqrt(double(s2) * w), ab, mn, mx};
}

// Dealiased spectrum of div(v f) from the physical samples of f.
Spectrum transport_divergence(const VelocityField& v, const ScalarField& f) {
  Spectrum acc(f.grid);
  for (int axis = 0; axis < f.grid.dim; ++axis) {
    ScalarField prod(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i)
      prod.values[i] = v.comp[axis][i] * f.values[i];
    Spectrum p = forward(prod);
    dealias(p);
    Spectrum d = derivative(p, axis);
    for (std::size_t i = 0; i < acc.coef.size(); ++i) acc.coef[i] += d.coef[i];
  }
  return acc;
}

std::vector<double> exp_multiplier(const SymbolTable& a, double epsilon, double dt) {
  std::vector<double> m(a.a.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    m[i] = std::exp(-dt * (a.a[i] + epsilon * freq_norm2(a.grid, i)));
  return m;
}

double spectral_l2(const Spectrum& s) {
  long double acc = 0.0;
  for (const auto& c : s.coef) acc += std::norm(c);
  return std::sqrt(double(acc) / s.grid.volume());
}

struct MarchSetup {
  int steps;
  double dt;
};

MarchSetup plan_march(const TorusGrid& g, const SymbolTable& a, const VelocityPath& v,
                      const SolverConfig& cfg) {
  require(cfg.T > 0.0, "solver: horizon T must be positive");
  require(cfg.dt > 0.0, "solver: dt must be positive");
  require(cfg.epsilon >= 0.0, "solver: epsilon must be nonnegative");
  if (cfg.epsilon == 0.0 && cfg.scheme != Scheme::ExponentialEuler)
    throw PreconditionError("solver: epsilon == 0 is valid only with ExponentialEuler");
  int steps = std::max(1, int(std::ceil(cfg.T / cfg.dt - 1e-9)));
  double dt = cfg.T / steps;
  double vmax = v.empty() ? 0.0 : v.max_speed();
  if (vmax > 0.0)
    require(dt <= g.spacing() / (2.0 * vmax) * (1.0 + 1e-9),
            "solver: CFL violated, dt must be <= h / (2 max|v|)");
  double mmax = 0.0;
  for (std::size_t i = 0; i < a.a.size(); ++i)
    mmax = std::max(mmax, a.a[i] + cfg.epsilon * freq_norm2(g, i));
  require(dt * mmax <= cfg.multiplier_cap,
          "solver: dt * max(a + eps |xi|^2) exceeds multiplier_cap");
  return {steps, dt};
}

// One exponential-Euler march; sign +1 integrates the forward equation,
// sign -1 the dual one.  `reversed` samples the velocity at horizon - t.
Trajectory march(const ScalarField& f0, const VelocityPath& v, const SymbolTable& a,
                 const SolverConfig& cfg, int sign, bool reversed) {
  const TorusGrid& g = f0.grid;
  require(a.grid == g, "solver: symbol table grid mismatch");
  if (!v.empty()) require(v.grid() == g, "solver: velocity grid mismatch");
  auto [steps, dt] = plan_march(g, a, v, cfg);
  const std::vector<double> mult = exp_multiplier(a, cfg.epsilon, dt);

  // Velocity frames are dealiased once per distinct frame so the quadratic
  // transport term stays alias-free.  Frame addresses are stable in the path.
  const VelocityField* cached_raw = nullptr;
  VelocityField vd;
  auto velocity_at = [&](double t) -> const VelocityField* {
    if (v.empty()) return nullptr;
    double tq = reversed ? cfg.T - t : t;
    const VelocityField& raw = v.sample(tq);
    if (&raw != cached_raw) {
      vd = raw;
      for (int axis = 0; axis < g.dim; ++axis) {
        ScalarField c(g);
        c.values = raw.comp[axis];
        Spectrum s = forward(c);
        dealias(s);
        vd.comp[axis] = inverse(s).values;
      }
      cached_raw = &raw;
    }
    return &vd;
  };

  Trajectory out;
  Spectrum cur = forward(f0);
  // Pure multiplier evolutions are alias-free; the 2/3 truncation is only
  // needed once transport products enter.
  if (!v.empty()) dealias(cur);
  ScalarField phys = inverse(cur);
  out.series.push_back(stats_of(0.0, phys));
  if (cfg.store_every > 0) {
    out.stored_times.push_back(0.0);
    out.states.push_back(phys);
  }
  for (int m = 0; m < steps; ++m) {
    double t = m * dt;
    if (const VelocityField* vf = velocity_at(t)) {
      Spectrum gdiv = transport_divergence(*vf, phys);
      for (std::size_t i = 0; i < cur.coef.size(); ++i)
        cur.coef[i] = (cur.coef[i] + double(sign) * dt * gdiv.coef[i]) * mult[i];
    } else {
      for (std::size_t i = 0; i < cur.coef.size(); ++i) cur.coef[i] *= mult[i];
    }
    phys = inverse(cur);
    double tn = (m + 1) * dt;
    out.series.push_back(stats_of(tn, phys));
    if (cfg.store_every > 0 && ((m + 1) % cfg.store_every == 0 || m + 1 == steps)) {
      out.stored_times.push_back(tn);
      out.states.push_back(phys);
    }
  }
  return out;
}

}  // namespace

VelocityPath::VelocityPath(VelocityField static_field)
    : frames_{std::move(static_field)}, horizon_(0.0) {}

VelocityPath::VelocityPath(std::vector<VelocityField> frames, double horizon)
    : frames_(std::move(frames)), horizon_(horizon) {
  require(!frames_.empty(), "VelocityPath: frame list must not be empty");
  require(horizon_ > 0.0 || frames_.size() == 1,
          "VelocityPath: multi-frame path needs a positive horizon");
  for (const auto& f : frames_)
    require(f.grid == frames_.front().grid, "VelocityPath: mixed grids");
}

const VelocityField& VelocityPath::sample(double t) const {
  require(!frames_.empty(), "VelocityPath: empty path sampled");
  if (frames_.size() == 1 || horizon_ <= 0.0) return frames_.front();
  double u = std::clamp(t / horizon_, 0.0, 1.0) * (frames_.size() - 1);
  return frames_[std::size_t(std::llround(u))];
}

double VelocityPath::max_speed() const {
  double m = 0.0;
  for (const auto& f : frames_) {
    VelocityField tmp = f;
    double s = 0.0;
    for (std::size_t i = 0; i < tmp.comp[0].size(); ++i) {
      double x = tmp.grid.dim == 1 ? std::abs(tmp.comp[0][i])
                                   : std::hypot(tmp.comp[0][i], tmp.comp[1][i]);
      s = std::max(s, x);
    }
    m = std::max(m, s);
  }
  return m;
}

double VelocityPath::bmo_bound() const {
  double m = 0.0;
  for (const auto& f : frames_) m = std::max(m, f.bmo_bound);
  return m;
}

const TorusGrid& VelocityPath::grid() const {
  require(!frames_.empty(), "VelocityPath: empty path has no grid");
  return frames_.front().grid;
}

ScalarField heat_semigroup(const ScalarField& f, double epsilon, double tau) {
  require(epsilon >= 0.0 && tau >= 0.0, "heat_semigroup: epsilon, tau must be >= 0");
  Spectrum s = forward(f);
  for (std::size_t i = 0; i < s.coef.size(); ++i)
    s.coef[i] *= std::exp(-epsilon * tau * freq_norm2(s.grid, i));
  return inverse(s);
}

ScalarField apply_levy(const ScalarField& f, const SymbolTable& a) {
  require(a.grid == f.grid, "apply_levy: symbol table computed on a different grid");
  Spectrum s = forward(f);
  for (std::size_t i = 0; i < s.coef.size(); ++i) s.coef[i] *= a.a[i];
  return inverse(s);
}

VelocityField mollify_velocity(const VelocityField& v, double eps_mollify) {
  require(eps_mollify >= 0.0, "mollify_velocity: width must be >= 0");
  VelocityField out = v;
  for (int axis = 0; axis < v.grid.dim; ++axis) {
    ScalarField c(v.grid);
    c.values = v.comp[axis];
    Spectrum s = forward(c);
    for (std::size_t i = 0; i < s.coef.size(); ++i)
      s.coef[i] *= std::exp(-0.5 * eps_mollify * eps_mollify * freq_norm2(v.grid, i));
    out.comp[axis] = inverse(s).values;
  }
  return out;
}

double contraction_budget(const KernelSpec& k, double T_prime, double epsilon,
                          double v_inf, double budget_constant) {
  require(T_prime > 0.0, "contraction_budget: window must be positive");
  require(epsilon > 0.0, "contraction_budget: epsilon must be positive");
  require(v_inf >= 0.0, "contraction_budget: v_inf must be nonnegative");
  double phi = 0.0;
  switch (k.case_tag) {
    case KernelCase::A:
      phi = std::pow(T_prime, 1.0 - k.beta) / std::pow(epsilon, k.beta) +
            std::pow(T_prime, 1.0 - k.delta) / std::pow(epsilon, k.delta);
      break;
    case KernelCase::B:
      phi = std::pow(T_prime, 1.0 - k.alpha) / std::pow(epsilon, k.alpha);
      break;
    case KernelCase::C:
      phi = std::sqrt(T_prime / epsilon) + T_prime +
            std::pow(T_prime, 1.0 - k.delta) / std::pow(epsilon, k.delta);
      break;
    case KernelCase::D:
      phi = std::sqrt(T_prime / epsilon);
      break;
  }
  return budget_constant * (phi + std::sqrt(T_prime / epsilon) * v_inf);
}

namespace {

// Shared Picard window: returns the spectra of the fixed point on the
// sub-grid j = 0..M; sign -1 is the mild form above, +1 its velocity-flipped
// twin used by the forward march.  `t0` is the window's global start time and
// `reversed` samples the velocity at cfg.T - t, as the dual evolution does.
std::vector<Spectrum> picard_window(const Spectrum& f0, const VelocityPath& v,
                                    const KernelSpec& k, const SymbolTable& a,
                                    const SolverConfig& cfg, double T_prime, int sign,
                                    double t0, bool reversed, PicardStats* stats) {
  const TorusGrid& g = f0.grid;
  int M = std::max(1, int(std::llround(T_prime / cfg.dt)));
  double dt = T_prime / M;
  double vmax = v.empty() ? 0.0 : v.max_speed();
  double budget = contraction_budget(k, T_prime, cfg.epsilon, vmax, cfg.budget_constant);
  if (budget > 0.5)
    throw PreconditionError("picard_solve: contraction budget exceeds 1/2");
  if (stats) {
    stats->budget = budget;
    stats->increments.clear();
    stats->iterations = 0;
  }

  // Heat multipliers for every lag on the sub-grid.
  const std::size_t nn = g.size();
  std::vector<std::vector<double>> heat(M + 1, std::vector<double>(nn));
  for (int m = 0; m <= M; ++m)
    for (std::size_t i = 0; i < nn; ++i)
      heat[m][i] = std::exp(-cfg.epsilon * (m * dt) * freq_norm2(g, i));

  // Mollified, dealiased velocity at the window's sub-steps.
  std::vector<const VelocityField*> vat(M, nullptr);
  std::vector<VelocityField> vstore;
  if (!v.empty()) {
    vstore.reserve(M);
    for (int j = 0; j < M; ++j) {
      double tq = t0 + j * dt;
      if (reversed) tq = cfg.T - tq;
      VelocityField vm = mollify_velocity(v.sample(tq), cfg.epsilon);
      for (int axis = 0; axis < g.dim; ++axis) {
        ScalarField c(g);
        c.values = vm.comp[axis];
        Spectrum s = forward(c);
        dealias(s);
        vm.comp[axis] = inverse(s).values;
      }
      vstore.push_back(std::move(vm));
    }
    for (int j = 0; j < M; ++j) vat[j] = &vstore[j];
  }

  std::vector<Spectrum> iter(M + 1, Spectrum(g));
  for (int j = 0; j <= M; ++j)
    for (std::size_t i = 0; i < nn; ++i) iter[j].coef[i] = heat[j][i] * f0.coef[i];

  std::vector<Spectrum> rhs(M, Spectrum(g));  // sign * div(v f) - L f at t_j
  std::vector<Spectrum> next(M + 1, Spectrum(g));
  for (int it = 0; it < cfg.picard_max_iter; ++it) {
    for (int j = 0; j < M; ++j) {
      if (vat[j]) {
        ScalarField phys = inverse(iter[j]);
        rhs[j] = transport_divergence(*vat[j], phys);
        for (std::size_t i = 0; i < nn; ++i)
          rhs[j].coef[i] = double(sign) * rhs[j].coef[i] - a.a[i] * iter[j].coef[i];
      } else {
        for (std::size_t i = 0; i < nn; ++i) rhs[j].coef[i] = -a.a[i] * iter[j].coef[i];
      }
    }
    next[0] = iter[0];
    for (int j = 1; j <= M; ++j) {
      for (std::size_t i = 0; i < nn; ++i) {
        std::complex<double> acc = heat[j][i] * f0.coef[i];
        for (int l = 0; l < j; ++l) acc += dt * heat[j - l][i] * rhs[l].coef[i];
        next[j].coef[i] = acc;
      }
    }
    double inc = 0.0;
    for (int j = 0; j <= M; ++j) {
      Spectrum d(g);
      for (std::size_t i = 0; i < nn; ++i) d.coef[i] = next[j].coef[i] - iter[j].coef[i];
      inc = std::max(inc, spectral_l2(d));
    }
    iter.swap(next);
    if (stats) {
      stats->increments.push_back(inc);
      stats->iterations = it + 1;
    }
    if (inc < cfg.picard_tol) return iter;
  }
  throw NumericalError("picard_solve: no convergence within picard_max_iter");
}

// Chain fixed-point windows, each with contraction budget <= 1/2, across the
// whole horizon.  `sign`/`reversed` select the forward or dual evolution.
Trajectory chain_picard(const ScalarField& f0, const VelocityPath& v,
                        const KernelSpec& k, const SymbolTable& a,
                        const SolverConfig& cfg, int sign, bool reversed) {
  auto [steps, dt] = plan_march(f0.grid, a, v, cfg);
  double vmax = v.empty() ? 0.0 : v.max_speed();
  int win = 1;
  while (win < steps &&
         contraction_budget(k, (win + 1) * dt, cfg.epsilon, vmax, cfg.budget_constant) <=
             0.45)
    ++win;

  Trajectory out;
  Spectrum cur = forward(f0);
  ScalarField phys = inverse(cur);
  out.series.push_back(stats_of(0.0, phys));
  if (cfg.store_every > 0) {
    out.stored_times.push_back(0.0);
    out.states.push_back(phys);
  }
  SolverConfig wcfg = cfg;
  wcfg.dt = dt;
  int done = 0;
  while (done < steps) {
    int m = std::min(win, steps - done);
    auto sol = picard_window(cur, v, k, a, wcfg, m * dt, sign, done * dt, reversed,
                             nullptr);
    for (int j = 1; j <= m; ++j) {
      double t = (done + j) * dt;
      ScalarField fj = inverse(sol[j]);
      out.series.push_back(stats_of(t, fj));
      bool last = done + j == steps;
      if (cfg.store_every > 0 && ((done + j) % cfg.store_every == 0 || last)) {
        out.stored_times.push_back(t);
        out.states.push_back(fj);
      }
    }
    cur = sol.back();
    done += m;
  }
  return out;
}

}  // namespace

ScalarField picard_solve(const ScalarField& theta0, const VelocityPath& v,
                         const KernelSpec& k, const SymbolTable& a,
                         const SolverConfig& cfg, double T_prime, PicardStats* stats) {
  require(a.grid == theta0.grid, "picard_solve: symbol table grid mismatch");
  Spectrum f0 = forward(theta0);
  auto sol = picard_window(f0, v, k, a, cfg, T_prime, -1, 0.0, false, stats);
  return inverse(sol.back());
}

Trajectory solve_forward(const ScalarField& theta0, const VelocityPath& v,
                         const KernelSpec& k, const SymbolTable& a,
                         const SolverConfig& cfg) {
  if (cfg.scheme == Scheme::ExponentialEuler) return march(theta0, v, a, cfg, +1, false);
  return chain_picard(theta0, v, k, a, cfg, +1, false);
}

Trajectory solve_backward_dual(const ScalarField& psi0, const VelocityPath& v,
                               const KernelSpec& k, const SymbolTable& a,
                               const SolverConfig& cfg) {
  if (cfg.scheme == Scheme::ExponentialEuler) return march(psi0, v, a, cfg, -1, true);
  return chain_picard(psi0, v, k, a, cfg, -1, true);
}

double heat_levy_l1_norm(const SymbolTable& a, double epsilon, double tau) {
  require(epsilon > 0.0 && tau > 0.0, "heat_levy_l1_norm: epsilon, tau must be positive");
  Spectrum s(a.grid);
  for (std::size_t i = 0; i < s.coef.size(); ++i)
    s.coef[i] = a.a[i] * std::exp(-epsilon * tau * freq_norm2(a.grid, i));
  return lp_norm(inverse(s), 1.0);
}

double unit_ball_volume(int dim) { return dim == 1 ? 2.0 : std::numbers::pi; }

}  // namespace levyflow
