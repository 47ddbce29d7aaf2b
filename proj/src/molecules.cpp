#include "levyflow/molecules.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levyflow/errors.hpp"
#include "levyflow/norms.hpp"

namespace levyflow {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

int wrap_index(int i, int n) {
  int m = i % n;
  return m < 0 ? m + n : m;
}

double wrap_coord(double x, double box) {
  double y = std::fmod(x, box);
  return y < 0.0 ? y + box : y;
}

// (concentration, height, l1) of f around `center`, exponent omega.
std::array<double, 3> measure_triple(const ScalarField& f,
                                     const std::array<double, 2>& center,
                                     double omega) {
  long double conc = 0.0, l1 = 0.0;
  double height = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double av = std::abs(f.values[i]);
    height = std::max(height, av);
    l1 += av;
    if (av > 0.0) conc += av * std::pow(periodic_dist2(f.grid, i, center), 0.5 * omega);
  }
  const double w = f.grid.cell_measure();
  return {double(conc) * w, height, double(l1) * w};
}

EnvelopeState envelope_at(const ScalarField& f, const MoleculeParams& p, double K,
                          double s, const std::array<double, 2>& center) {
  EnvelopeState e;
  e.s = s;
  e.K = K;
  e.center = center;
  e.measured = measure_triple(f, center, p.omega);
  const double base = p.r + K * s;
  e.bounds = {std::pow(base, p.omega - p.gamma), std::pow(base, -(p.dim + p.gamma)),
              unit_ball_volume(p.dim) * std::pow(base, -p.gamma)};
  for (int j = 0; j < 3; ++j) e.violated[j] = e.measured[j] > e.bounds[j];
  e.saturated = base >= f.grid.box / 4.0;
  return e;
}

// Mean of v over the periodic ball B(x, R) by lattice summation over the
// bounding index window.
std::array<double, 2> ball_average(const VelocityField& v,
                                   const std::array<double, 2>& x, double R) {
  const TorusGrid& g = v.grid;
  R = std::min(R, g.box / 2.0);
  const double h = g.spacing();
  const double R2 = R * R;
  const int m = int(std::ceil(R / h)) + 1;
  long double s0 = 0.0, s1 = 0.0;
  std::size_t cnt = 0;
  if (g.dim == 1) {
    int c = int(std::floor(x[0] / h));
    int lo = c - m, hi = c + m;
    if (hi - lo + 1 >= g.n) {
      lo = 0;
      hi = g.n - 1;
    }
    for (int i = lo; i <= hi; ++i) {
      std::size_t ii = std::size_t(wrap_index(i, g.n));
      if (periodic_dist2(g, ii, x) <= R2) {
        s0 += v.comp[0][ii];
        ++cnt;
      }
    }
  } else {
    int c0 = int(std::floor(x[0] / h));
    int c1 = int(std::floor(x[1] / h));
    int lo0 = c0 - m, hi0 = c0 + m, lo1 = c1 - m, hi1 = c1 + m;
    if (hi0 - lo0 + 1 >= g.n) {
      lo0 = 0;
      hi0 = g.n - 1;
    }
    if (hi1 - lo1 + 1 >= g.n) {
      lo1 = 0;
      hi1 = g.n - 1;
    }
    for (int i = lo0; i <= hi0; ++i) {
      std::size_t base = std::size_t(wrap_index(i, g.n)) * g.n;
      for (int j = lo1; j <= hi1; ++j) {
        std::size_t idx = base + std::size_t(wrap_index(j, g.n));
        if (periodic_dist2(g, idx, x) <= R2) {
          s0 += v.comp[0][idx];
          s1 += v.comp[1][idx];
          ++cnt;
        }
      }
    }
  }
  if (cnt == 0) {
    std::ostringstream os;
    os << "evolve_center: ball of radius " << R << " contains no lattice point";
    throw NumericalError(os.str());
  }
  return {double(s0 / cnt), double(s1 / cnt)};
}

}  // namespace

MoleculeParams MoleculeParams::from_gamma(int dim, double gamma, double omega, double r,
                                          std::array<double, 2> x0) {
  MoleculeParams p;
  p.dim = dim;
  p.gamma = gamma;
  p.sigma = double(dim) / (dim + gamma);
  p.omega = omega;
  p.r = r;
  p.x0 = x0;
  p.validate();
  return p;
}

void MoleculeParams::validate(const KernelSpec* kernel) const {
  require(dim == 1 || dim == 2, "MoleculeParams: dim must be 1 or 2");
  require(sigma > double(dim) / (dim + 1) && sigma < 1.0,
          "MoleculeParams: sigma must lie in (n/(n+1), 1)");
  const double g = dim * (1.0 / sigma - 1.0);
  require(std::abs(gamma - g) <= 1e-12 * std::max(1.0, std::abs(g)),
          "MoleculeParams: gamma must equal n (1/sigma - 1)");
  require(gamma > 0.0 && gamma < omega && omega < 1.0,
          "MoleculeParams: need 0 < gamma < omega < 1");
  require(r > 0.0, "MoleculeParams: r must be positive");
  if (kernel && kernel->case_tag == KernelCase::C)
    require(omega < 2.0 * kernel->delta,
            "MoleculeParams: case (c) requires omega < 2 delta");
}

double MoleculeParams::height_bound() const { return std::pow(r, -(dim + gamma)); }

double MoleculeParams::concentration_bound() const { return std::pow(r, omega - gamma); }

double choose_K(double mu, double omega, double gamma, double C_cal) {
  if (!(omega > gamma)) throw PreconditionError("choose_K: omega must exceed gamma");
  require(mu >= 0.0, "choose_K: mu must be nonnegative");
  require(C_cal > 0.0, "choose_K: calibration constant must be positive");
  return C_cal * (mu + 1.0) / (omega - gamma);
}

ScalarField build_molecule(const MoleculeParams& p, const TorusGrid& grid) {
  p.validate();
  validate(grid);
  require(grid.dim == p.dim, "build_molecule: grid dimension mismatch");
  const double h = grid.spacing();
  require(p.r >= 4.0 * h, "build_molecule: grid does not resolve r (need r >= 4h)");
  require(p.r < grid.box / 8.0, "build_molecule: r must be below Lbox/8");

  // Dipole: bumps of width r/4 at x0 +- (r/4) e0, so the separation is r/2.
  const double w = p.r / 4.0;
  const double inv2w2 = 1.0 / (2.0 * w * w);
  std::array<double, 2> cp = p.x0, cm = p.x0;
  cp[0] = wrap_coord(cp[0] + p.r / 4.0, grid.box);
  cm[0] = wrap_coord(cm[0] - p.r / 4.0, grid.box);

  ScalarField out(grid);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.values[i] = std::exp(-periodic_dist2(grid, i, cp) * inv2w2) -
                    std::exp(-periodic_dist2(grid, i, cm) * inv2w2);

  const double target = 0.9 * p.height_bound();
  auto rescale = [&] {
    double mx = 0.0;
    for (double v : out.values) mx = std::max(mx, std::abs(v));
    const double sc = target / mx;
    for (double& v : out.values) v *= sc;
  };
  rescale();

  if (p.r < 1.0) {
    // Small molecules carry the moment condition: project out the mean, then
    // restore the exact 90% height saturation (scaling keeps the mean zero).
    long double sum = 0.0;
    for (double v : out.values) sum += v;
    const double mean = double(sum / out.size());
    for (double& v : out.values) v -= mean;
    rescale();
  }
  return out;
}

MoleculeCheck check_molecule(const ScalarField& f, const MoleculeParams& p) {
  p.validate();
  require(f.grid.dim == p.dim, "check_molecule: grid dimension mismatch");
  MoleculeCheck c;
  auto m = measure_triple(f, p.x0, p.omega);
  c.concentration = m[0];
  c.height = m[1];
  c.l1 = m[2];
  long double sum = 0.0;
  for (double v : f.values) sum += v;
  c.mean = double(sum) * f.grid.cell_measure();
  c.concentration_bound = p.concentration_bound();
  c.height_bound = p.height_bound();
  c.l1_constant = c.l1 * std::pow(p.r, p.gamma);
  c.concentration_pass = c.concentration <= c.concentration_bound * (1.0 + 1e-12);
  c.height_pass = c.height <= c.height_bound * (1.0 + 1e-12);
  c.moment_pass = p.r >= 1.0 || std::abs(c.mean) <= 1e-12 * c.height;
  c.pass = c.concentration_pass && c.height_pass && c.moment_pass;
  return c;
}

std::vector<std::array<double, 2>> evolve_center(const VelocityPath& v, double r,
                                                 std::array<double, 2> x0, double K,
                                                 const std::vector<double>& times) {
  require(!times.empty() && times.front() == 0.0, "evolve_center: times must start at 0");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    require(times[i + 1] > times[i], "evolve_center: times must increase strictly");
  require(r > 0.0, "evolve_center: r must be positive");
  require(K >= 0.0, "evolve_center: K must be nonnegative");

  std::vector<std::array<double, 2>> path;
  path.reserve(times.size());
  path.push_back(x0);
  if (v.empty()) {
    path.assign(times.size(), x0);
    return path;
  }
  const double box = v.grid().box;
  std::array<double, 2> x = x0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double s = times[i];
    const double ds = times[i + 1] - times[i];
    auto a = ball_average(v.sample(s), x, r + K * s);
    x[0] = wrap_coord(x[0] + ds * a[0], box);
    if (v.grid().dim == 2) x[1] = wrap_coord(x[1] + ds * a[1], box);
    path.push_back(x);
  }
  return path;
}

std::vector<EnvelopeState> track_envelopes(const Trajectory& traj,
                                           const MoleculeParams& p, double K,
                                           const std::vector<std::array<double, 2>>& centers) {
  p.validate();
  require(K >= 0.0, "track_envelopes: K must be nonnegative");
  require(!traj.states.empty(),
          "track_envelopes: trajectory has no stored states (set store_every)");
  require(centers.size() == traj.states.size(),
          "track_envelopes: centers misaligned with stored states");
  std::vector<EnvelopeState> out;
  out.reserve(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i)
    out.push_back(envelope_at(traj.states[i], p, K, traj.stored_times[i], centers[i]));
  return out;
}

std::vector<EnvelopeState> track_envelopes(const Trajectory& traj,
                                           const MoleculeParams& p, double K,
                                           const VelocityPath& v) {
  require(!traj.states.empty(),
          "track_envelopes: trajectory has no stored states (set store_every)");
  auto centers = evolve_center(v, p.r, p.x0, K, traj.stored_times);
  return track_envelopes(traj, p, K, centers);
}

MoleculeRun iterate_molecule(const ScalarField& psi0, const VelocityPath& v,
                             const SymbolTable& table, const MoleculeParams& p,
                             double K, double T0, const SolverConfig& cfg,
                             double eps_win) {
  p.validate();
  require(T0 > 0.0, "iterate_molecule: T0 must be positive");
  require(eps_win > 0.0, "iterate_molecule: eps_win must be positive");
  require(K >= 0.0, "iterate_molecule: K must be nonnegative");
  require(cfg.scheme == Scheme::ExponentialEuler,
          "iterate_molecule: windows march with ExponentialEuler");

  MoleculeRun run;
  run.eps_win = eps_win;
  const double s_window = eps_win * p.r;
  ScalarField cur = psi0;
  std::array<double, 2> x = p.x0;
  double s_acc = 0.0;
  const KernelSpec unused_kernel{};  // ExponentialEuler ignores the kernel spec

  run.history.push_back(envelope_at(cur, p, K, 0.0, x));
  while (s_acc < T0 * (1.0 - 1e-12)) {
    SolverConfig wcfg = cfg;
    wcfg.T = s_window;
    wcfg.dt = std::min(cfg.dt, s_window);
    const int steps = std::max(1, int(std::ceil(wcfg.T / wcfg.dt - 1e-9)));
    if (wcfg.store_every <= 0) wcfg.store_every = steps;

    // Velocity frozen at the window's start time.
    VelocityPath wv = v.empty() ? VelocityPath() : VelocityPath(v.sample(s_acc));
    Trajectory tr = solve_backward_dual(cur, wv, unused_kernel, table, wcfg);

    // Center ODE on the full step grid of the window; the envelope radius at
    // local time t is (r + K s_acc) + K t.
    const double dt = wcfg.T / steps;
    std::vector<double> fine(steps + 1);
    for (int m = 0; m <= steps; ++m) fine[m] = m * dt;
    auto centers = evolve_center(wv, p.r + K * s_acc, x, K, fine);

    for (std::size_t j = 1; j < tr.states.size(); ++j) {
      const double t_local = tr.stored_times[j];
      const std::size_t idx = std::size_t(std::llround(t_local / dt));
      run.history.push_back(
          envelope_at(tr.states[j], p, K, s_acc + t_local, centers[idx]));
    }
    cur = tr.states.back();
    x = centers.back();
    s_acc += wcfg.T;
    ++run.windows;
  }

  run.total_s = s_acc;
  run.final_l1 = run.history.back().measured[2];
  run.l1_cap = unit_ball_volume(p.dim) * std::pow(p.r + K * s_acc, -p.gamma);
  run.measured_C = run.final_l1 * std::pow(T0, p.gamma);
  for (const auto& e : run.history) {
    run.any_violation = run.any_violation || e.violated[0] || e.violated[1] || e.violated[2];
    run.any_saturation = run.any_saturation || e.saturated;
  }
  return run;
}

double transfer_check(const ScalarField& theta0, const ScalarField& psi0,
                      const VelocityPath& v, const SymbolTable& table,
                      const SolverConfig& cfg, double t) {
  require(theta0.grid == psi0.grid, "transfer_check: grids differ");
  require(cfg.scheme == Scheme::ExponentialEuler,
          "transfer_check: pairings march with ExponentialEuler");
  require(t >= 0.0, "transfer_check: time must be nonnegative");
  if (t == 0.0) return 0.0;

  const double w = theta0.grid.cell_measure();
  auto dot = [&](const ScalarField& a, const ScalarField& b) {
    long double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.values[i] * b.values[i];
    return double(s) * w;
  };
  SolverConfig rcfg = cfg;
  rcfg.T = t;
  rcfg.store_every = 1 << 30;  // initial and final states only
  const KernelSpec unused_kernel{};
  Trajectory fw = solve_forward(theta0, v, unused_kernel, table, rcfg);
  Trajectory bw = solve_backward_dual(psi0, v, unused_kernel, table, rcfg);
  const double lhs = dot(fw.states.back(), psi0);
  const double rhs = dot(theta0, bw.states.back());
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

PairingReport holder_by_duality(const ScalarField& theta,
                                const std::vector<MoleculeParams>& family) {
  require(!family.empty(), "holder_by_duality: family must not be empty");
  const double gamma = family.front().gamma;
  for (const auto& p : family) {
    require(p.dim == theta.grid.dim, "holder_by_duality: dimension mismatch");
    require(std::abs(p.gamma - gamma) <= 1e-12,
            "holder_by_duality: family must share one gamma");
  }
  PairingReport rep;
  const double w = theta.grid.cell_measure();
  for (const auto& p : family) {
    ScalarField psi = build_molecule(p, theta.grid);
    long double s = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) s += theta.values[i] * psi.values[i];
    PairingReport::Entry e{p.r, p.x0, std::abs(double(s) * w)};
    rep.max_pairing = std::max(rep.max_pairing, e.pairing);
    rep.entries.push_back(e);
  }
  rep.holder_value = holder_seminorm(theta, gamma);
  rep.fitted_constant = rep.holder_value > 0.0 ? rep.max_pairing / rep.holder_value : 0.0;
  return rep;
}

}  // namespace levyflow
