#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "levyflow/norms.hpp"
#include "levyflow/solver.hpp"
#include "levyflow/spectral.hpp"
#include "levyflow/velocity.hpp"
#include "levyflow/verify.hpp"

using namespace levyflow;

namespace {

const double kTau = 2.0 * std::numbers::pi;

KernelSpec power_kernel(int dim, double alpha, double scale = 1.0) {
  KernelSpec k;
  k.dim = dim;
  k.case_tag = alpha == 0.5 ? KernelCase::D : KernelCase::B;
  k.family = KernelFamily::PowerLaw;
  k.alpha = k.beta = k.delta = alpha;
  k.scale = scale;
  return k;
}

KernelSpec truncated_kernel(int dim, double alpha, double cutoff) {
  KernelSpec k = power_kernel(dim, alpha);
  k.family = KernelFamily::TruncatedPower;
  k.cutoff_radius = cutoff;
  return k;
}

ScalarField cosine(const TorusGrid& g, double k) {
  ScalarField f(g);
  for (int i = 0; i < g.n; ++i) f.values[i] = std::cos(k * i * g.spacing());
  return f;
}

double direct_vs_spectral(int dim, int n, double alpha) {
  TorusGrid g{dim, n, kTau};
  KernelSpec k = truncated_kernel(dim, alpha, 2.0);  // support fits one image
  RandomStream rng(2);
  ScalarField f = random_band_limited(g, rng, 4);
  SymbolTable t = compute_symbol(k, g);
  ScalarField spectral = apply_levy(f, t);
  ScalarField direct = apply_levy_direct(f, k, 1);
  ScalarField diff = spectral;
  for (std::size_t i = 0; i < diff.size(); ++i) diff.values[i] -= direct.values[i];
  return lp_norm(diff, 2.0) / lp_norm(direct, 2.0);
}

}  // namespace

TEST_CASE("heat_semigroup decays eigenmodes exactly") {
  TorusGrid g{1, 64, kTau};
  ScalarField f = cosine(g, 3.0);
  ScalarField gf = heat_semigroup(f, 0.7, 0.3);
  const double factor = std::exp(-0.7 * 0.3 * 9.0);
  double err = 0.0;
  for (int i = 0; i < g.n; ++i)
    err = std::max(err, std::abs(gf.values[i] - factor * f.values[i]));
  CHECK(err < 1e-14);

  ScalarField id = heat_semigroup(f, 0.7, 0.0);
  for (int i = 0; i < g.n; ++i) CHECK(std::abs(id.values[i] - f.values[i]) < 1e-13);
  CHECK_THROWS_AS(heat_semigroup(f, 0.7, -1.0), PreconditionError);
  CHECK_THROWS_AS(heat_semigroup(f, -0.1, 1.0), PreconditionError);
}

TEST_CASE("apply_levy multiplies each mode by the symbol") {
  TorusGrid g{1, 64, kTau};
  KernelSpec k = power_kernel(1, 0.5);
  SymbolTable t = compute_symbol(k, g);
  ScalarField f = cosine(g, 5.0);
  ScalarField lf = apply_levy(f, t);
  const double a5 = symbol_value(k, 5.0, t.quad);
  double err = 0.0;
  for (int i = 0; i < g.n; ++i)
    err = std::max(err, std::abs(lf.values[i] - a5 * f.values[i]));
  CHECK(err < 1e-11);

  // Constants are annihilated: a(0) = 0.
  ScalarField c(g, 4.0);
  CHECK(lp_norm(apply_levy(c, t), kInfinity) < 1e-13);

  TorusGrid other{1, 32, kTau};
  ScalarField wrong(other, 1.0);
  CHECK_THROWS_AS(apply_levy(wrong, t), PreconditionError);
}

TEST_CASE("spectral and direct jump operators converge to each other") {
  // Truncated kernels keep the periodization exact at one image; the
  // remaining gap is the singular-cell quadrature error of the direct sum,
  // which shrinks at first order for alpha = 1/2.
  CHECK(direct_vs_spectral(1, 128, 0.25) < 1e-2);   // measured 5.5e-3
  double e256 = direct_vs_spectral(1, 256, 0.5);    // measured 1.6e-2
  double e512 = direct_vs_spectral(1, 512, 0.5);    // measured 8.2e-3
  CHECK(e256 < 3e-2);
  CHECK(e256 / e512 > 1.7);
  CHECK(direct_vs_spectral(2, 64, 0.5) < 0.15);     // measured 8.0e-2
}

TEST_CASE("mollify_velocity is an exact Gaussian multiplier and a sup contraction") {
  TorusGrid g{2, 32, kTau};
  VelocityField v(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto p = point_of(g, i);
    v.comp[0][i] = std::cos(3.0 * p[0]);
    v.comp[1][i] = std::sin(2.0 * p[1]);
  }
  const double eps = 0.2;
  VelocityField m = mollify_velocity(v, eps);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto p = point_of(g, i);
    err = std::max(err, std::abs(m.comp[0][i] -
                                 std::exp(-0.5 * eps * eps * 9.0) * std::cos(3.0 * p[0])));
    err = std::max(err, std::abs(m.comp[1][i] -
                                 std::exp(-0.5 * eps * eps * 4.0) * std::sin(2.0 * p[1])));
  }
  CHECK(err < 1e-13);

  RandomStream rng(8);
  VelocityField r = random_divfree_velocity(g, rng, 5, 1.0);
  CHECK(max_speed(mollify_velocity(r, 0.5)) <= max_speed(r) * (1.0 + 1e-12));
  VelocityField same = mollify_velocity(r, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(std::abs(same.comp[0][i] - r.comp[0][i]) < 1e-13);
  CHECK_THROWS_AS(mollify_velocity(r, -1.0), PreconditionError);
}

TEST_CASE("VelocityPath samples the nearest frame") {
  TorusGrid g{2, 16, kTau};
  std::vector<VelocityField> frames;
  for (int j = 0; j < 3; ++j) {
    VelocityField f(g);
    f.comp[0].assign(g.size(), double(j));
    f.comp[1].assign(g.size(), 0.0);
    frames.push_back(f);
  }
  VelocityPath path(frames, 1.0);  // frame times 0, 1/2, 1
  CHECK(path.frame_count() == 3);
  CHECK(path.sample(0.0).comp[0][0] == 0.0);
  CHECK(path.sample(0.2).comp[0][0] == 0.0);
  CHECK(path.sample(0.3).comp[0][0] == 1.0);
  CHECK(path.sample(0.7).comp[0][0] == 1.0);
  CHECK(path.sample(0.8).comp[0][0] == 2.0);
  CHECK(path.sample(5.0).comp[0][0] == 2.0);  // clamped beyond the horizon
  CHECK(path.max_speed() == 2.0);

  VelocityPath single(frames[1]);
  CHECK(single.sample(0.0).comp[0][0] == 1.0);
  CHECK(single.sample(9.0).comp[0][0] == 1.0);

  CHECK_THROWS_AS(VelocityPath(std::vector<VelocityField>{}, 1.0), PreconditionError);
  CHECK_THROWS_AS(VelocityPath(frames, 0.0), PreconditionError);
  VelocityPath empty;
  CHECK(empty.empty());
  CHECK_THROWS_AS(empty.sample(0.0), PreconditionError);
}

TEST_CASE("contraction_budget reproduces the per-case window estimate") {
  const double T = 0.04, eps = 0.3, v = 0.7, C = 1.3;
  auto base = [&](double phi) { return C * (phi + std::sqrt(T / eps) * v); };

  KernelSpec a;
  a.case_tag = KernelCase::A;
  a.family = KernelFamily::PiecewisePower;
  a.alpha = 0.2;
  a.beta = 0.3;
  a.delta = 0.25;
  CHECK(contraction_budget(a, T, eps, v, C) ==
        doctest::Approx(base(std::pow(T, 0.7) / std::pow(eps, 0.3) +
                             std::pow(T, 0.75) / std::pow(eps, 0.25)))
            .epsilon(1e-14));

  KernelSpec b = power_kernel(2, 0.25);
  CHECK(contraction_budget(b, T, eps, v, C) ==
        doctest::Approx(base(std::pow(T, 0.75) / std::pow(eps, 0.25))).epsilon(1e-14));

  KernelSpec c;
  c.case_tag = KernelCase::C;
  c.family = KernelFamily::PiecewisePower;
  c.alpha = c.beta = 0.5;
  c.delta = 0.3;
  CHECK(contraction_budget(c, T, eps, v, C) ==
        doctest::Approx(base(std::sqrt(T / eps) + T +
                             std::pow(T, 0.7) / std::pow(eps, 0.3)))
            .epsilon(1e-14));

  KernelSpec d = power_kernel(2, 0.5);
  CHECK(contraction_budget(d, T, eps, v, C) ==
        doctest::Approx(base(std::sqrt(T / eps))).epsilon(1e-14));

  CHECK_THROWS_AS(contraction_budget(d, 0.0, eps, v, C), PreconditionError);
  CHECK_THROWS_AS(contraction_budget(d, T, 0.0, v, C), PreconditionError);
}

TEST_CASE("picard_solve matches the closed-form single-mode decay") {
  TorusGrid g{1, 64, kTau};
  KernelSpec k = power_kernel(1, 0.5, 0.1);
  SymbolTable t = compute_symbol(k, g);
  ScalarField f = cosine(g, 1.0);

  SolverConfig cfg;
  cfg.epsilon = 1.0;
  cfg.dt = 1e-4;
  const double Tp = 0.1;
  PicardStats stats;
  ScalarField sol = picard_solve(f, VelocityPath{}, k, t, cfg, Tp, &stats);
  CHECK(stats.budget <= 0.5);
  CHECK(stats.iterations >= 2);

  // With v = 0 the mode evolves as exp(-T (a(1) + eps)).
  const double factor = std::exp(-Tp * (t.a[1] + 1.0));
  double err = 0.0;
  for (int i = 0; i < g.n; ++i)
    err = std::max(err, std::abs(sol.values[i] - factor * f.values[i]));
  CHECK(err < 1e-6);  // measured 4.3e-7 at dt = 1e-4
}

TEST_CASE("picard_solve contracts geometrically and enforces its budget") {
  TorusGrid g{2, 32, kTau};
  KernelSpec k = power_kernel(2, 0.5);
  SymbolTable t = compute_symbol(k, g);
  RandomStream rng(6);
  ScalarField f = random_band_limited(g, rng, 3);
  VelocityPath v(random_divfree_velocity(g, rng, 3, 0.5));

  SolverConfig cfg;
  cfg.epsilon = 0.5;
  cfg.dt = 5e-4;
  PicardStats stats;
  picard_solve(f, v, k, t, cfg, 0.02, &stats);
  CHECK(stats.budget <= 0.5);
  REQUIRE(stats.increments.size() >= 2);
  for (std::size_t i = 0; i + 1 < stats.increments.size(); ++i) {
    if (stats.increments[i] < 1e-12) break;  // at the convergence floor
    CHECK(stats.increments[i + 1] <= 0.5 * stats.increments[i]);
  }

  // A long window at small epsilon blows past the admissible budget.
  SolverConfig wide;
  wide.epsilon = 1e-3;
  CHECK_THROWS_AS(picard_solve(f, v, k, t, wide, 1.0), PreconditionError);
}

TEST_CASE("solve_forward enforces CFL, multiplier cap, and scheme limits") {
  TorusGrid g{2, 32, kTau};
  KernelSpec k = power_kernel(2, 0.5);
  SymbolTable t = compute_symbol(k, g);
  RandomStream rng(3);
  ScalarField f = random_band_limited(g, rng, 3);
  VelocityPath v(random_divfree_velocity(g, rng, 3, 1.0));

  SolverConfig cfg;
  cfg.dt = 0.2;  // far above h / (2 max|v|) ~ 0.098
  cfg.T = 1.0;
  CHECK_THROWS_AS(solve_forward(f, v, k, t, cfg), PreconditionError);

  cfg.dt = 0.05;
  cfg.multiplier_cap = 1e-6;
  CHECK_THROWS_AS(solve_forward(f, v, k, t, cfg), PreconditionError);

  SolverConfig inviscid;
  inviscid.epsilon = 0.0;
  inviscid.scheme = Scheme::DuhamelPicard;
  inviscid.dt = 0.05;
  CHECK_THROWS_AS(solve_forward(f, v, k, t, inviscid), PreconditionError);

  SolverConfig bad;
  bad.T = -1.0;
  CHECK_THROWS_AS(solve_forward(f, v, k, t, bad), PreconditionError);
}

TEST_CASE("exponential Euler conserves mass and dissipates L2") {
  TorusGrid g{2, 32, kTau};
  KernelSpec k = power_kernel(2, 0.5);
  SymbolTable t = compute_symbol(k, g);
  RandomStream rng(12);
  ScalarField f = random_band_limited(g, rng, 3);
  double lo = f.values[0], hi = f.values[0];
  for (double x : f.values) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  for (double& x : f.values) x = (x - lo) / (hi - lo);  // data in [0, 1]
  VelocityPath v(random_divfree_velocity(g, rng, 3, 0.9));

  SolverConfig cfg;
  cfg.epsilon = 1e-3;
  cfg.dt = 0.8 * g.spacing() / (2.0 * 0.9);
  cfg.T = 50 * cfg.dt;
  cfg.store_every = 10;
  Trajectory traj = solve_forward(f, v, k, t, cfg);
  REQUIRE(traj.series.size() == 51);

  for (std::size_t m = 1; m < traj.series.size(); ++m) {
    CHECK(traj.series[m].l2 <= traj.series[m - 1].l2 * (1.0 + 1e-8));
    CHECK(traj.series[m].min >= -1e-6);
    CHECK(traj.series[m].max <= 1.0 + 1e-6);
  }

  // Conservation form + a(0) = 0: the mean is transported exactly.
  auto mean_of = [&](const ScalarField& s) {
    long double acc = 0.0;
    for (double x : s.values) acc += x;
    return double(acc) / s.size();
  };
  CHECK(mean_of(traj.states.back()) ==
        doctest::Approx(mean_of(traj.states.front())).epsilon(1e-12));

  // store_every keeps t = 0, every 10th step, and the final state.
  REQUIRE(traj.stored_times.size() == 6);
  CHECK(traj.stored_times.front() == 0.0);
  CHECK(traj.stored_times.back() == doctest::Approx(cfg.T).epsilon(1e-12));
  CHECK(traj.states.size() == 6);
}

TEST_CASE("forward and dual marches coincide for v = 0") {
  TorusGrid g{2, 16, kTau};
  KernelSpec k = power_kernel(2, 0.5);
  SymbolTable t = compute_symbol(k, g);
  RandomStream rng(9);
  ScalarField f = random_band_limited(g, rng, 3);

  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.T = 0.2;
  cfg.store_every = 1000;  // final state only (plus t = 0)
  Trajectory fwd = solve_forward(f, VelocityPath{}, k, t, cfg);
  Trajectory dual = solve_backward_dual(f, VelocityPath{}, k, t, cfg);
  REQUIRE(fwd.states.size() == dual.states.size());
  const ScalarField &a = fwd.states.back(), &b = dual.states.back();
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::abs(a.values[i] - b.values[i]) < 1e-14);
}

TEST_CASE("heat_levy_l1_norm equals the norm of the synthesized field") {
  TorusGrid g{2, 32, kTau};
  KernelSpec k = power_kernel(2, 0.5);
  SymbolTable t = compute_symbol(k, g);
  const double eps = 0.4, tau = 0.3;

  Spectrum s(g);
  for (std::size_t i = 0; i < s.coef.size(); ++i)
    s.coef[i] = std::exp(-eps * tau * freq_norm2(g, i));
  ScalarField kernel_field = inverse(s);
  double expect = lp_norm(apply_levy(kernel_field, t), 1.0);
  CHECK(heat_levy_l1_norm(t, eps, tau) == doctest::Approx(expect).epsilon(1e-12));

  CHECK_THROWS_AS(heat_levy_l1_norm(t, 0.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(heat_levy_l1_norm(t, 1.0, 0.0), PreconditionError);
}

TEST_CASE("unit_ball_volume") {
  CHECK(unit_ball_volume(1) == 2.0);
  CHECK(unit_ball_volume(2) == std::numbers::pi);
}
