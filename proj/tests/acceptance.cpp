// Acceptance gate: one pass/fail line per criterion, pinned tolerances.
// Exit status is 0 only when every criterion passes.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "levyflow/config.hpp"
#include "levyflow/errors.hpp"
#include "levyflow/norms.hpp"
#include "levyflow/report.hpp"
#include "levyflow/rng.hpp"
#include "levyflow/solver.hpp"
#include "levyflow/suites.hpp"
#include "levyflow/velocity.hpp"

using namespace levyflow;
namespace fs = std::filesystem;

namespace {

const fs::path kOutRoot = "acceptance_out";
constexpr std::uint64_t kSeed = 1;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw NumericalError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct SuiteRun {
  SuiteResult res;
  OrderedJson summary;
};

SuiteRun run(const std::string& suite, const std::string& cfg_text,
             const std::string& sub) {
  ExperimentConfig e = decode_experiment(suite, Config::parse_string(cfg_text),
                                         (kOutRoot / sub).string(), kSeed, 1);
  SuiteRun r;
  r.res = run_suite(e);
  r.summary = OrderedJson::parse(slurp(r.res.summary_path));
  return r;
}

const OrderedJson& find_check(const OrderedJson& summary, const std::string& name) {
  for (const auto& c : summary.at("checks"))
    if (c.at("name").get<std::string>() == name) return c;
  throw NumericalError("summary lacks check '" + name + "'");
}

KernelSpec case_d(int dim, double scale = 1.0) {
  KernelSpec k;
  k.dim = dim;
  k.case_tag = KernelCase::D;
  k.family = KernelFamily::PowerLaw;
  k.alpha = k.beta = k.delta = 0.5;
  k.scale = scale;
  return k;
}

// Bounded jump-like initial data: a sigmoid of width w across the zero-level
// set of cos x + cos y, sampled as the same function at every resolution.
ScalarField steep_profile(const TorusGrid& g, double w) {
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto x = point_of(g, i);
    f.values[i] = 1.0 / (1.0 + std::exp(-(std::cos(x[0]) + std::cos(x[1])) / w));
  }
  return f;
}

// Resolution-independent stream function; its curl is the advecting field.
ScalarField analytic_stream(const TorusGrid& g) {
  ScalarField s(g);
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto x = point_of(g, i);
    s.values[i] = std::sin(x[0]) * std::cos(x[1]) +
                  0.4 * std::cos(2.0 * x[0] + 0.7) * std::sin(x[1]);
  }
  return s;
}

VelocityPath unit_speed_stream_velocity(const TorusGrid& g) {
  VelocityField v = make_divfree_velocity(analytic_stream(g));
  double s = max_speed(v);
  for (int c = 0; c < g.dim; ++c)
    for (double& x : v.comp[c]) x /= s;
  v.bmo_bound /= s;
  return VelocityPath(std::move(v));
}

struct Criterion {
  int id;
  const char* label;
  double limit_seconds;  // 0: no limit
  std::function<bool(std::string&)> body;
};

// ---------------------------------------------------------------------------

bool c01_max_principle(std::string& detail) {
  SuiteRun r = run("maxprinciple", "", "c01_maxprinciple");
  const auto& l2 = find_check(r.summary, "l2_nonincreasing");
  const auto& lp = find_check(r.summary, "l1_linf_nonincreasing");
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "worst l2 step +%.1e (tol 1e-8), l1 gain %.1e, linf gain %.1e (tol 1e-4)",
                l2.at("worst_step_increase").get<double>(),
                lp.at("worst_l1_accumulated_increase").get<double>(),
                lp.at("worst_linf_accumulated_increase").get<double>());
  detail = buf;
  return r.res.pass;
}

bool c02_positivity(std::string& detail) {
  SuiteRun r = run("positivity", "", "c02_positivity");
  const auto& rg = find_check(r.summary, "range_preserved");
  char buf[256];
  std::snprintf(buf, sizeof buf, "min %.2e >= -1e-6, max-1 %.2e <= 1e-6",
                rg.at("min").get<double>(), rg.at("max").get<double>() - 1.0);
  detail = buf;
  return r.res.pass;
}

bool c03_symbol_homogeneity(std::string& detail) {
  SuiteRun rd = run("symbol", "", "c03_symbol_d");
  SuiteRun rb = run("symbol", "kernel.case = b\n", "c03_symbol_b");
  const auto& hd = find_check(rd.summary, "homogeneity");
  const auto& hb = find_check(rb.summary, "homogeneity");
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "spread a=1/2 %.2e, a=1/4 %.2e; oracle dev %.2e, %.2e (tol 1e-2)",
                hd.at("relative_spread").get<double>(),
                hb.at("relative_spread").get<double>(),
                hd.at("worst_quadrature_deviation").get<double>(),
                hb.at("worst_quadrature_deviation").get<double>());
  detail = buf;
  return rd.res.pass && rb.res.pass;
}

bool c04_heat_kernel_slopes(std::string& detail) {
  SuiteRun rd = run("heatlevy", "", "c04_heatlevy_d");
  SuiteRun rb = run("heatlevy", "kernel.case = b\n", "c04_heatlevy_b");
  const auto& sd = find_check(rd.summary, "heat_kernel_slope");
  const auto& sb = find_check(rb.summary, "heat_kernel_slope");
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "slope %.3f (expect -0.5), %.3f (expect -0.25), tol 0.1, 2 decades",
                sd.at("slope").get<double>(), sb.at("slope").get<double>());
  detail = buf;
  return rd.res.pass && rb.res.pass;
}

bool c05_picard_mechanics(std::string& detail) {
  const double two_pi = 2.0 * std::numbers::pi;

  // Budget gate: a window whose contraction budget exceeds 1/2 is refused.
  TorusGrid g{2, 32, two_pi};
  KernelSpec k = case_d(2);
  const SymbolTable table = compute_symbol(k, g);
  bool enforced = false;
  {
    double budget = contraction_budget(k, 1.0, 1e-3, 0.0, 1.0);
    SolverConfig cfg;
    cfg.epsilon = 1e-3;
    cfg.dt = 1e-3;
    cfg.scheme = Scheme::DuhamelPicard;
    RandomStream rng(kSeed);
    ScalarField f = random_band_limited(g, rng, 8);
    try {
      picard_solve(f, VelocityPath(), k, table, cfg, 1.0, nullptr);
    } catch (const PreconditionError&) {
      enforced = budget > 0.5;
    }
  }

  // Five random instances at budget 0.3: increments halve each iteration.
  double worst_ratio = 0.0, worst_budget = 0.0;
  bool decay = true;
  {
    SolverConfig cfg;
    cfg.epsilon = 0.5;
    cfg.dt = 5e-4;
    cfg.scheme = Scheme::DuhamelPicard;
    for (int i = 0; i < 5; ++i) {
      RandomStream root(kSeed);
      RandomStream rv = root.child(std::uint64_t(2 * i));
      RandomStream rt = root.child(std::uint64_t(2 * i + 1));
      VelocityPath v(random_divfree_velocity(g, rv, 4, 0.5));
      ScalarField f = random_band_limited(g, rt, 8);
      double m = lp_norm(f, kInfinity);
      for (double& x : f.values) x /= m;
      PicardStats st;
      picard_solve(f, v, k, table, cfg, 0.02, &st);
      worst_budget = std::max(worst_budget, st.budget);
      decay = decay && st.iterations >= 2;
      for (std::size_t j = 0; j + 1 < st.increments.size(); ++j) {
        if (st.increments[j] <= 1e-12 * st.increments[0]) continue;
        double ratio = st.increments[j + 1] / st.increments[j];
        worst_ratio = std::max(worst_ratio, ratio);
        decay = decay && ratio <= 0.5;
      }
    }
  }

  // Single-mode, v = 0: the fixed point is the exact multiplier decay.
  double mode_err = 0.0;
  {
    TorusGrid g1{1, 64, two_pi};
    KernelSpec k1 = case_d(1, 0.1);
    const SymbolTable t1 = compute_symbol(k1, g1);
    SolverConfig cfg;
    cfg.epsilon = 1.0;
    cfg.dt = 1e-4;
    cfg.scheme = Scheme::DuhamelPicard;
    ScalarField f(g1);
    for (std::size_t i = 0; i < f.size(); ++i)
      f.values[i] = std::cos(point_of(g1, i)[0]);
    PicardStats st;
    ScalarField out = picard_solve(f, VelocityPath(), k1, t1, cfg, 0.1, &st);
    worst_budget = std::max(worst_budget, st.budget);
    double factor = std::exp(-0.1 * (t1.a[1] + cfg.epsilon));
    for (std::size_t i = 0; i < out.size(); ++i)
      mode_err = std::max(mode_err, std::abs(out.values[i] - factor * f.values[i]));
  }

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "budget>1/2 refused, worst budget %.3f <= 0.5, worst inc ratio "
                "%.3f <= 0.5, mode err %.1e <= 1e-6",
                worst_budget, worst_ratio, mode_err);
  detail = buf;
  return enforced && decay && worst_budget <= 0.5 && mode_err <= 1e-6;
}

bool c06_strook_varopoulos(std::string& detail) {
  SuiteRun r = run("svineq", "", "c06_svineq");
  const auto& p2 = find_check(r.summary, "p2_identity");
  const auto& p4 = find_check(r.summary, "p4_domination");
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "p2 |ratio-1| %.1e (tol 1e-10), p4 min ratio %.8f (>= 1-1e-6), 50 fields",
                p2.at("worst_deviation").get<double>(),
                p4.at("min_ratio").get<double>());
  detail = buf;
  return r.res.pass;
}

bool c07_besov_chain(std::string& detail) {
  SuiteRun r = run("besov", "", "c07_besov");
  const auto& st = find_check(r.summary, "constants_stable");
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "20 positive fields, chain finite+ordered, constants drift x%.2f (tol x2)",
                st.at("max_drift").get<double>());
  detail = buf;
  return r.res.pass;
}

bool c08_commutator(std::string& detail) {
  SuiteRun r = run("commutator", "", "c08_commutator");
  const auto& sl = find_check(r.summary, "commutator_slope");
  const auto& gs = find_check(r.summary, "slope_grid_stable");
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "slope %.3f (expect -1 tol 0.3), N=512 drift %.3f (tol 0.1), 3 octaves",
                sl.at("slope").get<double>(), gs.at("drift").get<double>());
  detail = buf;
  return r.res.pass;
}

bool c09_transfer(std::string& detail) {
  SuiteRun r = run("transfer", "", "c09_transfer");
  const auto& sa = find_check(r.summary, "self_adjoint_exact");
  const auto& rf = find_check(r.summary, "defect_refines");
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "v=0 defect %.1e (tol 1e-10), worst dt ratio %.2f (>= 1.8), 5 instances",
                sa.at("defect").get<double>(),
                rf.at("worst_refinement_ratio").get<double>());
  detail = buf;
  return r.res.pass;
}

bool c10_molecules(std::string& detail) {
  SuiteRun r = run("molecule", "", "c10_molecule");
  double worst_cap = 0.0;
  bool any_violation = false;
  int count = 0;
  for (const auto& row : r.summary.at("runs")) {
    ++count;
    any_violation = any_violation || row.at("any_violation").get<bool>();
    worst_cap = std::max(worst_cap, row.at("final_l1").get<double>() /
                                        row.at("l1_cap").get<double>());
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%d molecules, %s violations, worst final l1 / cap %.3f (<= 1)",
                count, any_violation ? "HAS" : "zero", worst_cap);
  detail = buf;
  return r.res.pass && count >= 10 && !any_violation && worst_cap <= 1.0;
}

bool c11_holder_stabilization(std::string& detail) {
  const double two_pi = 2.0 * std::numbers::pi;
  double s[2] = {0.0, 0.0};
  int idx = 0;
  for (int n : {128, 256}) {
    TorusGrid g{2, n, two_pi};
    KernelSpec k = case_d(2);
    const SymbolTable table = compute_symbol(k, g);
    VelocityPath v = unit_speed_stream_velocity(g);
    SolverConfig cfg;
    cfg.epsilon = 0.0;
    cfg.T = 0.25;
    cfg.dt = g.spacing() / 2.0 * 0.999;  // CFL at unit speed
    cfg.store_every = 1 << 30;           // retain initial and final states only
    Trajectory traj = solve_forward(steep_profile(g, 0.02), v, k, table, cfg);
    // stride n/128 keeps the physical offset lattice identical across N.
    s[idx++] = holder_seminorm(traj.states.back(), 0.25, n / 128);
  }
  double change = std::abs(s[1] - s[0]) / s[0];
  char buf[256];
  std::snprintf(buf, sizeof buf, "seminorm N=128 %.6f, N=256 %.6f, change %.1e (tol 0.1)",
                s[0], s[1], change);
  detail = buf;
  return change <= 0.1;
}

bool c12_determinism(std::string& detail) {
  int files = 0;
  for (const std::string suite : {"symbol", "svineq"}) {
    SuiteRun a = run(suite, "", "c12_" + suite + "_a");
    SuiteRun b = run(suite, "", "c12_" + suite + "_b");
    if (!a.res.pass || !b.res.pass) return false;
    std::vector<std::string> names_a, names_b;
    for (const auto& ent : fs::directory_iterator(kOutRoot / ("c12_" + suite + "_a")))
      names_a.push_back(ent.path().filename().string());
    for (const auto& ent : fs::directory_iterator(kOutRoot / ("c12_" + suite + "_b")))
      names_b.push_back(ent.path().filename().string());
    std::sort(names_a.begin(), names_a.end());
    std::sort(names_b.begin(), names_b.end());
    if (names_a != names_b || names_a.empty()) return false;
    for (const std::string& name : names_a) {
      if (slurp(kOutRoot / ("c12_" + suite + "_a") / name) !=
          slurp(kOutRoot / ("c12_" + suite + "_b") / name))
        return false;
      ++files;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "symbol + svineq rerun with seed %llu: %d files byte-identical",
                static_cast<unsigned long long>(kSeed), files);
  detail = buf;
  return true;
}

}  // namespace

int main() {
  fs::remove_all(kOutRoot);
  fs::create_directories(kOutRoot);

  const std::vector<Criterion> criteria = {
      {1, "maxprinciple", 120.0, c01_max_principle},
      {2, "positivity", 120.0, c02_positivity},
      {3, "symbol", 60.0, c03_symbol_homogeneity},
      {4, "heatlevy", 60.0, c04_heat_kernel_slopes},
      {5, "picard", 60.0, c05_picard_mechanics},
      {6, "svineq", 60.0, c06_strook_varopoulos},
      {7, "besov", 180.0, c07_besov_chain},
      {8, "commutator", 180.0, c08_commutator},
      {9, "transfer", 120.0, c09_transfer},
      {10, "molecule", 600.0, c10_molecules},
      {11, "holder", 300.0, c11_holder_stabilization},
      {12, "determinism", 0.0, c12_determinism},
  };

  int passed = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool ok = false;
    auto t0 = std::chrono::steady_clock::now();
    try {
      ok = c.body(detail);
    } catch (const std::exception& err) {
      detail = std::string("exception: ") + err.what();
      ok = false;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count();
    if (c.limit_seconds > 0.0 && secs > c.limit_seconds) {
      detail += " [exceeded time limit]";
      ok = false;
    }
    passed += ok ? 1 : 0;
    std::printf("[%s] %02d %-13s %s [%.1fs]\n", ok ? "PASS" : "FAIL", c.id, c.label,
                detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/12 criteria passed\n", passed);
  return passed == 12 ? 0 : 1;
}
