#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "levyflow/norms.hpp"
#include "levyflow/symbol.hpp"
#include "levyflow/velocity.hpp"
#include "levyflow/verify.hpp"

using namespace levyflow;

namespace {

const double kTau = 2.0 * std::numbers::pi;

KernelSpec case_d(int dim) {
  KernelSpec k;
  k.dim = dim;
  k.case_tag = KernelCase::D;
  k.family = KernelFamily::PowerLaw;
  k.alpha = k.beta = k.delta = 0.5;
  return k;
}

double quadratic_form(const ScalarField& a, const ScalarField& b) {
  long double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.values[i] * b.values[i];
  return double(acc) * a.grid.cell_measure();
}

}  // namespace

TEST_CASE("cutoff_field is the quintic plateau bump") {
  TorusGrid g{2, 64, kTau};
  const std::array<double, 2> c = {std::numbers::pi, std::numbers::pi};
  const double R = 1.0;
  ScalarField phi = cutoff_field(g, c, R);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    double d = std::sqrt(periodic_dist2(g, i, c));
    if (d <= 0.5 * R) CHECK(phi.values[i] == 1.0);
    if (d >= R) CHECK(phi.values[i] == 0.0);
    CHECK(phi.values[i] >= 0.0);
    CHECK(phi.values[i] <= 1.0);
  }
  // Midpoint of the ramp: with h = 1/4 the point x = 3/4 = 3h is on the
  // lattice and the centered quintic evaluates to exactly 1/2 there.
  TorusGrid g1{1, 32, 8.0};
  ScalarField line = cutoff_field(g1, {0.0, 0.0}, 1.0);
  CHECK(line.values[3] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(line.values[g1.n - 3] == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(cutoff_field(g, c, 0.0), PreconditionError);
}

TEST_CASE("strook_varopoulos_check is an identity at p = 2") {
  TorusGrid g{2, 32, kTau};
  SymbolTable t = compute_symbol(case_d(2), g);
  RandomStream rng(31);
  for (int inst = 0; inst < 5; ++inst) {
    ScalarField f = random_band_limited(g, rng, 4);
    InequalityReport rep = strook_varopoulos_check(f, t, 2);
    CHECK(rep.pass);
    CHECK(rep.constant == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.lhs >= -1e-10 * std::pow(lp_norm(f, 2.0), 2.0));
  }
}

TEST_CASE("strook_varopoulos_check brackets the p = 4 ratio") {
  TorusGrid g{2, 32, kTau};
  SymbolTable t = compute_symbol(case_d(2), g);
  RandomStream rng(32);
  ScalarField f = random_band_limited(g, rng, 4);

  // Sign changes inflate <L f, f^3> against <L f^2, f^2>: for a >= 0 >= -c
  // the integrand ratio (a^3 + c^3) / ((a - c)^2 (a + c)) exceeds one, so
  // signed fields keep the fitted ratio at or above 1.
  InequalityReport signed_rep = strook_varopoulos_check(f, t, 4);
  CHECK(signed_rep.pass);
  CHECK(signed_rep.constant >= 1.0 - 1e-6);

  // Nonnegative data sits in the classical bracket: pointwise
  //   3/4 <= (a^2 + ab + b^2) / (a + b)^2 <= 1   for a, b >= 0,
  // up to the percent-level gap between the spectral and lattice operators.
  double mn = *std::min_element(f.values.begin(), f.values.end());
  ScalarField pos = f;
  for (double& v : pos.values) v += 1.0 - mn;
  InequalityReport rep = strook_varopoulos_check(pos, t, 4);
  CHECK(rep.pass);
  CHECK(rep.constant >= 0.75 - 0.02);
  CHECK(rep.constant <= 1.0 + 0.02);

  CHECK_THROWS_AS(strook_varopoulos_check(f, t, 3), PreconditionError);
  CHECK_THROWS_AS(strook_varopoulos_check(f, t, 0), PreconditionError);
  ScalarField flat(g, 2.0);
  CHECK_THROWS_AS(strook_varopoulos_check(flat, t, 2), PreconditionError);
}

TEST_CASE("apply_levy_direct annihilates constants and is nonnegative definite") {
  TorusGrid g{2, 32, kTau};
  KernelSpec k = case_d(2);
  k.family = KernelFamily::TruncatedPower;
  k.cutoff_radius = 2.0;

  ScalarField c(g, 3.0);
  ScalarField lc = apply_levy_direct(c, k, 1);
  CHECK(lp_norm(lc, kInfinity) == 0.0);

  RandomStream rng(7);
  ScalarField f = random_band_limited(g, rng, 4);
  ScalarField lf = apply_levy_direct(f, k, 1);
  CHECK(quadratic_form(lf, f) >= 0.0);

  CHECK_THROWS_AS(apply_levy_direct(f, k, -1), PreconditionError);
  KernelSpec one = case_d(1);
  CHECK_THROWS_AS(apply_levy_direct(f, one, 1), PreconditionError);
}

TEST_CASE("besov_regularity_check chains for positive and signed fields") {
  TorusGrid g{2, 32, kTau};
  KernelSpec k = case_d(2);
  SymbolTable t = compute_symbol(k, g);
  RandomStream rng(33);

  ScalarField f = random_band_limited(g, rng, 4);
  double mn = *std::min_element(f.values.begin(), f.values.end());
  ScalarField pos = f;
  for (double& v : pos.values) v += 1.0 - mn;

  InequalityReport rep = besov_regularity_check(pos, t, k, 4);
  CHECK(rep.pass);
  CHECK(rep.lhs > 0.0);
  CHECK(rep.rhs > 0.0);
  CHECK(rep.constant > 0.0);
  CHECK(std::isfinite(rep.constant));
  // lhs = c1 c2 rhs by construction of the fitted constants.
  CHECK(rep.lhs == doctest::Approx(rep.constant * rep.rhs).epsilon(1e-10));

  // Signed data splits into parts and checks the cross pairings.
  InequalityReport srep = besov_regularity_check(f, t, k, 4);
  CHECK(srep.pass);
  auto meta = [&](const char* key) {
    for (const auto& [k2, v] : srep.metadata)
      if (k2 == key) return v;
    return -1.0;
  };
  CHECK(meta("split") == 1.0);
  CHECK(meta("cross_pm") >= -srep.tolerance);
  CHECK(meta("cross_mp") >= -srep.tolerance);

  CHECK_THROWS_AS(besov_regularity_check(f, t, k, 5), PreconditionError);
}

TEST_CASE("commutator_scaling_check fits the case (d) decay rate") {
  TorusGrid g{2, 128, kTau};
  KernelSpec k = case_d(2);
  SymbolTable t = compute_symbol(k, g);
  std::vector<double> radii = {0.45, 0.6364, 0.9};
  InequalityReport rep = commutator_scaling_check(t, k, g, radii, 0.3);
  CHECK(rep.expected_slope == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(rep.slope == doctest::Approx(-1.0).epsilon(0.1));  // measured -0.9956
  CHECK(rep.pass);
  // Sup norms decrease with the radius and the L2 companions are recorded.
  REQUIRE(rep.metadata.size() >= 2 * radii.size());

  CHECK_THROWS_AS(commutator_scaling_check(t, k, g, {0.45}, 0.3), PreconditionError);
  CHECK_THROWS_AS(commutator_scaling_check(t, k, g, {0.45, 0.5}, 0.3),
                  PreconditionError);  // less than an octave
  CHECK_THROWS_AS(commutator_scaling_check(t, k, g, {0.1, 0.9}, 0.3),
                  PreconditionError);  // below 8h
  CHECK_THROWS_AS(commutator_scaling_check(t, k, g, {0.45, 2.0}, 0.3),
                  PreconditionError);  // above Lbox/4
}

TEST_CASE("fractional_identity_check recovers omega - 1 and its trend") {
  TorusGrid g{2, 512, kTau};
  double prev = -2.0;
  for (double omega : {0.3, 0.5, 0.7}) {
    InequalityReport rep = fractional_identity_check(g, omega, 0.1);
    CHECK(rep.expected_slope == doctest::Approx(omega - 1.0).epsilon(1e-15));
    CHECK(std::abs(rep.slope - rep.expected_slope) <= 0.1);
    CHECK(rep.pass);
    CHECK(rep.slope > prev);  // steeper omega flattens the fitted exponent
    prev = rep.slope;
  }
  CHECK_THROWS_AS(fractional_identity_check(g, 0.0, 0.1), PreconditionError);
  CHECK_THROWS_AS(fractional_identity_check(g, 1.0, 0.1), PreconditionError);
  TorusGrid tiny{2, 8, kTau};
  CHECK_THROWS_AS(fractional_identity_check(tiny, 0.5, 0.1), PreconditionError);
}

TEST_CASE("fit_loglog_slope recovers exact power laws") {
  std::vector<double> x = {1.0, 2.0, 4.0, 8.0, 16.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.7));
  CHECK(fit_loglog_slope(x, y) == doctest::Approx(-1.7).epsilon(1e-12));

  std::vector<double> up;
  for (double v : x) up.push_back(0.5 * std::pow(v, 2.25));
  CHECK(fit_loglog_slope(x, up) == doctest::Approx(2.25).epsilon(1e-12));

  CHECK_THROWS_AS(fit_loglog_slope({1.0}, {1.0}), PreconditionError);
  CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0}, {1.0}), PreconditionError);
  CHECK_THROWS_AS(fit_loglog_slope({1.0, -2.0}, {1.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0}, {0.0, 1.0}), PreconditionError);
}
