#include <doctest.h>

#include <cmath>
#include <numbers>

#include "levyflow/symbol.hpp"

using namespace levyflow;

namespace {

KernelSpec power_kernel(int dim, double alpha, double scale = 1.0) {
  KernelSpec k;
  k.dim = dim;
  k.case_tag = alpha == 0.5 ? KernelCase::D : KernelCase::B;
  k.family = KernelFamily::PowerLaw;
  k.alpha = k.beta = k.delta = alpha;
  k.scale = scale;
  return k;
}

// a(xi) = c(n, alpha) * scale * |xi|^{2 alpha} for the pure power family,
//   c(n, alpha) = pi^{n/2} |Gamma(-alpha)| / (2^{2 alpha} Gamma((n + 2 alpha) / 2)).
// The four combinations used below evaluate to elementary closed forms.
constexpr double kC1Quarter = 5.0132565492620010;  // 2 sqrt(2 pi)
const double kC1Half = std::numbers::pi;
constexpr double kC2Quarter = 12.013168757445038;
const double kC2Half = 2.0 * std::numbers::pi;

}  // namespace

TEST_CASE("symbol_value vanishes at zero and matches the closed-form constants") {
  CHECK(symbol_value(power_kernel(1, 0.5), 0.0) == 0.0);
  CHECK(symbol_value(power_kernel(2, 0.25), 0.0) == 0.0);

  struct Probe {
    int dim;
    double alpha, constant;
  };
  const Probe probes[] = {{1, 0.25, kC1Quarter},
                          {1, 0.5, kC1Half},
                          {2, 0.25, kC2Quarter},
                          {2, 0.5, kC2Half}};
  for (const Probe& p : probes) {
    KernelSpec k = power_kernel(p.dim, p.alpha, 0.7);
    for (double xi : {1.0, 4.0, 16.0}) {
      double expect = 0.7 * p.constant * std::pow(xi, 2.0 * p.alpha);
      CHECK(symbol_value(k, xi) == doctest::Approx(expect).epsilon(2e-3));

      SymbolQuadrature fine;
      fine.radial_nodes = 8192;
      fine.r_min = 1e-8;
      fine.r_max = 256.0;
      CHECK(symbol_value(k, xi, fine) == doctest::Approx(expect).epsilon(3e-4));
    }
  }
}

TEST_CASE("symbol_value is 2 alpha homogeneous for the power family") {
  for (double alpha : {0.25, 0.5}) {
    KernelSpec k = power_kernel(2, alpha);
    double a1 = symbol_value(k, 1.0);
    double a2 = symbol_value(k, 2.0);
    CHECK(a2 / a1 == doctest::Approx(std::pow(2.0, 2.0 * alpha)).epsilon(2e-3));
  }
}

TEST_CASE("compute_symbol caches lattice radii consistently") {
  TorusGrid g{2, 16, 2.0 * std::numbers::pi};
  KernelSpec k = power_kernel(2, 0.5);
  SymbolTable t = compute_symbol(k, g);
  REQUIRE(t.a.size() == g.size());
  CHECK(t.a[0] == 0.0);
  CHECK(t.tail_bound > 0.0);
  CHECK(t.tail_bound < 0.1);

  // Same |k| -> identical value; table agrees with the radial evaluator.
  auto idx = [&](int k1, int k2) {
    auto wrap = [&](int q) { return q < 0 ? q + g.n : q; };
    return std::size_t(wrap(k1)) * g.n + wrap(k2);
  };
  CHECK(t[idx(3, 4)] == t[idx(5, 0)]);
  CHECK(t[idx(1, 2)] == t[idx(-2, 1)]);
  CHECK(t[idx(0, 7)] ==
        doctest::Approx(symbol_value(k, 7.0, t.quad)).epsilon(1e-12));

  // Nonnegative everywhere.
  for (double v : t.a) CHECK(v >= 0.0);
}

TEST_CASE("compute_symbol rejects an unresolved oscillatory tail") {
  TorusGrid g{1, 16, 2.0 * std::numbers::pi};
  KernelSpec k = power_kernel(1, 0.5);
  SymbolQuadrature close;
  close.radial_nodes = 256;
  close.r_max = 1.0;  // leaves a tail bound of order 1 at the lowest mode
  CHECK_THROWS_AS(compute_symbol(k, g, close), NumericalError);
  close.tail_tol = 100.0;
  CHECK_NOTHROW(compute_symbol(k, g, close));
}

TEST_CASE("symbol_bound_margins recovers the two-sided constants") {
  TorusGrid g{1, 32, 2.0 * std::numbers::pi};
  KernelSpec k = power_kernel(1, 0.5);
  SymbolTable t = compute_symbol(k, g);
  SymbolMargins m = symbol_bound_margins(t, k);
  // a(xi) = pi |xi|: the upper ratio a / (|xi|^{2b} + |xi|^{2d}) is pi/2
  // at every mode, and |xi|^{2a} - a(xi) is negative, so the lower fitted
  // constant collapses to zero.
  CHECK(m.upper_constant == doctest::Approx(std::numbers::pi / 2.0).epsilon(2e-3));
  CHECK(m.lower_constant == 0.0);

  // A small scale flips the lower bound on: a = 0.1 pi |xi| sits below
  // |xi|^{2a} = |xi|, with the worst deficit at the largest lattice radius.
  KernelSpec weak = power_kernel(1, 0.5, 0.1);
  SymbolTable tw = compute_symbol(weak, g);
  SymbolMargins mw = symbol_bound_margins(tw, weak);
  double ximax = 16.0;
  CHECK(mw.lower_constant ==
        doctest::Approx((1.0 - 0.1 * std::numbers::pi) * ximax).epsilon(2e-3));
}

TEST_CASE("fast_j0 tracks the reference Bessel function") {
  double worst = 0.0;
  for (int i = 0; i <= 5000; ++i) {
    double x = 0.01 * i;
    worst = std::max(worst, std::abs(fast_j0(x) - std::cyl_bessel_j(0, x)));
  }
  CHECK(worst < 5e-8);
}
