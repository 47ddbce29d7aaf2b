#include "levyflow/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <numbers>

#include "levyflow/spectral.hpp"

namespace levyflow {

namespace {

constexpr double kPi = std::numbers::pi;

// Angular weight w_dim(u): the sphere integral of (1 - cos(u e1 . sigma)).
//   dim 1: 2 (1 - cos u),   dim 2: 2 pi (1 - J0(u)).
double angular_weight(int dim, double u) {
  if (dim == 1) return 2.0 * (1.0 - std::cos(u));
  return 2.0 * kPi * (1.0 - fast_j0(u));
}

// Small-argument quadratic coefficient of w_dim: w(u) ~ kappa u^2.
double angular_quadratic(int dim) { return dim == 1 ? 1.0 : kPi / 2.0; }

// Mean of the bounded part of w_dim over oscillations (the "1" term).
double angular_mean(int dim) { return dim == 1 ? 2.0 : 2.0 * kPi; }

// Near-origin power form of the family: pi(r) = scale * r^-(dim + 2 expo).
struct InnerPower {
  double expo, scale;
};

InnerPower inner_power(const KernelSpec& k) {
  switch (k.family) {
    case KernelFamily::PowerLaw:
      return {k.alpha, k.scale};
    case KernelFamily::PiecewisePower:
      return {k.beta, k.inner_scale};
    case KernelFamily::TruncatedPower:
      return {k.alpha, k.scale};
  }
  return {0.5, 1.0};
}

std::vector<double> family_breakpoints(const KernelSpec& k) {
  switch (k.family) {
    case KernelFamily::PowerLaw:
      return {};
    case KernelFamily::PiecewisePower:
      return {1.0};
    case KernelFamily::TruncatedPower:
      return {k.cutoff_radius};
  }
  return {};
}

struct SymbolResult {
  double value;
  double tail_bound;
};

// Radial quadrature of w(|xi| r) pi(r) r^(dim-1) over (0, infinity):
// analytic inner region below r_min, graded mesh conforming to the family
// breakpoints on [r_min, r_max], analytic power tail beyond r_max.
SymbolResult symbol_radial(const KernelSpec& k, double xi, const SymbolQuadrature& q) {
  if (xi == 0.0) return {0.0, 0.0};
  xi = std::abs(xi);

  // Inner region: w ~ kappa u^2 gives kappa xi^2 * scale * r^(1 - 2 expo).
  const InnerPower ip = inner_power(k);
  double inner = angular_quadratic(k.dim) * xi * xi * ip.scale *
                 std::pow(q.r_min, 2.0 - 2.0 * ip.expo) / (2.0 - 2.0 * ip.expo);

  // Segment list conforming to breakpoints.
  std::vector<double> edges{q.r_min};
  for (double b : family_breakpoints(k))
    if (b > q.r_min && b < q.r_max) edges.push_back(b);
  edges.push_back(q.r_max);
  std::sort(edges.begin(), edges.end());

  const double log_total = std::log(q.r_max / q.r_min);
  const double gl = 0.5 / std::sqrt(3.0);
  long double acc = 0.0;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    double a = edges[s], b = edges[s + 1];
    int nodes = std::max(16, int(q.radial_nodes * std::log(b / a) / log_total));
    const double ratio = std::pow(b / a, 1.0 / nodes);
    double lo = a;
    for (int i = 0; i < nodes; ++i) {
      double hi = (i + 1 == nodes) ? b : lo * ratio;
      double mid = 0.5 * (lo + hi), width = hi - lo;
      for (double node : {mid - gl * width, mid + gl * width}) {
        acc += 0.5 * width * angular_weight(k.dim, xi * node) *
               kernel_profile(k, node) * std::pow(node, k.dim - 1);
      }
      lo = hi;
    }
  }

  // Tail beyond r_max for the exact power envelope s r^-(1 + 2 d) (radial
  // form).  The bounded part integrates exactly; the oscillatory remainder
  // is bounded by |J0(u)| <= sqrt(2 / (pi u)) for dim 2 and by one
  // integration by parts for dim 1.
  const TailEnvelope te = tail_envelope(k);
  double tail = 0.0, tail_bound = 0.0;
  if (te.scale > 0.0) {
    tail = angular_mean(k.dim) * te.scale * std::pow(q.r_max, -2.0 * te.exponent) /
           (2.0 * te.exponent);
    if (k.dim == 1) {
      tail_bound = 2.0 * 2.0 * te.scale * std::pow(q.r_max, -1.0 - 2.0 * te.exponent) / xi;
    } else {
      tail_bound = 2.0 * kPi * te.scale * std::sqrt(2.0 / (kPi * xi)) *
                   std::pow(q.r_max, -0.5 - 2.0 * te.exponent) / (0.5 + 2.0 * te.exponent);
    }
  }

  return {inner + double(acc) + tail, tail_bound};
}

}  // namespace

double fast_j0(double x) {
  x = std::abs(x);
  if (x < 3.0) {
    double t = x * x / 9.0;
    return 1.0 + t * (-2.2499997 +
                      t * (1.2656208 +
                           t * (-0.3163866 +
                                t * (0.0444479 + t * (-0.0039444 + t * 0.0002100)))));
  }
  double s = 3.0 / x;
  double f = 0.79788456 +
             s * (-0.00000077 +
                  s * (-0.00552740 +
                       s * (-0.00009512 +
                            s * (0.00137237 + s * (-0.00072805 + s * 0.00014476)))));
  double th = x - 0.78539816 +
              s * (-0.04166397 +
                   s * (-0.00003954 +
                        s * (0.00262573 +
                             s * (-0.00054125 + s * (-0.00029333 + s * 0.00013558)))));
  return f * std::cos(th) / std::sqrt(x);
}

double symbol_value(const KernelSpec& k, double xi_mag, const SymbolQuadrature& q) {
  validate(k);
  return symbol_radial(k, xi_mag, q).value;
}

SymbolTable compute_symbol(const KernelSpec& k, const TorusGrid& g,
                           const SymbolQuadrature& q) {
  validate(k);
  validate(g);
  SymbolTable t;
  t.grid = g;
  t.quad = q;
  t.a.assign(g.size(), 0.0);

  // Distinct lattice radii: |k|^2 is an integer on the square lattice.
  std::map<long long, double> by_norm2;
  const double unit = 2.0 * kPi / g.box;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto kk = wavenumbers_of(g, i);
    long long n2 = (long long)kk[0] * kk[0] + (long long)kk[1] * kk[1];
    auto [it, inserted] = by_norm2.try_emplace(n2, 0.0);
    if (inserted && n2 > 0) {
      auto res = symbol_radial(k, unit * std::sqrt(double(n2)), q);
      it->second = res.value;
      t.tail_bound = std::max(t.tail_bound, res.tail_bound);
    }
  }
  if (t.tail_bound > q.tail_tol) {
    std::ostringstream os;
    os << "compute_symbol: oscillatory tail bound " << t.tail_bound << " beyond r_max = "
       << q.r_max << " exceeds tolerance " << q.tail_tol;
    throw NumericalError(os.str());
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto kk = wavenumbers_of(g, i);
    long long n2 = (long long)kk[0] * kk[0] + (long long)kk[1] * kk[1];
    t.a[i] = by_norm2[n2];
  }
  return t;
}

SymbolMargins symbol_bound_margins(const SymbolTable& t, const KernelSpec& k) {
  SymbolMargins m;
  for (std::size_t i = 0; i < t.a.size(); ++i) {
    double x2 = freq_norm2(t.grid, i);
    if (x2 > 0.0) {
      double env = std::pow(x2, k.beta) + std::pow(x2, k.delta);
      m.upper_constant = std::max(m.upper_constant, t.a[i] / env);
    }
    double low = std::pow(x2, k.alpha) - t.a[i];
    m.lower_constant = std::max(m.lower_constant, low);
  }
  return m;
}

}  // namespace levyflow
