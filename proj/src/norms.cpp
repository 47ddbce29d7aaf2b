#include "levyflow/norms.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "levyflow/errors.hpp"
#include "levyflow/spectral.hpp"

namespace levyflow {

namespace {

double power_p(double d, double p) {
  d = std::abs(d);
  if (p == 1.0) return d;
  if (p == 2.0) return d * d;
  if (p == 4.0) {
    double q = d * d;
    return q * q;
  }
  return std::pow(d, p);
}

// Min-image length of the lattice offset (oi, oj) in grid units.
double offset_length(const TorusGrid& g, int oi, int oj) {
  const double h = g.spacing();
  double dx = std::abs(oi) * h;
  dx = std::min(dx, g.box - dx);
  if (g.dim == 1) return dx;
  double dy = std::abs(oj) * h;
  dy = std::min(dy, g.box - dy);
  return std::hypot(dx, dy);
}

}  // namespace

double lp_norm(const ScalarField& f, double p) {
  if (p != kInfinity && p < 1.0)
    throw PreconditionError("lp_norm: p must be >= 1 or infinity");
  if (p == kInfinity) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  long double acc = 0.0;
  for (double v : f.values) acc += power_p(v, p);
  acc *= f.grid.cell_measure();
  return double(std::pow((double)acc, 1.0 / p));
}

double holder_seminorm(const ScalarField& f, double gamma, int stride) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw PreconditionError("holder_seminorm: gamma must lie in (0, 1]");
  const TorusGrid& g = f.grid;
  if (stride <= 0) stride = g.n <= 128 ? 1 : 4;
  const int m = g.n / stride;

  // The pair scan is grouped by lattice offset: the periodic distance only
  // depends on the offset, so the power is evaluated once per offset and the
  // inner pass is a plain max of |f(x) - f(x + y)|.
  double best = 0.0;
  if (g.dim == 1) {
    for (int o = 1; o <= m / 2; ++o) {
      double w = std::pow(offset_length(g, o * stride, 0), -gamma);
      double d = 0.0;
      for (int i = 0; i < m; ++i) {
        int a = i * stride, b = ((i + o) % m) * stride;
        d = std::max(d, std::abs(f.values[a] - f.values[b]));
      }
      best = std::max(best, d * w);
    }
    return best;
  }
  const int n = g.n;
  for (int oi = 0; oi < m; ++oi) {
    for (int oj = (oi == 0 ? 1 : 0); oj < m; ++oj) {
      // Half of the offsets suffices: (oi, oj) and its negation give the
      // same pair set.  Keep oi <= m/2, and for oi in {0, m/2} keep oj <= m/2.
      if (oi > m / 2) continue;
      if ((oi == 0 || 2 * oi == m) && oj > m / 2) continue;
      double w = std::pow(offset_length(g, oi * stride, oj * stride), -gamma);
      double d = 0.0;
      for (int i = 0; i < m; ++i) {
        const int ia = i * stride;
        const int ib = ((i + oi) % m) * stride;
        const double* ra = &f.values[std::size_t(ia) * n];
        const double* rb = &f.values[std::size_t(ib) * n];
        for (int j = 0; j < m; ++j) {
          int ja = j * stride, jb = ((j + oj) % m) * stride;
          d = std::max(d, std::abs(ra[ja] - rb[jb]));
        }
      }
      best = std::max(best, d * w);
    }
  }
  return best;
}

double besov_seminorm(const ScalarField& f, double s, double p) {
  if (!(s > 0.0 && s < 1.0))
    throw PreconditionError("besov_seminorm: s must lie in (0, 1)");
  if (!(p >= 1.0)) throw PreconditionError("besov_seminorm: p must be >= 1");
  const TorusGrid& g = f.grid;
  const int n = g.n;
  const double hmeas = g.cell_measure();
  const double half = g.box / 2.0;
  long double total = 0.0;
  if (g.dim == 1) {
    for (int o = 1; o < n; ++o) {
      double len = offset_length(g, o, 0);
      if (len > half) continue;
      long double inner = 0.0;
      for (int i = 0; i < n; ++i)
        inner += power_p(f.values[i] - f.values[(i + o) % n], p);
      total += hmeas * std::pow(len, -(g.dim + p * s)) * hmeas * (double)inner;
    }
  } else {
    for (int oi = 0; oi < n; ++oi) {
      for (int oj = (oi == 0 ? 1 : 0); oj < n; ++oj) {
        double len = offset_length(g, oi, oj);
        if (len > half) continue;
        long double inner = 0.0;
        for (int i = 0; i < n; ++i) {
          const double* ra = &f.values[std::size_t(i) * n];
          const double* rb = &f.values[std::size_t((i + oi) % n) * n];
          for (int j = 0; j < n; ++j) inner += power_p(ra[j] - rb[(j + oj) % n], p);
        }
        total += hmeas * std::pow(len, -(g.dim + p * s)) * hmeas * (double)inner;
      }
    }
  }
  return std::pow((double)total, 1.0 / p);
}

double sobolev_seminorm(const ScalarField& f, double s) {
  if (s < 0.0) throw PreconditionError("sobolev_seminorm: s must be >= 0");
  Spectrum c = forward(f);
  long double acc = 0.0;
  for (std::size_t i = 0; i < c.coef.size(); ++i) {
    double x2 = freq_norm2(c.grid, i);
    if (x2 == 0.0) {
      if (s == 0.0) acc += std::norm(c.coef[i]);
      continue;
    }
    acc += std::pow(x2, s) * std::norm(c.coef[i]);
  }
  return std::sqrt(double(acc) / f.grid.volume());
}

double bmo_norm_estimate(const ScalarField& f, int center_stride) {
  const TorusGrid& g = f.grid;
  if (!(g.box > 2.0))
    throw PreconditionError("bmo_norm_estimate: box length must exceed 2");
  if (center_stride <= 0) center_stride = std::max(1, g.n / 16);
  const double h = g.spacing();

  std::vector<double> radii;
  for (double r = 2.0 * h; r <= g.box / 2.0 + 1e-12; r *= 2.0) radii.push_back(r);
  const std::size_t nr = radii.size();

  const int centers_per_axis = g.n / center_stride;
  double best = 0.0;
  std::vector<int> shell(g.size());
  std::vector<double> cnt(nr), sum(nr), sabs(nr);

  const int caxes = g.dim == 1 ? 1 : centers_per_axis;
  for (int ci = 0; ci < centers_per_axis; ++ci) {
    for (int cj = 0; cj < caxes; ++cj) {
      std::array<double, 2> c = {ci * center_stride * h, cj * center_stride * h};
      std::fill(cnt.begin(), cnt.end(), 0.0);
      std::fill(sum.begin(), sum.end(), 0.0);
      std::fill(sabs.begin(), sabs.end(), 0.0);
      // Shell pass: the smallest ball containing each point.
      for (std::size_t idx = 0; idx < g.size(); ++idx) {
        double d = std::sqrt(periodic_dist2(g, idx, c));
        auto it = std::lower_bound(radii.begin(), radii.end(), d - 1e-12);
        shell[idx] = it == radii.end() ? int(nr) : int(it - radii.begin());
      }
      for (std::size_t idx = 0; idx < g.size(); ++idx) {
        int s0 = shell[idx];
        if (s0 >= int(nr)) continue;
        for (std::size_t s = s0; s < nr; ++s) {
          cnt[s] += 1.0;
          sum[s] += f.values[idx];
          sabs[s] += std::abs(f.values[idx]);
        }
      }
      // Oscillation pass against each ball's own mean.
      std::vector<double> osc(nr, 0.0);
      for (std::size_t idx = 0; idx < g.size(); ++idx) {
        int s0 = shell[idx];
        if (s0 >= int(nr)) continue;
        for (std::size_t s = s0; s < nr; ++s)
          osc[s] += std::abs(f.values[idx] - sum[s] / cnt[s]);
      }
      const double hmeas = g.cell_measure();
      for (std::size_t s = 0; s < nr; ++s) {
        if (cnt[s] == 0.0) continue;
        double measure = cnt[s] * hmeas;
        double val = measure <= 1.0 ? osc[s] / cnt[s] : sabs[s] / cnt[s];
        best = std::max(best, val);
      }
    }
  }
  return best;
}

ScalarField truncate_clamp(const ScalarField& f, double k) {
  if (!(k > 0.0)) throw PreconditionError("truncate_clamp: level must be positive");
  ScalarField out = f;
  for (double& v : out.values) v = std::clamp(v, -k, k);
  return out;
}

}  // namespace levyflow
