#include "levyflow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

#include "levyflow/errors.hpp"

namespace levyflow {

namespace {

// FFTW plans are cached per (dim, n, direction).  Plan creation is not
// thread-safe, execution on distinct buffers is; the cache uses the
// new-array execute interface so one plan serves all arrays.
struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<int, int, int>, fftw_plan> plans;

  fftw_plan get(const TorusGrid& g, int sign) {
    std::scoped_lock lock(mu);
    auto key = std::make_tuple(g.dim, g.n, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    // FFTW_ESTIMATE keeps planning deterministic and fast; the transform
    // sizes here are powers of two, where estimated plans are near-optimal.
    std::vector<fftw_complex> buf(g.size());
    fftw_plan p = g.dim == 1
                      ? fftw_plan_dft_1d(g.n, buf.data(), buf.data(), sign,
                                         FFTW_ESTIMATE | FFTW_UNALIGNED)
                      : fftw_plan_dft_2d(g.n, g.n, buf.data(), buf.data(), sign,
                                         FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void execute(const TorusGrid& g, int sign, std::vector<std::complex<double>>& inout) {
  fftw_plan p = cache().get(g, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(inout.data());
  fftw_execute_dft(p, ptr, ptr);
}

}  // namespace

Spectrum forward(const ScalarField& f) {
  validate(f.grid);
  Spectrum s(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) s.coef[i] = f.values[i];
  execute(f.grid, FFTW_FORWARD, s.coef);
  const double w = f.grid.cell_measure();
  for (auto& c : s.coef) c *= w;
  return s;
}

ScalarField inverse(const Spectrum& s) {
  std::vector<std::complex<double>> buf = s.coef;
  execute(s.grid, FFTW_BACKWARD, buf);
  ScalarField f(s.grid);
  const double w = 1.0 / s.grid.volume();
  for (std::size_t i = 0; i < buf.size(); ++i) f.values[i] = buf[i].real() * w;
  return f;
}

std::array<int, 2> wavenumbers_of(const TorusGrid& g, std::size_t idx) {
  if (g.dim == 1) return {g.wavenumber(int(idx)), 0};
  return {g.wavenumber(int(idx / std::size_t(g.n))),
          g.wavenumber(int(idx % std::size_t(g.n)))};
}

double freq_norm2(const TorusGrid& g, std::size_t idx) {
  auto k = wavenumbers_of(g, idx);
  double a = g.frequency(k[0]);
  double b = g.frequency(k[1]);
  return a * a + b * b;
}

Spectrum derivative(const Spectrum& s, int axis) {
  if (axis < 0 || axis >= s.grid.dim)
    throw PreconditionError("derivative: axis out of range for grid dimension");
  Spectrum out(s.grid);
  const int nyq = -s.grid.n / 2;
  for (std::size_t i = 0; i < s.coef.size(); ++i) {
    auto k = wavenumbers_of(s.grid, i);
    if (k[axis] == nyq) {
      out.coef[i] = 0.0;
      continue;
    }
    double xi = s.grid.frequency(k[axis]);
    out.coef[i] = std::complex<double>(0.0, xi) * s.coef[i];
  }
  return out;
}

void dealias(Spectrum& s) {
  const int kc = s.grid.n / 3;
  for (std::size_t i = 0; i < s.coef.size(); ++i) {
    auto k = wavenumbers_of(s.grid, i);
    if (std::abs(k[0]) > kc || (s.grid.dim == 2 && std::abs(k[1]) > kc))
      s.coef[i] = 0.0;
  }
}

bool is_dealiased(const Spectrum& s, double tol) {
  const int kc = s.grid.n / 3;
  for (std::size_t i = 0; i < s.coef.size(); ++i) {
    auto k = wavenumbers_of(s.grid, i);
    if ((std::abs(k[0]) > kc || (s.grid.dim == 2 && std::abs(k[1]) > kc)) &&
        std::abs(s.coef[i]) > tol)
      return false;
  }
  return true;
}

}  // namespace levyflow
