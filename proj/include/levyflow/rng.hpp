#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace levyflow {

/// Deterministic random stream.  Distribution transforms are written out
/// explicitly (instead of std::*_distribution) so that byte-identical output
/// is reproducible across standard library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), eng_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Derived child stream; decorrelates sub-experiments deterministically.
  RandomStream child(std::uint64_t tag) const {
    return RandomStream(seed_ ^ (0x9e3779b97f4a7c15ull * (tag + 1)));
  }

  double uniform() {  // in [0, 1)
    return double(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {  // Box-Muller, one value per draw pair
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::uint64_t seed_ = 0;
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace levyflow
