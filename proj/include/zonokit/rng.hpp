#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "zonokit/linalg.hpp"

namespace zonokit {

// Seeded RNG with platform-independent mappings. std:: distributions are not
// reproducible across standard libraries, so the uniform draw is built
// directly from the mt19937_64 bit stream; identical seeds give identical
// traces everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [-1, 1).
  double symmetric() { return 2.0 * unit() - 1.0; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  /// Coefficient vector drawn uniformly from [-1, 1]^n.
  Vector box(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = symmetric();
    return v;
  }

  /// k distinct values from {1, ..., p}, ascending.
  std::vector<int> choose(int p, int k) {
    std::vector<int> ids(p);
    for (int i = 0; i < p; ++i) ids[i] = i + 1;
    for (int i = 0; i < k; ++i) {
      const int j = uniform_int(i, p - 1);
      std::swap(ids[i], ids[j]);
    }
    std::vector<int> out(ids.begin(), ids.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace zonokit
