#pragma once

#include <cstdint>
#include <random>

#include "relumax/rational.hpp"

namespace relumax {

/// Seeded generator whose outputs are identical on every platform.
/// std::mt19937_64's raw sequence is pinned by the standard; the standard
/// distributions are not, so bounded draws are done here by rejection.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  /// Uniform integer in [lo, hi].
  long between(long lo, long hi) {
    return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Uniform over the grid {lo/den, (lo+1)/den, ..., hi/den}.
  Rational grid(long lo, long hi, long den) { return Rational(between(lo, hi), den); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace relumax
