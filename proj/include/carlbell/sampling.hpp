#pragma once

// Seeded sampling of windows and domain points. Uniforms are built from the
// top 53 bits of std::mt19937_64, so a seed fixes the sample stream on every
// platform.

#include <cstdint>
#include <random>

#include "carlbell/domain.hpp"

namespace carlbell {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  /// Uniform on [0, 1).
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  bool coin() { return (rng_() >> 63) != 0; }

  /// Unit window half of the time, otherwise m in [0, 2] and width in [0.5, 3].
  Window window() {
    if (coin()) return Window::unit();
    const double m = uniform(0.0, 2.0);
    return {m, m + uniform(0.5, 3.0)};
  }

  /// Rejection sample of {|x1|^p <= x2} in the box [-r, r] x [0, x2_max] x [m, M],
  /// keeping only points at least `margin` away from the side and the lids
  /// (relative to the window width for x3).
  CetPoint point(const Window& w, double margin = 0.0, const Exponent& exp = Exponent{}, double r = 2.0,
                 double x2_max = 4.0) {
    while (true) {
      const double x1 = uniform(-r, r);
      const double x2 = uniform(0.0, x2_max);
      const double x3 = uniform(w.m() + margin * w.width(), w.M() - margin * w.width());
      if (x2 - abs_pow(x1, exp.p()) >= margin) return {x1, x2, x3};
    }
  }

  /// Interior point with s = x1^2/x2 <= s_max and x3 at least `margin` (relative)
  /// inside both lids. Curvature grows like 1/(x2 - x1^2) near the side, so the
  /// finite-difference contracts are stated on this region.
  CetPoint interior_point(const Window& w, double s_max = 0.95, double margin = 0.02) {
    while (true) {
      const CetPoint pt = point(w, margin);
      if (pt.x1 * pt.x1 <= s_max * pt.x2) return pt;
    }
  }

  /// Point of {x1^2 <= x2 <= x1^2 + eps^2} at least `margin` away from both parabolas.
  JniPoint jni_point(double eps, double margin = 0.0, double r = 2.0) {
    while (true) {
      const double x1 = uniform(-r, r);
      const double gap = uniform(-0.1 * eps * eps, 1.1 * eps * eps);
      if (gap >= margin && gap <= eps * eps - margin) return {x1, x1 * x1 + gap};
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace carlbell
