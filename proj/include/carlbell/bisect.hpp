#pragma once

#include <cmath>
#include <limits>
#include <sstream>

#include "carlbell/error.hpp"

namespace carlbell {

struct BisectResult {
  double x = 0.0;
  double residual = 0.0;  // |f(x) - target|
  int iterations = 0;
};

/// Solves f(x) = target on [lo, hi] for a monotone f whose values at the two
/// endpoints straddle the target. Bisects until the bracket collapses onto
/// adjacent doubles (or its width drops below 2 eps |x|), then returns the
/// endpoint with the smaller residual.
template <class F>
BisectResult bisect_monotone(F&& f, double target, double lo, double hi, int max_iter = 4000) {
  double f_lo = f(lo) - target;
  double f_hi = f(hi) - target;
  if (f_lo == 0.0) return {lo, 0.0, 0};
  if (f_hi == 0.0) return {hi, 0.0, 0};
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    std::ostringstream os;
    os << "bracket [" << lo << ", " << hi << "] does not straddle the target " << target;
    throw Error(ErrorKind::Nonconvergence, os.str());
  }

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  int it = 0;
  for (; it < max_iter; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 2.0 * kEps * std::abs(mid)) break;
    const double f_mid = f(mid) - target;
    if (f_mid == 0.0) return {mid, 0.0, it + 1};
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  if (it == max_iter) {
    throw Error(ErrorKind::Nonconvergence, "bisection hit its iteration cap");
  }
  if (std::abs(f_lo) <= std::abs(f_hi)) return {lo, std::abs(f_lo), it};
  return {hi, std::abs(f_hi), it};
}

}  // namespace carlbell
