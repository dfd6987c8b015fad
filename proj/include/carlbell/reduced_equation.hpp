#pragma once

// The root equation s = rhs(a) written in the pole distance
//
//     u = 1 - p q (M - m) a|a|^(p-2)        (u = 1 - 4a(M - m) when p = 2)
//
// and the relative capacity theta = (x3 - m)/(M - m). In these variables
//
//     rhs = |(p - (1-u)(1-theta)) / (p - 1 + u)|^p * u / (theta + u(1-theta)),
//
// which is free of the a/a singularity at a = 0 (u = 1) and of the 0/0 at the
// lower lid. u in [0, 1] is the maximizing branch (a in [0, bound]); u > 1 is
// the minimizing branch (a < 0). rhs increases from 0 to 1 on [0, 1] and
// decreases from 1 to (1 - theta)^(p-1) on [1, inf).

#include <cmath>
#include <limits>
#include <sstream>

#include "carlbell/bisect.hpp"
#include "carlbell/domain.hpp"
#include "carlbell/error.hpp"

namespace carlbell::detail {

inline double reduced_rhs(double u, double theta, double p) {
  const double tail = u / (theta + u * (1.0 - theta));
  if (p == 2.0) {
    const double ratio = (1.0 + theta + u * (1.0 - theta)) / (1.0 + u);
    return ratio * ratio * tail;
  }
  const double ratio = (p - (1.0 - u) * (1.0 - theta)) / (p - 1.0 + u);
  return abs_pow(ratio, p) * tail;
}

/// Value of s below which (inclusive) the minimizing branch has no root.
inline double reduced_threshold(double theta, double p) {
  const double base = 1.0 - theta;
  return p == 2.0 ? base : abs_pow(base, p - 1.0);
}

struct ReducedRoot {
  double u = 1.0;
  double residual = 0.0;
  int iterations = 0;
};

inline ReducedRoot solve_reduced(double s, double theta, double p, Branch branch) {
  if (!(s >= 0.0 && s <= 1.0)) {
    std::ostringstream os;
    os << "ratio s must lie in [0, 1], got " << s;
    throw Error(ErrorKind::DomainError, os.str());
  }
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw Error(ErrorKind::DomainError, "root equation needs m < x3 <= M (the lower lid is a limit)");
  }
  auto rhs = [theta, p](double u) { return reduced_rhs(u, theta, p); };

  // rhs - 1 vanishes to second order at u = 1, so a few ulps of roundoff in s
  // would move u by ~1e-8. Such points are on the side boundary.
  if (1.0 - s <= 4.0 * std::numeric_limits<double>::epsilon()) return {1.0, 0.0, 0};

  if (branch == Branch::Plus) {
    const auto r = bisect_monotone(rhs, s, 0.0, 1.0);
    return {r.x, r.residual, r.iterations};
  }

  const double threshold = reduced_threshold(theta, p);
  if (!(s > threshold)) {
    std::ostringstream os;
    os << "no negative root: s=" << s << " does not exceed " << threshold;
    throw Error(ErrorKind::NoNegativeRoot, os.str());
  }
  // u = 1 + 2^k mirrors a = -1, -2, -4, ... in the unit window.
  double hi = 2.0;
  int expansions = 0;
  while (rhs(hi) >= s) {
    hi = 1.0 + 2.0 * (hi - 1.0);
    if (++expansions > 1000 || !std::isfinite(hi)) {
      throw Error(ErrorKind::Nonconvergence, "negative-branch bracket expansion overflowed");
    }
  }
  const auto r = bisect_monotone(rhs, s, 1.0, hi);
  return {r.x, r.residual, r.iterations + expansions};
}

}  // namespace carlbell::detail
