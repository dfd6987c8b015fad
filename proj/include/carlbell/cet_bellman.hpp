#pragma once

// Sharp Bellman functions of the L^2 Carleson embedding with capacity window
// (m, M): the maximal function B_max (positive root of the cubic) and the
// minimal function B_min (negative root), plus their differential geometry.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "carlbell/domain.hpp"
#include "carlbell/error.hpp"
#include "carlbell/numdiff.hpp"
#include "carlbell/reduced_equation.hpp"

namespace carlbell {

/// Below this distance x3 - m the lower-lid limit formula replaces the root solve.
inline constexpr double kLowerLidSwitch = 1e-9;

struct CubicSolve {
  double a = 0.0;
  Branch branch = Branch::Plus;
  double residual = 0.0;  // |rhs - s| in the solver's variable
  int iterations = 0;
  double pole_gap = 1.0;  // u = 1 - 4a(M - m)
};

struct BellmanValue {
  double value = 0.0;
  double a = std::numeric_limits<double>::quiet_NaN();
  Branch branch = Branch::Plus;
};

inline double plus_bound(const Window& w) { return 1.0 / (4.0 * w.width()); }

/// Right-hand side of the cubic,
/// [(1-2a(M-x3))/(1-2a(M-m))]^2 (1-4a(M-m))/(1-4a(M-x3)).
inline double cubic_rhs(double a, double x3, const Window& w) {
  if (a > plus_bound(w)) {
    std::ostringstream os;
    os << "a=" << a << " exceeds the admissible bound 1/(4(M-m))=" << plus_bound(w);
    throw Error(ErrorKind::DomainError, os.str());
  }
  const double n1 = 1.0 - 2.0 * a * (w.M() - x3);
  const double d1 = 1.0 - 2.0 * a * w.width();
  const double n2 = 1.0 - 4.0 * a * w.width();
  const double d2 = 1.0 - 4.0 * a * (w.M() - x3);
  if (d1 == 0.0 || d2 == 0.0) throw Error(ErrorKind::PoleError, "cubic right-hand side has a vanishing denominator");
  const double ratio = n1 / d1;
  return ratio * ratio * n2 / d2;
}

inline double a_from_pole_gap(double u, const Window& w) { return (1.0 - u) / (4.0 * w.width()); }

inline CubicSolve solve_cubic(double s, double x3, const Window& w, Branch branch) {
  const double theta = (x3 - w.m()) / w.width();
  const auto root = detail::solve_reduced(s, theta, 2.0, branch);
  return {a_from_pole_gap(root.u, w), branch, root.residual, root.iterations, root.u};
}

namespace detail {

// (x3 - m) x2 / ([1-2a(M-m)]^2 [1-4a(M-x3)]) + m x2, written in (u, theta).
inline double cet_value(double x2, double theta, double u, const Window& w) {
  const double half = 0.5 * (1.0 + u);
  return w.width() * theta * x2 / (half * half * (theta + u * (1.0 - theta))) + w.m() * x2;
}

inline double lower_lid_value(const CetPoint& pt, const Window& w) {
  const double spread = std::max(0.0, pt.x2 - pt.x1 * pt.x1);
  return 4.0 * w.width() * spread + w.m() * pt.x2;
}

struct Located {
  double theta;
  double s;
  CubicSolve root;
};

inline Located locate(const CetPoint& pt, const Window& w, Branch branch) {
  const double theta = capacity_fraction(pt.x3, w);
  const double s = ratio_s(pt);
  const auto r = detail::solve_reduced(s, theta, 2.0, branch);
  return {theta, s, {a_from_pole_gap(r.u, w), branch, r.residual, r.iterations, r.u}};
}

// B_min equals m x2 where the negative root does not exist.
inline bool below_min_threshold(const CetPoint& pt, const Window& w) {
  return !(ratio_s(pt) > detail::reduced_threshold(capacity_fraction(pt.x3, w), 2.0));
}

}  // namespace detail

inline BellmanValue eval_bmax(const CetPoint& pt, const Window& w) {
  require_domain(pt, w);
  if (pt.x2 == 0.0) return {0.0, std::numeric_limits<double>::quiet_NaN(), Branch::Plus};
  if (pt.x3 - w.m() < kLowerLidSwitch) return {detail::lower_lid_value(pt, w), plus_bound(w), Branch::Plus};
  const auto loc = detail::locate(pt, w, Branch::Plus);
  return {detail::cet_value(pt.x2, loc.theta, loc.root.pole_gap, w), loc.root.a, Branch::Plus};
}

inline BellmanValue eval_bmin(const CetPoint& pt, const Window& w) {
  require_domain(pt, w);
  if (pt.x2 == 0.0) return {0.0, std::numeric_limits<double>::quiet_NaN(), Branch::Minus};
  if (pt.x3 - w.m() < kLowerLidSwitch || detail::below_min_threshold(pt, w)) {
    return {w.m() * pt.x2, -std::numeric_limits<double>::infinity(), Branch::Minus};
  }
  const auto loc = detail::locate(pt, w, Branch::Minus);
  return {detail::cet_value(pt.x2, loc.theta, loc.root.pole_gap, w), loc.root.a, Branch::Minus};
}

inline BellmanValue eval_bellman(const CetPoint& pt, const Window& w, Branch branch) {
  return branch == Branch::Plus ? eval_bmax(pt, w) : eval_bmin(pt, w);
}

/// Analytic gradient (t1, t2, t3) of the Bellman function on the chosen branch:
///   t1 = -x1 / (a [1 - 2a(M - x3)])
///   t2 = m + 1 / (2a [1 - 2a(M - m)])
///   t3 = x1^2 / [1 - 2a(M - x3)]^2
inline Vec3 gradient(const CetPoint& pt, const Window& w, Branch branch = Branch::Plus) {
  require_domain(pt, w);
  if (pt.x2 <= 0.0 || pt.x3 - w.m() < kLowerLidSwitch) {
    throw Error(ErrorKind::BoundaryGradient, "gradient needs x2 > 0 and x3 > m");
  }
  if (branch == Branch::Minus && detail::below_min_threshold(pt, w)) return {0.0, w.m(), 0.0};
  const auto loc = detail::locate(pt, w, branch);
  const double u = loc.root.pole_gap;
  const double a = loc.root.a;
  if (a == 0.0) throw Error(ErrorKind::BoundaryGradient, "gradient is singular on the side boundary (a = 0)");
  const double h = 0.5 * (1.0 + loc.theta + u * (1.0 - loc.theta));  // 1 - 2a(M - x3)
  const double t1 = -pt.x1 / (a * h);
  const double t2 = w.m() + 1.0 / (a * (1.0 + u));
  const double t3 = pt.x1 * pt.x1 / (h * h);
  return {t1, t2, t3};
}

/// Symmetrized central differences of the analytic gradient.
inline Mat3 hessian_fd(const CetPoint& pt, const Window& w, Branch branch = Branch::Plus) {
  auto grad = [&](const Vec3& x) {
    try {
      return gradient({x(0), x(1), x(2)}, w, branch);
    } catch (const Error& e) {
      throw Error(ErrorKind::BoundaryGradient, std::string("finite-difference stencil left the interior: ") + e.what());
    }
  };
  return hessian_from_gradient<3>(grad, Vec3(pt.x1, pt.x2, pt.x3));
}

/// Direction of the extremal line through pt, normalized to unit x3-component.
inline Vec3 kernel_direction(const CetPoint& pt, const Window& w) {
  require_domain(pt, w);
  if (pt.x1 == 0.0) return {0.0, 0.0, 1.0};
  if (pt.x3 - w.m() < kLowerLidSwitch) throw Error(ErrorKind::PoleError, "kernel direction is undefined on the lower lid");
  const auto loc = detail::locate(pt, w, Branch::Plus);
  const double u = loc.root.pole_gap;
  const double a = loc.root.a;
  if (u == 0.0) throw Error(ErrorKind::PoleError, "kernel direction has a pole at a = 1/(4(M-m))");
  const double h = 0.5 * (1.0 + loc.theta + u * (1.0 - loc.theta));
  const double half = 0.5 * (1.0 + u);
  return {2.0 * a * pt.x1 / h, 4.0 * a * half * half * pt.x1 * pt.x1 / (u * h * h), 1.0};
}

/// B(x) - (B(x+) + B(x-))/2 - x1^2 * surplus, where x is the midpoint of x+ and
/// x- lifted by `surplus` in the capacity coordinate. Nonnegative for B_max.
inline double main_inequality_gap(const CetPoint& xp, const CetPoint& xm, double surplus, const Window& w) {
  if (!(surplus >= 0.0)) throw Error(ErrorKind::DomainError, "surplus must be nonnegative");
  const CetPoint mid{0.5 * (xp.x1 + xm.x1), 0.5 * (xp.x2 + xm.x2), 0.5 * (xp.x3 + xm.x3) + surplus};
  const double b_mid = eval_bmax(mid, w).value;
  const double b_p = eval_bmax(xp, w).value;
  const double b_m = eval_bmax(xm, w).value;
  return b_mid - 0.5 * (b_p + b_m) - mid.x1 * mid.x1 * surplus;
}

/// Embedding constant 4(M - m), the coefficient of x2 - x1^2 in the lower-lid
/// value B_max(x1, x2, m) = 4(M - m)(x2 - x1^2) + m x2.
inline double embedding_constant(const Window& w) { return 4.0 * w.width(); }

}  // namespace carlbell
