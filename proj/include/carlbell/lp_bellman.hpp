#pragma once

// L^p Carleson-embedding Bellman functions. The root equation has degree p
// and is solved by bracketed bisection in the pole distance
// u = 1 - pq(M-m) a|a|^(p-2); p = 2 is routed through cet_bellman.

#include <cmath>
#include <limits>
#include <sstream>

#include "carlbell/cet_bellman.hpp"
#include "carlbell/domain.hpp"
#include "carlbell/error.hpp"
#include "carlbell/reduced_equation.hpp"

namespace carlbell {

struct LpSolve {
  double a = 0.0;
  Branch branch = Branch::Plus;
  double residual = 0.0;
  double p = 2.0;
  int iterations = 0;
  double pole_gap = 1.0;
};

/// Upper end (1/(pq(M-m)))^(q-1) of the maximizing bracket.
inline double lp_bound(const Window& w, const Exponent& exp) {
  if (exp.is_two()) return plus_bound(w);
  return std::pow(1.0 / (exp.p() * exp.q() * w.width()), exp.q() - 1.0);
}

namespace detail {

// a|a|^(p-2), with the removable zero at a = 0.
inline double signed_power(double a, double p) {
  if (a == 0.0) return 0.0;
  const double mag = std::exp((p - 1.0) * std::log(std::abs(a)));
  return a > 0.0 ? mag : -mag;
}

inline double a_from_lp_gap(double u, const Window& w, const Exponent& exp) {
  if (exp.is_two()) return a_from_pole_gap(u, w);
  const double g = (1.0 - u) / (exp.p() * exp.q() * w.width());
  if (g == 0.0) return 0.0;
  const double mag = std::exp(std::log(std::abs(g)) / (exp.p() - 1.0));
  return g > 0.0 ? mag : -mag;
}

}  // namespace detail

/// |(1-q(M-x3)g)/(1-q(M-m)g)|^p (1-pq(M-m)g)/(1-pq(M-x3)g), g = a|a|^(p-2).
/// One power of a is factored out analytically, so a = 0 gives the limit 1.
inline double lp_rhs(double a, double x3, const Window& w, const Exponent& exp) {
  if (exp.is_two()) return cubic_rhs(a, x3, w);
  if (a > lp_bound(w, exp)) {
    std::ostringstream os;
    os << "a=" << a << " exceeds the admissible bound " << lp_bound(w, exp);
    throw Error(ErrorKind::DomainError, os.str());
  }
  const double p = exp.p();
  const double q = exp.q();
  const double g = detail::signed_power(a, p);
  const double num1 = 1.0 - q * (w.M() - x3) * g;
  const double den1 = 1.0 - q * w.width() * g;
  const double num2 = 1.0 - p * q * w.width() * g;
  const double den2 = 1.0 - p * q * (w.M() - x3) * g;
  if (den1 == 0.0 || den2 == 0.0) throw Error(ErrorKind::PoleError, "L^p right-hand side has a vanishing denominator");
  return abs_pow(num1 / den1, p) * num2 / den2;
}

inline LpSolve solve_lp(double s, double x3, const Window& w, const Exponent& exp, Branch branch) {
  if (exp.is_two()) {
    const auto c = solve_cubic(s, x3, w, branch);
    return {c.a, branch, c.residual, 2.0, c.iterations, c.pole_gap};
  }
  const double theta = (x3 - w.m()) / w.width();
  const auto root = detail::solve_reduced(s, theta, exp.p(), branch);
  return {detail::a_from_lp_gap(root.u, w, exp), branch, root.residual, exp.p(), root.iterations, root.u};
}

namespace detail {

// (x3-m) x2 / (|1-q(M-m)g|^p (1-pq(M-x3)g)) + m x2 in (u, theta).
inline double lp_value(double x2, double theta, double u, const Window& w, const Exponent& exp) {
  const double p = exp.p();
  const double lead = abs_pow((p - 1.0 + u) / p, p);
  return w.width() * theta * x2 / (lead * (theta + u * (1.0 - theta))) + w.m() * x2;
}

// Limit of the maximizing value as x3 -> m: q^p (M-m)(x2 - |x1|^p) + m x2.
inline double lp_lower_lid_value(const CetPoint& pt, const Window& w, const Exponent& exp) {
  const double spread = std::max(0.0, pt.x2 - abs_pow(pt.x1, exp.p()));
  return abs_pow(exp.q(), exp.p()) * w.width() * spread + w.m() * pt.x2;
}

}  // namespace detail

inline BellmanValue eval_lp(const CetPoint& pt, const Window& w, const Exponent& exp, Branch branch) {
  if (exp.is_two()) return eval_bellman(pt, w, branch);
  require_domain(pt, w, exp);
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  if (pt.x2 == 0.0) return {0.0, kNaN, branch};

  const double theta = capacity_fraction(pt.x3, w);
  const double s = ratio_s(pt, exp);
  if (pt.x3 - w.m() < kLowerLidSwitch) {
    if (branch == Branch::Plus) return {detail::lp_lower_lid_value(pt, w, exp), lp_bound(w, exp), branch};
    return {w.m() * pt.x2, -std::numeric_limits<double>::infinity(), branch};
  }
  if (branch == Branch::Minus && !(s > detail::reduced_threshold(theta, exp.p()))) {
    return {w.m() * pt.x2, -std::numeric_limits<double>::infinity(), branch};
  }
  const auto root = detail::solve_reduced(s, theta, exp.p(), branch);
  return {detail::lp_value(pt.x2, theta, root.u, w, exp), detail::a_from_lp_gap(root.u, w, exp), branch};
}

}  // namespace carlbell
