#pragma once

// Extremal lines of the Carleson Bellman function. A line is addressed by its
// root parameter a and the first coordinate xi1 of its bottom anchor
// xi = (xi1, xi1^2, m); it climbs to the upper-lid point zeta. Lines with a
// fixed anchor form the fan F+ (0 <= a < 1/(4(M-m))) or F- (a <= 0).

#include <cmath>
#include <limits>

#include "carlbell/cet_bellman.hpp"
#include "carlbell/domain.hpp"
#include "carlbell/error.hpp"

namespace carlbell {

struct PlanePoint {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Full parameter set of one extremal line. The coefficients t0..t3 are not
/// finite on the vertical side lines (a = 0).
struct FoliationFrame {
  Window window;
  Branch branch = Branch::Plus;
  double a = 0.0;
  double xi1 = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double A = 0.0;     // t3 = A t1^2, A = a^2
  double D = 0.0;     // t0 = D t1^2, D = a/2 - M a^2
  double eta = 1.0;   // 1 - 2a(M - m)
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double pole_gap = 1.0;  // u = 1 - 4a(M - m)

  /// Affine representation t0 + t1 x1 + t2 x2 + t3 x3 of B along the line.
  [[nodiscard]] double affine_value(const CetPoint& x) const { return t0 + t1 * x.x1 + t2 * x.x2 + t3 * x.x3; }
};

namespace detail {

inline PlanePoint line_point_from_gap(double u, double xi1, double x3, const Window& w) {
  if (u == 0.0 || u == -1.0) throw Error(ErrorKind::PoleError, "extremal line is singular at this parameter");
  const double theta = (x3 - w.m()) / w.width();
  const double lift = theta + u * (1.0 - theta);  // 1 - 4a(M - x3)
  return {xi1 * (1.0 + lift) / (1.0 + u), xi1 * xi1 * lift / u};
}

}  // namespace detail

/// Point of the line at height x3:
///   x1 = xi1 (1 - 2a(M - x3))/(1 - 2a(M - m)),  x2 = xi1^2 (1 - 4a(M - x3))/(1 - 4a(M - m)).
inline PlanePoint extremal_line_point(double a, double xi1, double x3, const Window& w) {
  return detail::line_point_from_gap(1.0 - 4.0 * a * w.width(), xi1, x3, w);
}

inline PlanePoint extremal_line_point(const FoliationFrame& frame, double x3) {
  return detail::line_point_from_gap(frame.pole_gap, frame.xi1, x3, frame.window);
}

/// Upper-lid end of the line: zeta1 = xi1/(1 - 2a(M - m)), zeta2 = xi1^2/(1 - 4a(M - m)).
inline PlanePoint upper_trace(double a, double xi1, const Window& w) {
  return extremal_line_point(a, xi1, w.M(), w);
}

/// Residual of the hyperbola zeta2 = zeta1 xi1^2 / (2 xi1 - zeta1) traced by a fan.
inline double hyperbola_residual(const PlanePoint& zeta, double xi1) {
  return zeta.x2 - zeta.x1 * xi1 * xi1 / (2.0 * xi1 - zeta.x1);
}

inline FoliationFrame make_frame(double a, double xi1, const Window& w, Branch branch) {
  FoliationFrame f;
  f.window = w;
  f.branch = branch;
  f.a = a;
  f.xi1 = xi1;
  f.pole_gap = 1.0 - 4.0 * a * w.width();
  f.eta = 1.0 - 2.0 * a * w.width();
  f.A = a * a;
  f.D = 0.5 * a - w.M() * a * a;
  f.t1 = -xi1 / (a * f.eta);
  f.t2 = w.m() + 1.0 / (2.0 * a * f.eta);
  f.t3 = f.A * f.t1 * f.t1;
  f.t0 = f.D * f.t1 * f.t1;
  const auto z = upper_trace(a, xi1, w);
  f.zeta1 = z.x1;
  f.zeta2 = z.x2;
  return f;
}

/// Frame of the extremal line (on the chosen branch) passing through pt.
inline FoliationFrame recover_parameters(const CetPoint& pt, const Window& w, Branch branch) {
  require_domain(pt, w);
  if (pt.x2 == 0.0) throw Error(ErrorKind::DegeneratePoint, "no extremal line through x2 = 0");
  const double theta = capacity_fraction(pt.x3, w);
  const auto root = solve_cubic(ratio_s(pt), pt.x3, w, branch);
  const double u = root.pole_gap;
  const double xi1 = pt.x1 * (1.0 + u) / (1.0 + theta + u * (1.0 - theta));
  auto frame = make_frame(root.a, xi1, w, branch);
  frame.pole_gap = u;
  frame.eta = 0.5 * (1.0 + u);
  const auto z = detail::line_point_from_gap(u, xi1, w.M(), w);
  frame.zeta1 = z.x1;
  frame.zeta2 = z.x2;
  return frame;
}

/// |slope1 - slope2| for the projection of a line onto the unit upper lid and
/// the parabola x2 = A x1^2 through its upper end. Inputs are rescaled to the
/// unit window (a -> a(M - m), t1 -> t1/(M - m)).
inline double tangency_gap(double a, double t1, const Window& w) {
  const double au = a * w.width();
  const double tu = t1 / w.width();
  const double pole = 1.0 - 4.0 * au;
  if (pole == 0.0) throw Error(ErrorKind::PoleError, "tangency slopes have a pole at a = 1/(4(M-m))");
  const double shrink = (1.0 - 2.0 * au) * (1.0 - 2.0 * au);
  const double slope_line = -2.0 * tu * au * shrink / pole;
  const double u1 = -tu * au;
  const double slope_parabola = 2.0 * shrink * u1 / pole;
  return std::abs(slope_line - slope_parabola);
}

}  // namespace carlbell
