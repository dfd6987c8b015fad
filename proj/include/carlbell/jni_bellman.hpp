#pragma once

// Bellman family of the John-Nirenberg inequality on
// {x1^2 <= x2 <= x1^2 + eps^2}, indexed by delta in [eps, 1).

#include <cmath>
#include <sstream>
#include <string>

#include "carlbell/domain.hpp"
#include "carlbell/error.hpp"
#include "carlbell/numdiff.hpp"

namespace carlbell {

/// Line x2 - 2a x1 + a^2 - delta^2 = 0, tangent to x2 = x1^2 + delta^2 at x1 = a.
struct JniTangentLine {
  double a = 0.0;
  double delta = 0.0;

  // Coefficients of c2 * x2 + c1 * x1 + c0 = 0.
  [[nodiscard]] double c2() const { return 1.0; }
  [[nodiscard]] double c1() const { return -2.0 * a; }
  [[nodiscard]] double c0() const { return a * a - delta * delta; }

  [[nodiscard]] double residual(double x1, double x2) const { return c2() * x2 + c1() * x1 + c0(); }
  [[nodiscard]] double x2_at(double x1) const { return 2.0 * a * x1 - c0(); }
  [[nodiscard]] JniPoint tangency_point() const { return {a, a * a + delta * delta}; }
  [[nodiscard]] double left_foot() const { return a - delta; }
  [[nodiscard]] double right_foot() const { return a + delta; }
};

namespace detail {

// sqrt(delta^2 - (x2 - x1^2)), clamped at 0 within 1e-14.
inline double jni_root(const JniPoint& pt, double delta) {
  const double arg = delta * delta - (pt.x2 - pt.x1 * pt.x1);
  if (arg < -1e-14) {
    std::ostringstream os;
    os << "x2 - x1^2 = " << pt.x2 - pt.x1 * pt.x1 << " exceeds delta^2 = " << delta * delta;
    throw Error(ErrorKind::DomainError, os.str());
  }
  return arg <= 1e-14 ? 0.0 : std::sqrt(arg);
}

}  // namespace detail

/// Abscissa of the tangency point of the extremal line through pt.
inline double jni_a(const JniPoint& pt, double delta) { return pt.x1 + detail::jni_root(pt, delta); }

inline double eval_jni(const JniPoint& pt, const JniParams& params) {
  if (!in_domain(pt, params.eps())) {
    std::ostringstream os;
    os << "point (" << pt.x1 << ", " << pt.x2 << ") is outside {x1^2 <= x2 <= x1^2 + eps^2} for eps=" << params.eps();
    throw Error(ErrorKind::DomainError, os.str());
  }
  const double delta = params.delta();
  const double r = detail::jni_root(pt, delta);
  return std::exp(-delta) / (1.0 - delta) * (1.0 - r) * std::exp(pt.x1 + r);
}

/// Analytic gradient: dB/dx1 = K e^{x1+r}(1 - r - x1), dB/dx2 = K e^{x1+r}/2,
/// with K = e^{-delta}/(1 - delta) and r = sqrt(delta^2 - (x2 - x1^2)).
inline Vec2 jni_gradient(const JniPoint& pt, const JniParams& params) {
  eval_jni(pt, params);  // validates the domain
  const double delta = params.delta();
  const double r = detail::jni_root(pt, delta);
  const double k = std::exp(-delta) / (1.0 - delta) * std::exp(pt.x1 + r);
  return {k * (1.0 - r - pt.x1), 0.5 * k};
}

/// Central differences of the analytic gradient. The domain is only eps^2 thick
/// in x2, so the steps are 1e-5 delta in x1 and 1e-5 delta^2 in x2.
inline Mat2 jni_hessian_fd(const JniPoint& pt, const JniParams& params) {
  auto grad = [&](const Vec2& x) {
    try {
      return jni_gradient({x(0), x(1)}, params);
    } catch (const Error& e) {
      throw Error(ErrorKind::BoundaryGradient, std::string("finite-difference stencil left the domain: ") + e.what());
    }
  };
  const double delta = params.delta();
  return hessian_from_gradient<2>(grad, Vec2(pt.x1, pt.x2), Vec2(1e-5 * delta, 1e-5 * delta * delta));
}

/// Determinant of the finite-difference Hessian (Monge-Ampere residual).
inline double jni_ma_residual(const JniPoint& pt, const JniParams& params) {
  return jni_hessian_fd(pt, params).determinant();
}

inline JniTangentLine jni_tangent_line(double a, double delta) { return {a, delta}; }

}  // namespace carlbell
