#pragma once

// Bellman domains, capacity windows and the elementary predicates shared by
// every evaluator in the library.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>

#include "carlbell/error.hpp"

namespace carlbell {

/// Absolute slack used by every domain-membership test.
inline constexpr double kDomainSlack = 1e-12;

/// Capacity bounds (m, M) of the Carleson condition, 0 <= m < M.
class Window {
 public:
  constexpr Window() = default;
  Window(double m, double M) : m_(m), M_(M) {
    if (!(std::isfinite(m) && std::isfinite(M)) || m < 0.0 || !(m < M)) {
      std::ostringstream os;
      os << "window requires 0 <= m < M, got m=" << m << " M=" << M;
      throw Error(ErrorKind::DomainError, os.str());
    }
  }

  [[nodiscard]] constexpr double m() const noexcept { return m_; }
  [[nodiscard]] constexpr double M() const noexcept { return M_; }
  [[nodiscard]] constexpr double width() const noexcept { return M_ - m_; }

  [[nodiscard]] static Window unit() { return Window(0.0, 1.0); }

 private:
  double m_ = 0.0;
  double M_ = 1.0;
};

/// Integrability exponent p in (1, 64] together with its dual q = p/(p-1).
class Exponent {
 public:
  static constexpr double kMaxP = 64.0;

  constexpr Exponent() = default;
  explicit Exponent(double p) : p_(p), q_(p / (p - 1.0)) {
    if (!std::isfinite(p) || !(p > 1.0) || p > kMaxP) {
      std::ostringstream os;
      os << "exponent p must lie in (1, 64], got " << p;
      throw Error(ErrorKind::DomainError, os.str());
    }
  }

  [[nodiscard]] constexpr double p() const noexcept { return p_; }
  [[nodiscard]] constexpr double q() const noexcept { return q_; }
  [[nodiscard]] constexpr bool is_two() const noexcept { return p_ == 2.0; }

 private:
  double p_ = 2.0;
  double q_ = 2.0;
};

enum class Branch { Plus, Minus };

inline std::string_view to_string(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

/// |x|^p. Non-integer powers go through exp(p log|x|); p = 2 is a plain square.
inline double abs_pow(double x, double p) {
  if (x == 0.0) return 0.0;
  if (p == 2.0) return x * x;
  return std::exp(p * std::log(std::abs(x)));
}

/// Point of the Carleson domain: mean of phi, mean of |phi|^p, capacity density.
struct CetPoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;
};

/// Point of the John-Nirenberg domain: mean of phi and of phi^2.
struct JniPoint {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// BMO-type bound eps together with the family parameter delta, eps <= delta < 1.
class JniParams {
 public:
  JniParams(double eps, double delta) : eps_(eps), delta_(delta) {
    if (!(eps > 0.0 && eps < 1.0) || !(delta >= eps && delta < 1.0)) {
      std::ostringstream os;
      os << "JNI parameters require 0 < eps <= delta < 1, got eps=" << eps << " delta=" << delta;
      throw Error(ErrorKind::DomainError, os.str());
    }
  }
  explicit JniParams(double eps) : JniParams(eps, eps) {}

  [[nodiscard]] double eps() const noexcept { return eps_; }
  [[nodiscard]] double delta() const noexcept { return delta_; }

 private:
  double eps_;
  double delta_;
};

inline bool in_domain(const CetPoint& pt, const Window& w, const Exponent& exp = Exponent{}) {
  if (!(std::isfinite(pt.x1) && std::isfinite(pt.x2) && std::isfinite(pt.x3))) return false;
  const double side = exp.is_two() ? pt.x1 * pt.x1 : abs_pow(pt.x1, exp.p());
  return side <= pt.x2 + kDomainSlack && pt.x3 >= w.m() - kDomainSlack &&
         pt.x3 <= w.M() + kDomainSlack;
}

inline bool in_domain(const JniPoint& pt, double eps) {
  if (!(std::isfinite(pt.x1) && std::isfinite(pt.x2))) return false;
  const double gap = pt.x2 - pt.x1 * pt.x1;
  return gap >= -kDomainSlack && gap <= eps * eps + kDomainSlack;
}

inline void require_domain(const CetPoint& pt, const Window& w, const Exponent& exp = Exponent{}) {
  if (!in_domain(pt, w, exp)) {
    std::ostringstream os;
    os << "point (" << pt.x1 << ", " << pt.x2 << ", " << pt.x3 << ") is outside the domain for window ("
       << w.m() << ", " << w.M() << ") and p=" << exp.p();
    throw Error(ErrorKind::DomainError, os.str());
  }
}

/// s = |x1|^p / x2, clamped into [0, 1] to absorb the domain slack.
inline double ratio_s(const CetPoint& pt, const Exponent& exp = Exponent{}) {
  if (pt.x2 == 0.0) {
    throw Error(ErrorKind::DegeneratePoint, "x2 = 0 leaves the ratio |x1|^p/x2 undefined");
  }
  const double side = exp.is_two() ? pt.x1 * pt.x1 : abs_pow(pt.x1, exp.p());
  return std::clamp(side / pt.x2, 0.0, 1.0);
}

/// Capacity level above which the minimizing (negative) branch exists:
/// M - (M - m) s^(1/(p-1)).
inline double min_threshold(const CetPoint& pt, const Window& w, const Exponent& exp = Exponent{}) {
  const double s = ratio_s(pt, exp);
  const double power = exp.is_two() ? s : std::pow(s, 1.0 / (exp.p() - 1.0));
  return w.M() - w.width() * power;
}

/// Affine map of the capacity coordinate onto the unit window (0, 1).
inline CetPoint rescale_to_unit(const CetPoint& pt, const Window& w) {
  return {pt.x1, pt.x2, (pt.x3 - w.m()) / w.width()};
}

inline CetPoint rescale_from_unit(const CetPoint& pt, const Window& w) {
  return {pt.x1, pt.x2, w.m() + pt.x3 * w.width()};
}

/// Relative capacity theta = (x3 - m)/(M - m) in [0, 1].
inline double capacity_fraction(double x3, const Window& w) {
  return std::clamp((x3 - w.m()) / w.width(), 0.0, 1.0);
}

}  // namespace carlbell
