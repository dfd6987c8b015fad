#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "carlbell/lp_bellman.hpp"
#include "carlbell/sampling.hpp"

using namespace carlbell;

namespace {

// The right-hand side exactly as written in terms of a and |a|^p.
double rhs_a_form(double a, double x3, double m, double M, double p) {
  const double q = p / (p - 1.0);
  const double ap = std::pow(std::abs(a), p);
  const double first = (a - q * (M - x3) * ap) / (a - q * (M - m) * ap);
  return std::pow(std::abs(first), p) * (a - p * q * (M - m) * ap) / (a - p * q * (M - x3) * ap);
}

// 10^6-point grid scan for the first sign change of f, then bisection.
double grid_bisect(const std::function<double(double)>& f, double lo, double hi) {
  constexpr int kGrid = 1'000'000;
  double prev_x = lo;
  double prev_f = f(lo);
  for (int i = 1; i <= kGrid; ++i) {
    const double x = lo + (hi - lo) * i / kGrid;
    const double fx = f(x);
    if ((prev_f > 0) != (fx > 0)) {
      double a = prev_x;
      double b = x;
      for (int k = 0; k < 100; ++k) {
        const double mid = 0.5 * (a + b);
        ((f(mid) > 0) == (prev_f > 0) ? a : b) = mid;
      }
      return 0.5 * (a + b);
    }
    prev_x = x;
    prev_f = fx;
  }
  ADD_FAILURE() << "no sign change";
  return NAN;
}

}  // namespace

TEST(LpRhs, SpecExamples) {
  const Window w = Window::unit();
  const Exponent p3(3.0);
  EXPECT_DOUBLE_EQ(lp_rhs(0.0, 0.4, w, p3), 1.0);
  EXPECT_NEAR(lp_rhs(lp_bound(w, p3), 0.6, w, p3), 0.0, 1e-14);
  EXPECT_NEAR(lp_rhs((std::sqrt(2.0) - 1) / 2, 1.0, w, Exponent(2.0)), 0.5, 1e-15);
}

TEST(LpRhs, MatchesAFormAwayFromZero) {
  const Window w(0.5, 2.0);
  for (double p : {1.5, 3.0, 5.0}) {
    const Exponent e(p);
    for (double t : {-2.0, -0.3, 0.2, 0.7, 0.95}) {
      const double a = t * lp_bound(w, e);
      for (double x3 : {0.7, 1.4, 2.0}) {
        const double want = rhs_a_form(a, x3, w.m(), w.M(), p);
        EXPECT_NEAR(lp_rhs(a, x3, w, e), want, 1e-12 * std::max(1.0, std::abs(want)));
      }
    }
  }
}

TEST(LpRhs, MonotoneOnBrackets) {
  const Window w = Window::unit();
  const Exponent e(3.0);
  const double x3 = 0.6;
  double prev = 1.0;
  for (int i = 1; i < 500; ++i) {
    const double v = lp_rhs(lp_bound(w, e) * i / 500.0, x3, w, e);
    EXPECT_LT(v, prev);
    prev = v;
  }
  prev = 1.0;
  const double floor = std::pow(1.0 - x3, 2.0);
  for (int i = 1; i < 500; ++i) {
    const double v = lp_rhs(-0.05 * i, x3, w, e);
    EXPECT_LT(v, prev);
    EXPECT_GT(v, floor);
    prev = v;
  }
}

TEST(SolveLp, SpecExamples) {
  const Window w = Window::unit();
  EXPECT_EQ(solve_lp(1.0, 0.3, w, Exponent(3.0), Branch::Plus).a, 0.0);
  EXPECT_NEAR(solve_lp(0.5, 1.0, w, Exponent(2.0), Branch::Plus).a, (std::sqrt(2.0) - 1) / 2, 1e-14);
}

TEST(SolveLp, CubicRootAgainstGridOracle) {
  const Window w = Window::unit();
  const Exponent e(3.0);
  const double want = grid_bisect([](double a) { return rhs_a_form(a, 1.0, 0.0, 1.0, 3.0) - 0.5; }, 1e-12,
                                  lp_bound(w, e) * (1 - 1e-12));
  const auto got = solve_lp(0.5, 1.0, w, e, Branch::Plus);
  EXPECT_NEAR(got.a, want, 1e-11);
  EXPECT_LE(got.residual, 1e-11);
}

TEST(SolveLp, NegativeRootAgainstGridOracle) {
  const Window w = Window::unit();
  const Exponent e(3.0);
  const double x3 = 0.5;
  const double s = 0.6;  // threshold (1 - x3)^2 = 0.25
  const double want = grid_bisect([&](double a) { return rhs_a_form(a, x3, 0.0, 1.0, 3.0) - s; }, -20.0, -1e-9);
  EXPECT_NEAR(solve_lp(s, x3, w, e, Branch::Minus).a, want, 1e-10 * std::abs(want));
  EXPECT_THROW((void)solve_lp(0.25, x3, w, e, Branch::Minus), Error);
}

TEST(EvalLp, SpecExamples) {
  const Window w = Window::unit();
  EXPECT_NEAR(eval_lp({1, 2, 1}, w, Exponent(2.0), Branch::Plus).value, 3 + 2 * std::sqrt(2.0), 1e-13);
  for (double p : {1.5, 3.0, 7.0}) {
    const double x1 = -0.8;
    const double x2 = std::pow(0.8, p);
    EXPECT_NEAR(eval_lp({x1, x2, 0.35}, w, Exponent(p), Branch::Plus).value, x2 * 0.35, 1e-13);
  }
}

TEST(EvalLp, CubicValueFromOracleRoot) {
  const double p = 3.0;
  const double q = 1.5;
  const double s = 0.5;  // (1, 2, 1): |x1|^3 / x2
  const double a = grid_bisect([&](double t) { return rhs_a_form(t, 1.0, 0.0, 1.0, p) - s; }, 1e-12,
                               std::sqrt(1.0 / (p * q)) * (1 - 1e-12));
  const double g = a * std::abs(a);
  const double want = 1.0 * 2.0 / std::pow(std::abs(1 - q * g), p);
  EXPECT_NEAR(eval_lp({1, 2, 1}, Window::unit(), Exponent(p), Branch::Plus).value, want, 1e-10 * want);
}

TEST(EvalLp, LowerLidLimit) {
  const Window w(0.5, 1.5);
  const Exponent e(3.0);
  const CetPoint lid{0.7, 1.1, 0.5};
  const double v = eval_lp(lid, w, e, Branch::Plus).value;
  EXPECT_NEAR(v, std::pow(1.5, 3.0) * (1.1 - std::pow(0.7, 3.0)) + 0.5 * 1.1, 1e-14);
  EXPECT_NEAR(eval_lp({0.7, 1.1, 0.5 + 1e-6}, w, e, Branch::Plus).value, v, 1e-4);
}

TEST(EvalLp, ReducesToQuadraticCase) {
  Sampler rng(29);
  const Exponent two(2.0);
  for (int i = 0; i < 1000; ++i) {
    const Window w = rng.window();
    const CetPoint pt = rng.point(w);
    for (Branch b : {Branch::Plus, Branch::Minus}) {
      const double want = eval_bellman(pt, w, b).value;
      EXPECT_NEAR(eval_lp(pt, w, two, b).value, want, 1e-9 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(EvalLp, Homogeneity) {
  Sampler rng(31);
  for (int i = 0; i < 300; ++i) {
    const Exponent e(rng.uniform(1.3, 6.0));
    const Window w = rng.window();
    const CetPoint pt = rng.point(w, 0.01, e);
    const double t = rng.uniform(0.2, 3.0);
    const double tp = std::pow(t, e.p());
    for (Branch b : {Branch::Plus, Branch::Minus}) {
      const double base = eval_lp(pt, w, e, b).value;
      const double scaled = eval_lp({t * pt.x1, tp * pt.x2, pt.x3}, w, e, b).value;
      EXPECT_NEAR(scaled, tp * base, 1e-8 * std::abs(tp * base));
    }
  }
}

TEST(EvalLp, UpperLidDerivative) {
  const Window w = Window::unit();
  for (double p : {1.5, 3.0, 4.0}) {
    const Exponent e(p);
    const CetPoint pt{0.6, 1.0, 1.0};
    const double h = 1e-4;
    auto b = [&](double x3) { return eval_lp({pt.x1, pt.x2, x3}, w, e, Branch::Plus).value; };
    const double d = (3 * b(1.0) - 4 * b(1.0 - h) + b(1.0 - 2 * h)) / (2 * h);
    const double want = std::pow(0.6, p);
    EXPECT_NEAR(d, want, 1e-5 * want);
  }
}
