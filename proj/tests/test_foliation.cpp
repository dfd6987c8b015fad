#include <gtest/gtest.h>

#include <cmath>

#include "carlbell/cet_bellman.hpp"
#include "carlbell/foliation.hpp"
#include "carlbell/sampling.hpp"

using namespace carlbell;

TEST(ExtremalLinePoint, SpecExamples) {
  const Window w = Window::unit();
  const auto side = extremal_line_point(0.0, 0.7, 0.4, w);
  EXPECT_DOUBLE_EQ(side.x1, 0.7);
  EXPECT_DOUBLE_EQ(side.x2, 0.49);
  const auto anchor = extremal_line_point(0.2, 0.7, 0.0, w);
  EXPECT_NEAR(anchor.x1, 0.7, 1e-15);
  EXPECT_NEAR(anchor.x2, 0.49, 1e-15);
  const auto top = extremal_line_point(0.125, 1.0, 1.0, w);
  EXPECT_NEAR(top.x1, 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(top.x2, 2.0, 1e-15);
  EXPECT_THROW((void)extremal_line_point(0.25, 1.0, 0.5, w), Error);
}

TEST(UpperTrace, SpecExamples) {
  const Window w = Window::unit();
  const auto z0 = upper_trace(0.0, 1.5, w);
  EXPECT_EQ(z0.x1, 1.5);
  EXPECT_EQ(z0.x2, 2.25);
  const auto z = upper_trace(0.125, 1.0, w);
  EXPECT_NEAR(z.x1, 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(z.x2, 2.0, 1e-15);
  EXPECT_NEAR(hyperbola_residual(z, 1.0), 0.0, 1e-15);
}

TEST(UpperTrace, PlusFanSpansOneToTwo) {
  const Window w(1.0, 3.0);
  const double xi1 = 0.8;
  double prev = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto z = upper_trace(plus_bound(w) * i / 1000.0, xi1, w);
    EXPECT_GE(z.x1, xi1);
    EXPECT_LT(z.x1, 2 * xi1);
    EXPECT_GT(z.x1, prev);
    EXPECT_LE(std::abs(hyperbola_residual(z, xi1)), 1e-12 * z.x2);
    EXPECT_GE(z.x2, z.x1 * z.x1);
    prev = z.x1;
  }
}

TEST(RecoverParameters, SpecExamples) {
  const Window w = Window::unit();
  const auto f = recover_parameters({1, 2, 1}, w, Branch::Plus);
  EXPECT_NEAR(f.a, (std::sqrt(2.0) - 1) / 2, 1e-14);
  EXPECT_NEAR(f.xi1, 2 - std::sqrt(2.0), 1e-14);
  const auto side = recover_parameters({0.6, 0.36, 0.3}, w, Branch::Plus);
  EXPECT_EQ(side.a, 0.0);
  EXPECT_NEAR(side.xi1, 0.6, 1e-15);
}

TEST(RecoverParameters, FrameInvariants) {
  Sampler rng(41);
  for (int i = 0; i < 300; ++i) {
    const Window w = rng.window();
    const CetPoint pt = rng.point(w, 0.02);
    const auto f = recover_parameters(pt, w, Branch::Plus);
    EXPECT_DOUBLE_EQ(f.A, f.a * f.a);
    EXPECT_DOUBLE_EQ(f.D, f.a / 2 - w.M() * f.a * f.a);
    EXPECT_NEAR(f.t3, f.A * f.t1 * f.t1, 1e-12 * std::abs(f.t3) + 1e-300);
    EXPECT_GE(f.zeta2, f.zeta1 * f.zeta1 * (1 - 1e-12));
    const auto back = extremal_line_point(f, pt.x3);
    EXPECT_NEAR(back.x1, pt.x1, 1e-10 * std::max(1.0, std::abs(pt.x1)));
    EXPECT_NEAR(back.x2, pt.x2, 1e-10 * std::max(1.0, pt.x2));
  }
}

TEST(RecoverParameters, AffineRepresentationAlongLine) {
  Sampler rng(43);
  for (int i = 0; i < 200; ++i) {
    const Window w = rng.window();
    const auto f = recover_parameters(rng.interior_point(w), w, Branch::Plus);
    for (double t : {0.0, 0.3, 0.5, 1.0}) {
      const double x3 = w.m() + t * w.width();
      const auto p = extremal_line_point(f, x3);
      const CetPoint x{p.x1, p.x2, x3};
      const double b = eval_bmax(x, w).value;
      EXPECT_NEAR(f.affine_value(x), b, 1e-8 * std::max(1.0, std::abs(b)));
    }
  }
}

TEST(RecoverParameters, MinusLinesAreAffineToo) {
  const Window w = Window::unit();
  const CetPoint pt{1.0, 1.4, 0.9};
  const auto f = recover_parameters(pt, w, Branch::Minus);
  EXPECT_LT(f.a, 0.0);
  auto b = [&](double x3) {
    const auto p = extremal_line_point(f, x3);
    return eval_bmin({p.x1, p.x2, x3}, w).value;
  };
  // Stay above the threshold along the line.
  const double lo = 0.8;
  const double dd = b(lo) - 2 * b(0.9) + b(1.0);
  EXPECT_LE(std::abs(dd), 1e-8 * std::abs(b(0.9)));
}

TEST(RecoverParameters, KernelDirectionIsTheLine) {
  // The line through (xi1, xi1^2, m) and (zeta1, zeta2, M) has d2/d1 = 2 zeta2 / zeta1.
  Sampler rng(47);
  for (int i = 0; i < 200; ++i) {
    const Window w = rng.window();
    const CetPoint pt = rng.interior_point(w);
    if (std::abs(pt.x1) < 1e-3) continue;
    const auto f = recover_parameters(pt, w, Branch::Plus);
    const Vec3 d = kernel_direction(pt, w);
    EXPECT_NEAR(d(1) / d(0), 2 * f.zeta2 / f.zeta1, 1e-9 * std::abs(2 * f.zeta2 / f.zeta1));
    const double slope = (f.zeta1 - f.xi1) / w.width();
    EXPECT_NEAR(d(0), slope, 1e-9 * std::max(1.0, std::abs(slope)));
  }
}

TEST(TangencyGap, SpecExamples) {
  const Window w = Window::unit();
  EXPECT_EQ(tangency_gap(0.0, 5.0, w), 0.0);
  EXPECT_LE(tangency_gap(0.1, -3.0, w), 1e-12);
  EXPECT_THROW((void)tangency_gap(0.25, 1.0, w), Error);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    for (int j = -20; j <= 20; ++j) worst = std::max(worst, tangency_gap(0.2499 * i / 50.0, 0.5 * j, w));
  }
  EXPECT_LE(worst, 1e-10);
}
