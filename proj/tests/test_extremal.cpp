#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "carlbell/cet_bellman.hpp"
#include "carlbell/extremal.hpp"

using namespace carlbell;

namespace {

// Smaller root of (s + 2b) c^2 - 2(1 + 2b) c + (1 + 2b) = 0 by the textbook formula.
long double quadratic_c(long double s, int n) {
  const long double b = std::ldexp(1.0L, -n);
  const long double qa = s + 2 * b;
  const long double qb = -2 * (1 + 2 * b);
  const long double qc = 1 + 2 * b;
  return (-qb - std::sqrt(qb * qb - 4 * qa * qc)) / (2 * qa);
}

// Self-similarity of the weighted sum: S = b x1^2 + S (d^2/2 + 1/2 - b).
long double self_similar_sum(long double x1, long double s, int n) {
  const long double b = std::ldexp(1.0L, -n);
  const long double c = quadratic_c(s, n);
  const long double d = 1 + 2 * b * (1 - c);
  return b * x1 * x1 / (0.5L + b - d * d / 2);
}

double upper_target(double x1, double x2) {
  const double r = std::sqrt(x2) + std::sqrt(x2 - x1 * x1);
  return r * r;
}

}  // namespace

TEST(DyadicNode, Structure) {
  const DyadicNode n{3, 5};
  EXPECT_EQ(n.left(), (DyadicNode{4, 10}));
  EXPECT_EQ(n.right(), (DyadicNode{4, 11}));
  EXPECT_EQ(n.left().parent(), n);
  EXPECT_DOUBLE_EQ(n.measure(), 0.125);
}

TEST(SolveCnDn, SpecExamples) {
  for (int n : {1, 5, 30}) {
    const auto cd = solve_cn_dn(1.0, n);
    EXPECT_EQ(cd.c, 1.0);
    EXPECT_EQ(cd.d, 1.0);
  }
  EXPECT_NEAR(solve_cn_dn(0.5, 60).c, 2 - std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(static_cast<double>(quadratic_c(0.5, 16)), 0.58578, 1e-4);
  EXPECT_NEAR(solve_cn_dn(0.5, 16).c, static_cast<double>(quadratic_c(0.5, 16)), 1e-15);
}

TEST(SolveCnDn, MomentSystemHolds) {
  for (double s : {0.01, 0.3, 0.5, 0.9, 0.999}) {
    for (int n = 1; n <= 40; n += 3) {
      const auto cd = solve_cn_dn(s, n);
      const double b = std::ldexp(1.0, -n);
      EXPECT_NEAR(b * cd.c + (0.5 - b) + cd.d / 2, 1.0, 1e-12);
      EXPECT_NEAR(b * cd.c * cd.c * s + (0.5 - b) + cd.d * cd.d / 2, 1.0, 1e-12);
      EXPECT_NEAR(cd.c, static_cast<double>(quadratic_c(s, n)), 1e-12);
      const double limit = (1 - std::sqrt(1 - s)) / s;
      EXPECT_GE(cd.c, limit - 1e-15);
    }
  }
  EXPECT_THROW((void)solve_cn_dn(0.5, 0), Error);
}

TEST(BuildExtremal, ConstantWhenOnSide) {
  const auto ext = build_extremal(1, 1, 4, 12);
  const auto [phi, alpha] = ext.materialize();
  for (double v : phi.values) EXPECT_EQ(v, 1.0);
  EXPECT_TRUE(alpha.packing_ok());
}

TEST(BuildExtremal, SpecMomentsAtDepth32) {
  const auto sum = build_extremal(1, 2, 8, 32).summary();
  EXPECT_LE(std::abs(sum.mean - 1), 1e-3);
  EXPECT_LE(std::abs(sum.second_moment - 2), 1e-2);
}

TEST(BuildExtremal, Errors) {
  auto kind = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Nonconvergence;
  };
  EXPECT_EQ(kind([] { (void)build_extremal(1, 2, 8, 15); }), ErrorKind::DepthTooSmall);
  EXPECT_EQ(kind([] { (void)build_extremal(0, 2, 8, 16); }), ErrorKind::DomainError);
  EXPECT_EQ(kind([] { (void)build_extremal(2, 1, 8, 16); }), ErrorKind::DomainError);
  EXPECT_EQ(kind([] { (void)build_extremal(1, 2, 2, 30).materialize(); }), ErrorKind::DomainError);
}

TEST(BuildExtremal, ExactSummaryMatchesSelfSimilarity) {
  for (double x1 : {0.3, 1.0, 1.3}) {
    const double x2 = 2.0;
    for (int n : {2, 8, 16}) {
      const auto sum = build_extremal(x1, x2, n, 2 * n + 10).summary(Tail::Exact);
      const double want = static_cast<double>(self_similar_sum(x1, x1 * x1 / x2, n));
      EXPECT_NEAR(sum.carleson_sum, want, 1e-11 * want);
      EXPECT_NEAR(sum.mean, x1, 1e-12);
      EXPECT_NEAR(sum.second_moment, x2, 1e-12 * x2);
      EXPECT_NEAR(sum.total_alpha, 1.0, 1e-12);
      EXPECT_LE(sum.carleson_sum, upper_target(x1, x2) + 1e-9);
    }
  }
}

TEST(BuildExtremal, TruncatedSummaryMatchesExplicitTree) {
  for (int n : {1, 2, 3, 5}) {
    for (int depth : {2 * n, 2 * n + 3, 16}) {
      const auto ext = build_extremal(-0.8, 1.1, n, depth);
      const auto [phi, alpha] = ext.materialize();
      const auto sum = ext.summary(Tail::Truncated);
      EXPECT_NEAR(phi.mean(), sum.mean, 1e-12);
      EXPECT_NEAR(phi.second_moment(), sum.second_moment, 1e-12);
      EXPECT_NEAR(alpha.total(), sum.total_alpha, 1e-12);
      EXPECT_NEAR(carleson_sum(phi, alpha), sum.carleson_sum, 1e-12);
      EXPECT_TRUE(alpha.packing_ok());
      EXPECT_LE(ExtremalConstruction::j_image_excess(phi, alpha, ext.plan(), ext.sign()), 1e-12);
    }
  }
}

TEST(BuildExtremal, TreeStatsAgreeWithExplicitAverages) {
  const auto ext = build_extremal(0.9, 1.5, 3, 20);
  const auto stats = ext.tree_stats(8);
  const auto [phi, alpha] = ext.materialize(20);
  for (int depth = 0; depth <= 8; ++depth) {
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << depth); ++i) {
      const DyadicNode node{depth, i};
      EXPECT_NEAR(stats.mean[TreeStats::slot(node)], phi.average(node), 1e-12);
      const auto it = alpha.alpha.find(node);
      const double w = it == alpha.alpha.end() ? 0.0 : it->second.value() / node.measure();
      EXPECT_NEAR(stats.weight[TreeStats::slot(node)], w, 1e-15);
    }
  }
}

TEST(CarlesonSum, SpecExamples) {
  StepFunction one{4, std::vector<double>(16, 1.0)};
  CarlesonWeights alpha;
  alpha.alpha[{0, 0}] = {1, 0};
  EXPECT_DOUBLE_EQ(carleson_sum(one, alpha), 1.0);

  const auto t0 = std::chrono::steady_clock::now();
  const double attained = build_extremal(1, 2, 16, 48).summary().carleson_sum;
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 10.0);
  EXPECT_GE(attained, 5.71);
  EXPECT_LE(attained, 5.8284272);
  EXPECT_NEAR(build_extremal(1, 1, 8, 24).summary().carleson_sum, 1.0, 1e-12);
}

TEST(CarlesonSum, NondecreasingInScale) {
  for (auto [x1, x2] : {std::pair{1.0, 2.0}, std::pair{0.5, 1.0}}) {
    double prev = 0.0;
    for (int n : {8, 12, 16}) {
      const double v = build_extremal(x1, x2, n, 48).summary().carleson_sum;
      EXPECT_GE(v, prev - 1e-9);
      prev = v;
    }
    EXPECT_GE(prev, 0.98 * upper_target(x1, x2));
  }
}

TEST(CarlesonWeights, PackingDetectsOverflow) {
  CarlesonWeights alpha;
  alpha.alpha[{1, 0}] = {1, 2};
  alpha.alpha[{2, 0}] = {1, 3};
  alpha.alpha[{3, 1}] = {1, 3};
  EXPECT_TRUE(alpha.packing_ok());  // every node exactly at or below its measure
  alpha.alpha[{3, 1}] = {3, 4};
  EXPECT_FALSE(alpha.packing_ok());
}

TEST(GreensGap, ConstantIsExactlyZero) {
  const auto f = TreeFunction::filled(12, 3.25);
  EXPECT_EQ(greens_gap(f, f.leaves()), 0.0);
}

TEST(GreensGap, GeometricTree) {
  const int depth = 20;
  TreeFunction f{depth, std::vector<double>((std::size_t{2} << depth) - 1)};
  for (int k = 0; k <= depth; ++k) {
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << k); ++i) f.at({k, i}) = std::ldexp(1.0, -k);
  }
  EXPECT_LE(std::abs(greens_gap(f, f.leaves())), 1e-12);
  // Boundary values below the leaves only increase the gap.
  std::vector<double> lower(f.leaves().size(), 0.0);
  EXPECT_NEAR(greens_gap(f, lower), std::ldexp(1.0, -depth), 1e-15);
}

TEST(GreensGap, RejectsSubharmonic) {
  auto f = TreeFunction::filled(3, 1.0);
  f.at({0, 0}) = 0.5;
  try {
    (void)greens_gap(f, f.leaves());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotSuperharmonic);
  }
}

TEST(GreensGap, ProofChainOnConstruction) {
  for (int n : {2, 4, 6}) {
    const auto ext = build_extremal(1, 2, n, 2 * n);
    const auto stats = ext.tree_stats(12);
    const auto f = bellman_tree(stats);
    EXPECT_LE(std::abs(greens_gap(f, f.leaves())), 1e-12 * f.at({0, 0}));
    for (int depth = 0; depth < stats.depth; ++depth) {
      for (std::uint64_t i = 0; i < (std::uint64_t{1} << depth); ++i) {
        const DyadicNode node{depth, i};
        const std::size_t k = TreeStats::slot(node);
        EXPECT_GE(f.laplacian(node), stats.mean[k] * stats.mean[k] * stats.weight[k] - 1e-9);
      }
    }
  }
}

TEST(MixAlongLine, UpperLidReducesToConstruction) {
  const Window w = Window::unit();
  const auto mix = mix_along_line({1, 2, 1}, w, 8, 4);
  EXPECT_EQ(mix.copies, 16u);
  ASSERT_TRUE(mix.upper.has_value());
  const double direct = build_extremal(1, 2, 8, 16).summary().carleson_sum;
  EXPECT_NEAR(mix.functional(), direct, 1e-12 * direct);
}

TEST(MixAlongLine, LowerAnchorIsConstant) {
  const Window w(0.5, 1.5);
  const auto mix = mix_along_line({0.7, 0.49, 0.5}, w, 8, 4);
  EXPECT_EQ(mix.copies, 0u);
  EXPECT_FALSE(mix.upper.has_value());
  EXPECT_NEAR(mix.functional(), 0.5 * 0.49, 1e-15);
  const auto [phi, alpha] = mix.materialize(6);
  for (double v : phi.values) EXPECT_DOUBLE_EQ(v, 0.7);
  EXPECT_TRUE(alpha.alpha.empty());
}

TEST(MixAlongLine, InteriorPointApproachesBellman) {
  const Window w = Window::unit();
  const CetPoint pt{1, 2, 0.5};
  const auto mix = mix_along_line(pt, w, 12, 10);
  const double b = eval_bmax(pt, w).value;
  EXPECT_LE(mix.functional(), b + 1e-9);
  EXPECT_GE(mix.functional(), 0.97 * b);
  EXPECT_NEAR(mix.capacity(), pt.x3, std::ldexp(1.0, -10));
  const auto u = mix.unit_summary();
  EXPECT_NEAR(u.mean, pt.x1, 1e-3);
  EXPECT_NEAR(u.second_moment, pt.x2, 1e-3 * pt.x2);
}

TEST(MixAlongLine, Errors) {
  EXPECT_THROW((void)mix_along_line({0, 1, 0.5}, Window::unit(), 8, 4), Error);
  EXPECT_THROW((void)mix_along_line({0.5, 1, 0.0}, Window::unit(), 8, 4), Error);
  EXPECT_THROW((void)mix_along_line({0.5, 1, 0.5}, Window::unit(), 8, 61), Error);
}
