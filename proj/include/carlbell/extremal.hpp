#pragma once

// Near-extremal test functions phi_n and Carleson weights alpha^n on the
// dyadic tree, built self-similarly: on [0,1] the function equals c_n x1 on
// J = [0, 2^-n], repeats itself on I_k = [2^-k, 2^-k+1] for k = 2..n and
// repeats itself scaled by d_n on I_1 = [1/2, 1]. Every image of [0,1] (a
// "copy") carries the weight |image of J|.
//
// The number of copies grows like 2^depth, so nothing here enumerates them.
// Statistics are computed per copy by a recursion over the remaining depth;
// explicit arrays are produced only for shallow depths.

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <utility>
#include <vector>

#include "carlbell/cet_bellman.hpp"
#include "carlbell/domain.hpp"
#include "carlbell/error.hpp"
#include "carlbell/foliation.hpp"

namespace carlbell {

/// Deepest tree that is ever stored explicitly (2^22 leaves).
inline constexpr int kMaxMaterializeDepth = 22;

/// Compensated (Neumaier) accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct DyadicNode {
  int depth = 0;
  std::uint64_t index = 0;

  [[nodiscard]] double measure() const { return std::ldexp(1.0, -depth); }
  [[nodiscard]] DyadicNode left() const { return {depth + 1, 2 * index}; }
  [[nodiscard]] DyadicNode right() const { return {depth + 1, 2 * index + 1}; }
  [[nodiscard]] DyadicNode parent() const { return {depth - 1, index / 2}; }

  auto operator<=>(const DyadicNode&) const = default;
};

struct DyadicNodeHash {
  std::size_t operator()(const DyadicNode& n) const noexcept {
    return std::hash<std::uint64_t>{}(n.index * 131u + static_cast<std::uint64_t>(n.depth));
  }
};

/// numerator * 2^-exponent.
struct DyadicRational {
  std::uint64_t numerator = 0;
  int exponent = 0;

  [[nodiscard]] double value() const { return std::ldexp(static_cast<double>(numerator), -exponent); }
};

/// Piecewise-constant function on the 2^depth leaves of [0, 1].
struct StepFunction {
  int depth = 0;
  std::vector<double> values;

  [[nodiscard]] double average(const DyadicNode& node) const {
    const int span_log = depth - node.depth;
    const std::uint64_t first = node.index << span_log;
    const std::uint64_t count = std::uint64_t{1} << span_log;
    CompensatedSum acc;
    for (std::uint64_t i = 0; i < count; ++i) acc.add(values[first + i]);
    return acc.value() / static_cast<double>(count);
  }

  [[nodiscard]] double mean() const { return average({0, 0}); }

  [[nodiscard]] double second_moment() const {
    CompensatedSum acc;
    for (double v : values) acc.add(v * v);
    return acc.value() / static_cast<double>(values.size());
  }
};

/// Sparse nonnegative weights on dyadic nodes.
struct CarlesonWeights {
  std::map<DyadicNode, DyadicRational> alpha;

  [[nodiscard]] double total() const {
    CompensatedSum acc;
    for (const auto& [node, w] : alpha) acc.add(w.value());
    return acc.value();
  }

  /// Exact check of sum_{l subset I} alpha_l <= |I| for every node I.
  [[nodiscard]] bool packing_ok() const {
    __extension__ typedef unsigned __int128 u128;
    if (alpha.empty()) return true;
    int finest = 0;
    for (const auto& [node, w] : alpha) finest = std::max({finest, w.exponent, node.depth});
    if (finest > 120) throw Error(ErrorKind::DomainError, "weights too fine for exact packing arithmetic");
    // Bottom-up: a node's subtree total is its own weight plus its children's totals.
    int deepest = 0;
    for (const auto& [node, w] : alpha) deepest = std::max(deepest, node.depth);
    std::vector<std::unordered_map<std::uint64_t, u128>> level(static_cast<std::size_t>(deepest) + 1);
    for (const auto& [node, w] : alpha) {
      if (w.exponent < 0) return false;
      level[static_cast<std::size_t>(node.depth)][node.index] += static_cast<u128>(w.numerator) << (finest - w.exponent);
    }
    for (int d = deepest; d >= 0; --d) {
      const u128 cap = static_cast<u128>(1) << (finest - d);
      for (const auto& [index, units] : level[static_cast<std::size_t>(d)]) {
        if (units > cap) return false;
        if (d > 0) level[static_cast<std::size_t>(d - 1)][index / 2] += units;
      }
      level[static_cast<std::size_t>(d)].clear();
    }
    return true;
  }
};

/// sum over weighted nodes of <phi>_I^2 alpha_I, with exact dyadic averages.
inline double carleson_sum(const StepFunction& phi, const CarlesonWeights& alpha) {
  std::vector<long double> prefix(phi.values.size() + 1, 0.0L);
  for (std::size_t i = 0; i < phi.values.size(); ++i) prefix[i + 1] = prefix[i] + phi.values[i];
  CompensatedSum acc;
  for (const auto& [node, w] : alpha.alpha) {
    if (node.depth > phi.depth) throw Error(ErrorKind::DomainError, "weight below the resolution of the step function");
    const int span_log = phi.depth - node.depth;
    const std::uint64_t first = node.index << span_log;
    const std::uint64_t count = std::uint64_t{1} << span_log;
    const double avg = static_cast<double>((prefix[first + count] - prefix[first]) / static_cast<long double>(count));
    acc.add(avg * avg * w.value());
  }
  return acc.value();
}

// ---------------------------------------------------------------------------
// Moment system for (c_n, d_n)
// ---------------------------------------------------------------------------

struct ScaleConstants {
  double c = 1.0;  // value of phi_n on J, relative to x1
  double d = 1.0;  // scale of the copy on I_1
};

/// Solves s c^2 - 2c + 1 + 2 beta (1 - c)^2 = 0 (beta = 2^-n) on the root that
/// tends to (1 - sqrt(1 - s))/s, and d = 1 + 2 beta (1 - c).
inline ScaleConstants solve_cn_dn(double s, int n) {
  if (!(s > 0.0 && s <= 1.0)) {
    std::ostringstream os;
    os << "moment system needs s in (0, 1], got " << s;
    throw Error(ErrorKind::DomainError, os.str());
  }
  if (n < 1 || n > 60) throw Error(ErrorKind::DomainError, "construction scale n must lie in [1, 60]");
  const double beta = std::ldexp(1.0, -n);
  const double lead = 1.0 + 2.0 * beta;
  const double disc = lead * (1.0 - s);
  if (disc < 0.0) throw Error(ErrorKind::NoRealRoot, "moment system has no real root");
  const double c = lead / (lead + std::sqrt(disc));
  const double d = 1.0 + 2.0 * beta * (1.0 - c);
  return {c, d};
}

struct ExtremalPlan {
  double x1 = 1.0;  // magnitude; the construction is built for x1 > 0
  double x2 = 1.0;
  int n = 1;
  double c = 1.0;
  double d = 1.0;
  int depth = 2;

  [[nodiscard]] double beta() const { return std::ldexp(1.0, -n); }
  [[nodiscard]] double scale_of(int k) const { return k == 1 ? d : 1.0; }
  /// sum of <phi>^2 alpha over the whole (untruncated) construction.
  [[nodiscard]] double closed_form_sum() const { return x2 / (c * c); }
};

inline ExtremalPlan make_plan(double x1, double x2, int n, int depth) {
  if (depth < 2 * n) {
    std::ostringstream os;
    os << "truncation depth " << depth << " is below 2n = " << 2 * n;
    throw Error(ErrorKind::DepthTooSmall, os.str());
  }
  const double mag = std::abs(x1);
  if (!(mag > 0.0) || !(mag * mag <= x2 * (1.0 + 1e-15))) {
    std::ostringstream os;
    os << "construction needs x1 != 0 and x1^2 <= x2, got x1=" << x1 << " x2=" << x2;
    throw Error(ErrorKind::DomainError, os.str());
  }
  const double s = std::min(1.0, mag * mag / x2);
  const auto cd = solve_cn_dn(s, n);
  return {mag, x2, n, cd.c, cd.d, depth};
}

/// How the part of the construction below the truncation depth is treated.
enum class Tail {
  /// Subtrees below the depth are closed with their exact self-similar
  /// statistics; the result describes the untruncated (phi_n, alpha^n).
  Exact,
  /// phi is replaced by its conditional expectation on depth-D leaves and only
  /// weights on nodes of depth <= D are kept.
  Truncated,
};

struct ExtremalSummary {
  double mean = 0.0;
  double second_moment = 0.0;
  double total_alpha = 0.0;
  double carleson_sum = 0.0;
};

namespace detail {

struct CopyStats {
  double m1 = 0.0;
  double m2 = 0.0;
  double mass = 0.0;
  double csum = 0.0;
};

// Mean of phi over the spine [0, 2^-j] of a unit-scale copy, times 2^-j.
inline double spine_first_moment(const ExtremalPlan& plan, int j) {
  double acc = plan.beta() * plan.c * plan.x1;
  for (int k = j + 1; k <= plan.n; ++k) acc += std::ldexp(1.0, -k) * plan.scale_of(k) * plan.x1;
  return acc;
}

// Per-copy statistics (normalized by the copy's length, scale 1) indexed by
// the remaining depth r = D - depth(copy).
inline std::vector<CopyStats> copy_stats_table(const ExtremalPlan& plan, Tail tail) {
  const int n = plan.n;
  const double beta = plan.beta();
  const double x1 = plan.x1;
  const CopyStats closure{x1, plan.x2, 1.0, plan.closed_form_sum()};
  std::vector<CopyStats> table(static_cast<std::size_t>(plan.depth) + 1);
  for (int r = 0; r <= plan.depth; ++r) {
    CopyStats st;
    st.mass = beta;
    st.csum = beta * x1 * x1;  // the copy's own weight; its average is exact
    if (tail == Tail::Exact || r >= n) {
      st.m1 = beta * plan.c * x1;
      st.m2 = beta * plan.c * plan.c * x1 * x1;
    } else {
      const double len = std::ldexp(1.0, -r);
      const double spine_mean = spine_first_moment(plan, r) / len;
      st.m1 = len * spine_mean;
      st.m2 = len * spine_mean * spine_mean;
    }
    for (int k = 1; k <= n; ++k) {
      const CopyStats* child = nullptr;
      if (r - k >= 0) {
        child = &table[static_cast<std::size_t>(r - k)];
      } else if (tail == Tail::Exact) {
        child = &closure;
      } else {
        continue;  // merged into the spine leaf above
      }
      const double len = std::ldexp(1.0, -k);
      const double sc = plan.scale_of(k);
      st.m1 += len * sc * child->m1;
      st.m2 += len * sc * sc * child->m2;
      st.mass += len * child->mass;
      st.csum += len * sc * sc * child->csum;
    }
    table[static_cast<std::size_t>(r)] = st;
  }
  return table;
}

}  // namespace detail

inline ExtremalSummary summarize(const ExtremalPlan& plan, Tail tail) {
  const auto table = detail::copy_stats_table(plan, tail);
  const auto& root = table.back();
  return {root.m1, root.m2, root.mass, root.csum};
}

/// Per-node data of the full binary tree down to some depth.
struct TreeStats {
  int depth = 0;
  std::vector<double> mean;      // <phi>_I
  std::vector<double> second;    // <phi^2>_I
  std::vector<double> capacity;  // (sum of alpha inside I, I included)/|I|
  std::vector<double> weight;    // alpha_I/|I|

  [[nodiscard]] static std::size_t slot(const DyadicNode& node) {
    return (std::size_t{1} << node.depth) - 1 + node.index;
  }
};

/// A built construction: the plan for |x1| plus the sign of x1.
class ExtremalConstruction {
 public:
  ExtremalConstruction(ExtremalPlan plan, double sign) : plan_(plan), sign_(sign) {}

  [[nodiscard]] const ExtremalPlan& plan() const { return plan_; }
  [[nodiscard]] double sign() const { return sign_; }

  [[nodiscard]] ExtremalSummary summary(Tail tail = Tail::Exact) const {
    auto s = summarize(plan_, tail);
    s.mean *= sign_;
    return s;
  }

  /// Explicit (phi, alpha) truncated at `depth` (Tail::Truncated semantics).
  [[nodiscard]] std::pair<StepFunction, CarlesonWeights> materialize(int depth) const {
    if (depth < 0 || depth > kMaxMaterializeDepth) {
      std::ostringstream os;
      os << "cannot store a tree of depth " << depth << " (limit " << kMaxMaterializeDepth << ")";
      throw Error(ErrorKind::DomainError, os.str());
    }
    StepFunction phi{depth, std::vector<double>(std::size_t{1} << depth, 0.0)};
    CarlesonWeights alpha;
    fill_copy(phi, alpha, {0, 0}, sign_);
    return {std::move(phi), std::move(alpha)};
  }

  [[nodiscard]] std::pair<StepFunction, CarlesonWeights> materialize() const { return materialize(plan_.depth); }

  /// Writes one copy rooted at `node` (scaled by `scale`) into phi and alpha.
  void fill_copy(StepFunction& phi, CarlesonWeights& alpha, DyadicNode node, double scale) const {
    const int n = plan_.n;
    alpha.alpha[node] = {1, node.depth + n};
    const int r = phi.depth - node.depth;
    const std::uint64_t first = node.index << r;
    if (r >= n) {
      const std::uint64_t count = std::uint64_t{1} << (r - n);
      for (std::uint64_t i = 0; i < count; ++i) phi.values[first + i] = scale * plan_.c * plan_.x1;
    } else {
      phi.values[first] = scale * detail::spine_first_moment(plan_, r) / std::ldexp(1.0, -r);
    }
    for (int k = 1; k <= std::min(r, n); ++k) {
      const DyadicNode child{node.depth + k, (node.index << k) + 1};
      fill_copy(phi, alpha, child, scale * plan_.scale_of(k));
    }
  }

  /// Largest excess of phi on the image of J inside a weighted copy over
  /// c_n times the copy's average (sign-normalized). Copies whose J image lies
  /// below the resolution of phi are skipped.
  [[nodiscard]] static double j_image_excess(const StepFunction& phi, const CarlesonWeights& alpha,
                                            const ExtremalPlan& plan, double sign) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& [node, w] : alpha.alpha) {
      if (node.depth + plan.n > phi.depth) continue;
      const double bound = plan.c * sign * phi.average(node);
      const DyadicNode j{node.depth + plan.n, node.index << plan.n};
      const int span_log = phi.depth - j.depth;
      const std::uint64_t first = j.index << span_log;
      for (std::uint64_t i = 0; i < (std::uint64_t{1} << span_log); ++i) {
        worst = std::max(worst, sign * phi.values[first + i] - bound);
      }
    }
    return worst;
  }

  /// Exact node statistics of the untruncated construction down to `depth`.
  [[nodiscard]] TreeStats tree_stats(int depth) const {
    if (depth < 0 || depth > kMaxMaterializeDepth) throw Error(ErrorKind::DomainError, "tree too deep to store");
    TreeStats t;
    t.depth = depth;
    const std::size_t total = (std::size_t{2} << depth) - 1;
    t.mean.resize(total);
    t.second.resize(total);
    t.capacity.resize(total);
    t.weight.resize(total);
    visit(t, {0, 0}, Kind::Copy, sign_, 0, 0.0);
    return t;
  }

 private:
  enum class Kind { Copy, Spine, Flat };

  void visit(TreeStats& t, DyadicNode node, Kind kind, double scale, int level, double flat) const {
    const std::size_t i = TreeStats::slot(node);
    const double x1 = plan_.x1;
    const int n = plan_.n;
    switch (kind) {
      case Kind::Copy:
        t.mean[i] = scale * x1;
        t.second[i] = scale * scale * plan_.x2;
        t.capacity[i] = 1.0;
        t.weight[i] = plan_.beta();
        break;
      case Kind::Spine: {
        const double len = std::ldexp(1.0, -level);
        const double rest = len - plan_.beta();
        t.mean[i] = scale * x1 * (plan_.beta() * plan_.c + rest) / len;
        t.second[i] = scale * scale * (plan_.beta() * plan_.c * plan_.c * x1 * x1 + rest * plan_.x2) / len;
        t.capacity[i] = rest / len;
        t.weight[i] = 0.0;
        break;
      }
      case Kind::Flat:
        t.mean[i] = flat;
        t.second[i] = flat * flat;
        t.capacity[i] = 0.0;
        t.weight[i] = 0.0;
        break;
    }
    if (node.depth == t.depth) return;

    const double jvalue = scale * plan_.c * x1;
    switch (kind) {
      case Kind::Copy:
        if (n == 1) {
          visit(t, node.left(), Kind::Flat, scale, 0, jvalue);
        } else {
          visit(t, node.left(), Kind::Spine, scale, 1, 0.0);
        }
        visit(t, node.right(), Kind::Copy, scale * plan_.d, 0, 0.0);
        break;
      case Kind::Spine:
        if (level + 1 < n) {
          visit(t, node.left(), Kind::Spine, scale, level + 1, 0.0);
        } else {
          visit(t, node.left(), Kind::Flat, scale, 0, jvalue);
        }
        visit(t, node.right(), Kind::Copy, scale, 0, 0.0);
        break;
      case Kind::Flat:
        visit(t, node.left(), Kind::Flat, scale, 0, flat);
        visit(t, node.right(), Kind::Flat, scale, 0, flat);
        break;
    }
  }

  ExtremalPlan plan_;
  double sign_ = 1.0;
};

/// Extremal construction for (x1, x2) at scale n, truncation depth D >= 2n.
/// Negative x1 is handled by flipping the sign of the function.
inline ExtremalConstruction build_extremal(double x1, double x2, int n, int depth) {
  return {make_plan(x1, x2, n, depth), x1 < 0.0 ? -1.0 : 1.0};
}

// ---------------------------------------------------------------------------
// Mixing along an extremal line
// ---------------------------------------------------------------------------

/// Upper-lid extremizer at zeta placed on `copies` of the 2^k cells of depth
/// k, the constant xi1 (no weights) on the rest.
struct MixedConstruction {
  Window window;
  int k = 0;
  std::uint64_t copies = 0;
  double xi1 = 0.0;
  std::optional<ExtremalConstruction> upper;

  [[nodiscard]] double theta() const { return std::ldexp(static_cast<double>(copies), -k); }

  /// Statistics in the unit window, before the m x2 reserve.
  [[nodiscard]] ExtremalSummary unit_summary(Tail tail = Tail::Exact) const {
    const double th = theta();
    ExtremalSummary out;
    out.mean = (1.0 - th) * xi1;
    out.second_moment = (1.0 - th) * xi1 * xi1;
    if (upper && th > 0.0) {
      const auto up = upper->summary(tail);
      out.mean += th * up.mean;
      out.second_moment += th * up.second_moment;
      out.total_alpha = th * up.total_alpha;
      out.carleson_sum = th * up.carleson_sum;
    }
    return out;
  }

  /// Embedding functional with mu = m dx and alpha scaled by M - m:
  /// (M - m) * unit sum + m * <phi^2>.
  [[nodiscard]] double functional(Tail tail = Tail::Exact) const {
    const auto u = unit_summary(tail);
    return window.width() * u.carleson_sum + window.m() * u.second_moment;
  }

  /// Explicit unit-window (phi, alpha) at `depth` >= k, truncated like Tail::Truncated.
  [[nodiscard]] std::pair<StepFunction, CarlesonWeights> materialize(int depth) const {
    if (depth < k || depth > kMaxMaterializeDepth) {
      throw Error(ErrorKind::DomainError, "materialization depth must lie in [k, 22]");
    }
    StepFunction phi{depth, std::vector<double>(std::size_t{1} << depth, xi1)};
    CarlesonWeights alpha;
    for (std::uint64_t i = 0; i < copies; ++i) upper->fill_copy(phi, alpha, {k, i}, upper->sign());
    return {std::move(phi), std::move(alpha)};
  }

  /// Capacity density m + (M - m) * (sum of unit weights).
  [[nodiscard]] double capacity(Tail tail = Tail::Exact) const {
    return window.m() + window.width() * unit_summary(tail).total_alpha;
  }
};

/// `depth` is the overall truncation depth of the mixture (default 2n + k); the
/// copies start at depth k, so depth - k >= 2n is required.
inline MixedConstruction mix_along_line(const CetPoint& pt, const Window& w, int n, int k, int depth = -1) {
  require_domain(pt, w);
  if (k < 0 || k > 60) throw Error(ErrorKind::DomainError, "mixing depth k must lie in [0, 60]");
  if (depth < 0) depth = 2 * n + k;
  MixedConstruction mix;
  mix.window = w;
  mix.k = k;
  const double theta = capacity_fraction(pt.x3, w);
  if (pt.x3 - w.m() < kLowerLidSwitch) {
    if (std::abs(pt.x2 - pt.x1 * pt.x1) > 1e-12 * std::max(1.0, pt.x2)) {
      throw Error(ErrorKind::DomainError, "on the lower lid only the anchor xi = (x1, x1^2, m) has a mixing representation");
    }
    mix.xi1 = pt.x1;
    return mix;
  }
  if (pt.x1 == 0.0) {
    throw Error(ErrorKind::DomainError, "x1 = 0 has no extremal construction; use a small nonzero x1");
  }
  const auto frame = recover_parameters(pt, w, Branch::Plus);
  mix.xi1 = frame.xi1;
  mix.copies = static_cast<std::uint64_t>(std::llround(std::ldexp(theta, k)));
  if (mix.copies > 0) {
    mix.upper = build_extremal(frame.zeta1, frame.zeta2, n, depth - k);
  }
  return mix;
}

// ---------------------------------------------------------------------------
// Functions on the tree and Green's formula
// ---------------------------------------------------------------------------

/// Values on every node of the full binary tree down to `depth`, heap order.
struct TreeFunction {
  int depth = 0;
  std::vector<double> values;

  static TreeFunction filled(int depth, double value) {
    return {depth, std::vector<double>((std::size_t{2} << depth) - 1, value)};
  }

  [[nodiscard]] double at(const DyadicNode& node) const { return values[TreeStats::slot(node)]; }
  double& at(const DyadicNode& node) { return values[TreeStats::slot(node)]; }

  /// f(node) - (f(left) + f(right))/2 at an internal node.
  [[nodiscard]] double laplacian(const DyadicNode& node) const {
    return at(node) - 0.5 * (at(node.left()) + at(node.right()));
  }

  [[nodiscard]] std::vector<double> leaves() const {
    const std::size_t first = (std::size_t{1} << depth) - 1;
    return {values.begin() + static_cast<std::ptrdiff_t>(first), values.end()};
  }
};

/// f(root) - 2^-D sum(boundary) - sum over internal nodes of 2^-|node| (Delta f)(node).
/// Zero when boundary equals the leaf values; nonnegative when it bounds them from below.
inline double greens_gap(const TreeFunction& f, const std::vector<double>& leaf_boundary) {
  const std::size_t leaf_count = std::size_t{1} << f.depth;
  if (leaf_boundary.size() != leaf_count) throw Error(ErrorKind::DomainError, "boundary size does not match the tree");
  CompensatedSum internal;
  for (int depth = 0; depth < f.depth; ++depth) {
    const double w = std::ldexp(1.0, -depth);
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << depth); ++i) {
      const DyadicNode node{depth, i};
      const double lap = f.laplacian(node);
      const double scale = std::max(1.0, std::abs(f.at(node)));
      if (lap < -1e-12 * scale) {
        std::ostringstream os;
        os << "discrete Laplacian " << lap << " at node (" << depth << ", " << i << ")";
        throw Error(ErrorKind::NotSuperharmonic, os.str());
      }
      internal.add(w * lap);
    }
  }
  CompensatedSum boundary;
  for (double v : leaf_boundary) boundary.add(v);
  return f.at({0, 0}) - std::ldexp(boundary.value(), -f.depth) - internal.value();
}

/// f(node) = B_max(<phi>, <phi^2>, capacity) in the unit window, the
/// superharmonic majorant used to bound the embedding sum.
inline TreeFunction bellman_tree(const TreeStats& stats) {
  TreeFunction f{stats.depth, std::vector<double>(stats.mean.size())};
  const Window unit = Window::unit();
  for (std::size_t i = 0; i < stats.mean.size(); ++i) {
    const double second = std::max(stats.second[i], stats.mean[i] * stats.mean[i]);
    f.values[i] = eval_bmax({stats.mean[i], second, std::min(1.0, stats.capacity[i])}, unit).value;
  }
  return f;
}

}  // namespace carlbell
