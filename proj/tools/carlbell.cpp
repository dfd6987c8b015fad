// carlbell: evaluate Bellman functions, run verification suites, build
// extremal sequences and export foliation or grid tables.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or domain error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "carlbell/carlbell.hpp"

namespace {

using Json = nlohmann::ordered_json;
using namespace carlbell;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt9(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

Json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

// Like Json::dump(), but floats are written with 9 significant digits.
std::string dump9(const Json& j) {
  if (j.is_number_float()) {
    std::string s = fmt9(j.get<double>());
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
  }
  if (j.is_object()) {
    std::string out = "{";
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) out += ',';
      first = false;
      out += Json(key).dump() + ':' + dump9(value);
    }
    return out + '}';
  }
  if (j.is_array()) {
    std::string out = "[";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i > 0) out += ',';
      out += dump9(j[i]);
    }
    return out + ']';
  }
  return j.dump();
}

void emit(const Json& j) { std::cout << dump9(j) << '\n'; }

Branch parse_branch(const std::string& s) { return s == "minus" ? Branch::Minus : Branch::Plus; }

std::uint64_t default_seed() {
  const char* env = std::getenv("CARLBELL_SEED");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') throw UsageError("CARLBELL_SEED must be a nonnegative integer");
  return v;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string which;
  double x1 = 0.0;
  double x2 = 0.0;
  std::optional<double> x3;
  double m = 0.0;
  double M = 1.0;
  double p = 2.0;
  std::string branch = "plus";
  std::optional<double> eps;
  std::optional<double> delta;
};

int run_eval(const EvalArgs& a) {
  if (a.which == "jni") {
    if (!a.eps) throw UsageError("--which jni needs --eps");
    const JniParams params(*a.eps, a.delta.value_or(*a.eps));
    Json j;
    j["value"] = num(eval_jni({a.x1, a.x2}, params));
    j["delta"] = num(params.delta());
    emit(j);
    return 0;
  }
  if (!a.x3) throw UsageError("--which " + a.which + " needs --x3");
  const Window w(a.m, a.M);
  const CetPoint pt{a.x1, a.x2, *a.x3};
  BellmanValue v;
  if (a.which == "bmax") {
    v = eval_bmax(pt, w);
  } else if (a.which == "bmin") {
    v = eval_bmin(pt, w);
  } else {
    v = eval_lp(pt, w, Exponent(a.p), parse_branch(a.branch));
  }
  Json j;
  j["value"] = num(v.value);
  j["a"] = num(v.a);
  j["branch"] = std::string(to_string(v.branch));
  emit(j);
  return 0;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string suite;
  long samples = 100;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool timing = false;
};

int run_verify(const VerifyArgs& a) {
  const std::uint64_t seed = a.seed ? *a.seed : default_seed();
  std::vector<std::string> suites;
  if (a.suite == "all") {
    suites = suite_names();
  } else {
    suites.push_back(a.suite);
  }
  bool failed = false;
  for (const auto& name : suites) {
    const auto r = run_suite(name, a.samples, seed, a.tol, a.timing);
    Json j;
    j["suite"] = r.suite;
    j["samples"] = r.samples;
    j["failures"] = r.failures;
    j["worst_violation"] = num(r.worst_violation);
    j["tolerance"] = num(r.tolerance);
    j["seed"] = r.seed;
    j["elapsed_ms"] = r.elapsed_ms;
    Json checks = Json::array();
    for (const auto& c : r.checks) {
      Json cj;
      cj["name"] = c.name;
      cj["samples"] = c.samples;
      cj["failures"] = c.failures;
      cj["worst"] = num(c.worst);
      cj["tolerance"] = num(c.tolerance);
      checks.push_back(cj);
    }
    j["checks"] = checks;
    emit(j);
    failed = failed || r.failures > 0;
  }
  return failed ? kExitFailure : 0;
}

// ---------------------------------------------------------------------------

struct ExtremalArgs {
  double x1 = 0.0;
  double x2 = 0.0;
  int n = 0;
  int depth = 0;
  std::optional<std::string> emit_path;
  std::optional<int> emit_depth;
  std::optional<double> x3;
  double m = 0.0;
  double M = 1.0;
  int mix_k = 10;
  std::string tail = "exact";
};

// Maximal dyadic pieces on which phi is constant, left to right.
void write_pieces(std::ostream& out, const StepFunction& phi, DyadicNode node) {
  const int span_log = phi.depth - node.depth;
  const std::uint64_t first = node.index << span_log;
  const std::uint64_t count = std::uint64_t{1} << span_log;
  bool uniform = true;
  for (std::uint64_t i = 1; i < count && uniform; ++i) uniform = phi.values[first + i] == phi.values[first];
  if (uniform) {
    out << "piece," << node.depth << ',' << node.index << ',' << fmt9(phi.values[first]) << ",,\n";
    return;
  }
  write_pieces(out, phi, node.left());
  write_pieces(out, phi, node.right());
}

void write_construction_csv(const std::string& path, const StepFunction& phi, const CarlesonWeights& alpha) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open " + path + " for writing");
  out << "kind,depth,index,value,alpha_numerator,alpha_exponent\n";
  write_pieces(out, phi, {0, 0});
  for (const auto& [node, w] : alpha.alpha) {
    out << "alpha," << node.depth << ',' << node.index << ",," << w.numerator << ',' << w.exponent << '\n';
  }
}

int run_extremal(const ExtremalArgs& a) {
  const Tail tail = a.tail == "truncated" ? Tail::Truncated : Tail::Exact;
  const int emit_depth = a.emit_depth.value_or(std::min(a.depth, 16));
  Json j;
  if (!a.x3) {
    const auto built = build_extremal(a.x1, a.x2, a.n, a.depth);
    const auto s = built.summary(tail);
    const double target = std::pow(std::sqrt(a.x2) + std::sqrt(std::max(0.0, a.x2 - a.x1 * a.x1)), 2);
    j["sum"] = num(s.carleson_sum);
    j["target"] = num(target);
    j["ratio"] = num(s.carleson_sum / target);
    j["mean_err"] = num(std::abs(s.mean - a.x1));
    j["second_moment_err"] = num(std::abs(s.second_moment - a.x2));
    j["total_alpha"] = num(s.total_alpha);
    j["c"] = num(built.plan().c);
    j["d"] = num(built.plan().d);
    if (a.emit_path) {
      const auto [phi, alpha] = built.materialize(emit_depth);
      write_construction_csv(*a.emit_path, phi, alpha);
    }
  } else {
    const Window w(a.m, a.M);
    const CetPoint pt{a.x1, a.x2, *a.x3};
    const auto mix = mix_along_line(pt, w, a.n, a.mix_k, a.depth);
    const auto u = mix.unit_summary(tail);
    const double sum = mix.functional(tail);
    const double target = eval_bmax(pt, w).value;
    j["sum"] = num(sum);
    j["target"] = num(target);
    j["ratio"] = num(target == 0.0 ? 1.0 : sum / target);
    j["mean_err"] = num(std::abs(u.mean - a.x1));
    j["second_moment_err"] = num(std::abs(u.second_moment - a.x2));
    j["capacity_err"] = num(std::abs(mix.capacity(tail) - *a.x3));
    j["theta"] = num(mix.theta());
    j["copies"] = mix.copies;
    if (a.emit_path) {
      const auto [phi, alpha] = mix.materialize(std::max(emit_depth, a.mix_k));
      write_construction_csv(*a.emit_path, phi, alpha);
    }
  }
  j["n"] = a.n;
  j["depth"] = a.depth;
  j["tail"] = a.tail;
  emit(j);
  return 0;
}

// ---------------------------------------------------------------------------

struct FoliateArgs {
  double m = 0.0;
  double M = 1.0;
  double xi1 = 0.0;
  std::string branch = "plus";
  int count = 0;
  int x3_steps = 4;
};

int run_foliate(const FoliateArgs& a) {
  if (a.count < 1) throw UsageError("--count must be at least 1");
  if (a.x3_steps < 1) throw UsageError("--x3-steps must be at least 1");
  if (a.xi1 == 0.0) throw Error(ErrorKind::DegeneratePoint, "the fan through xi1 = 0 collapses onto the x3 axis");
  const Window w(a.m, a.M);
  const Branch branch = parse_branch(a.branch);
  std::cout << "a,x3,x1,x2,zeta1,zeta2,tangency_gap\n";
  for (int i = 0; i < a.count; ++i) {
    const double frac = static_cast<double>(i) / a.count;
    // Plus: a sweeps [0, 1/(4(M-m))). Minus: zeta1 sweeps (0, xi1], u = 2 xi1/zeta1 - 1.
    const double a_line = branch == Branch::Plus ? frac * plus_bound(w) : a_from_pole_gap(2.0 / (1.0 - frac) - 1.0, w);
    const auto frame = make_frame(a_line, a.xi1, w, branch);
    const double gap = (a_line == 0.0 || !std::isfinite(frame.t1)) ? 0.0 : tangency_gap(a_line, frame.t1, w);
    for (int k = 0; k <= a.x3_steps; ++k) {
      const double x3 = w.m() + w.width() * static_cast<double>(k) / a.x3_steps;
      const auto p = extremal_line_point(frame, x3);
      std::cout << fmt9(a_line) << ',' << fmt9(x3) << ',' << fmt9(p.x1) << ',' << fmt9(p.x2) << ','
                << fmt9(frame.zeta1) << ',' << fmt9(frame.zeta2) << ',' << fmt9(gap) << '\n';
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int count = 1;

  [[nodiscard]] double at(int i) const { return count == 1 ? lo : lo + (hi - lo) * i / (count - 1); }
};

std::optional<GridAxis> parse_axis(const std::string& spec) {
  GridAxis axis;
  std::istringstream in(spec);
  std::string lo;
  std::string hi;
  std::string count;
  if (!std::getline(in, lo, ':') || !std::getline(in, hi, ':') || !std::getline(in, count) || !in.eof()) {
    return std::nullopt;
  }
  try {
    std::size_t used = 0;
    axis.lo = std::stod(lo, &used);
    if (used != lo.size()) return std::nullopt;
    axis.hi = std::stod(hi, &used);
    if (used != hi.size()) return std::nullopt;
    axis.count = std::stoi(count, &used);
    if (used != count.size() || axis.count < 1) return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return axis;
}

struct SweepArgs {
  std::string which;
  std::string grid;
  double m = 0.0;
  double M = 1.0;
  double p = 2.0;
  std::string branch = "plus";
  std::optional<double> eps;
  std::optional<double> delta;
  std::optional<std::string> out;
};

int run_sweep(const SweepArgs& a) {
  std::optional<GridAxis> axes[3];
  const char* names[3] = {"x1", "x2", "x3"};
  std::istringstream in(a.grid);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("malformed grid entry '" + item + "'");
    const std::string key = item.substr(0, eq);
    int slot = -1;
    for (int i = 0; i < 3; ++i) {
      if (key == names[i]) slot = i;
    }
    const auto axis = parse_axis(item.substr(eq + 1));
    if (slot < 0 || !axis || axes[slot]) throw UsageError("malformed grid entry '" + item + "'");
    axes[slot] = axis;
  }
  const bool jni = a.which == "jni";
  if (!axes[0] || !axes[1] || (!jni && !axes[2])) throw UsageError("grid must define x1, x2" + std::string(jni ? "" : " and x3"));
  if (jni && axes[2]) throw UsageError("the jni grid has no x3 axis");
  if (jni && !a.eps) throw UsageError("--which jni needs --eps");

  std::ofstream file;
  if (a.out) {
    file.open(*a.out, std::ios::binary);
    if (!file) throw UsageError("cannot open " + *a.out + " for writing");
  }
  std::ostream& out = a.out ? file : std::cout;

  const Window w(a.m, a.M);
  const Exponent exp(a.p);
  const Branch branch = parse_branch(a.branch);
  std::optional<JniParams> params;
  if (jni) params.emplace(*a.eps, a.delta.value_or(*a.eps));

  auto value_at = [&](double x1, double x2, double x3) {
    try {
      if (jni) return eval_jni({x1, x2}, *params);
      const CetPoint pt{x1, x2, x3};
      if (a.which == "bmax") return eval_bmax(pt, w).value;
      if (a.which == "bmin") return eval_bmin(pt, w).value;
      return eval_lp(pt, w, exp, branch).value;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DomainError) return std::numeric_limits<double>::quiet_NaN();
      throw;
    }
  };

  out << (jni ? "x1,x2,value\n" : "x1,x2,x3,value\n");
  const int n3 = jni ? 1 : axes[2]->count;
  for (int i = 0; i < axes[0]->count; ++i) {
    for (int j = 0; j < axes[1]->count; ++j) {
      for (int k = 0; k < n3; ++k) {
        const double x1 = axes[0]->at(i);
        const double x2 = axes[1]->at(j);
        if (jni) {
          out << fmt9(x1) << ',' << fmt9(x2) << ',' << fmt9(value_at(x1, x2, 0.0)) << '\n';
        } else {
          const double x3 = axes[2]->at(k);
          out << fmt9(x1) << ',' << fmt9(x2) << ',' << fmt9(x3) << ',' << fmt9(value_at(x1, x2, x3)) << '\n';
        }
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp Bellman functions for Carleson embeddings and John-Nirenberg"};
  app.require_subcommand(1);

  const std::vector<std::string> branches{"plus", "minus"};

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Evaluate a Bellman function at one point");
  eval->add_option("--which", ev.which)->required()->check(CLI::IsMember({"bmax", "bmin", "jni", "lp"}));
  eval->add_option("--x1", ev.x1)->required();
  eval->add_option("--x2", ev.x2)->required();
  eval->add_option("--x3", ev.x3);
  eval->add_option("--m", ev.m);
  eval->add_option("--M", ev.M);
  eval->add_option("--p", ev.p);
  eval->add_option("--branch", ev.branch)->check(CLI::IsMember(branches));
  eval->add_option("--eps", ev.eps);
  eval->add_option("--delta", ev.delta);

  VerifyArgs vf;
  std::vector<std::string> suites = suite_names();
  suites.emplace_back("all");
  auto* verify = app.add_subcommand("verify", "Run a seeded invariant suite");
  verify->add_option("--suite", vf.suite)->required()->check(CLI::IsMember(suites));
  verify->add_option("--samples", vf.samples)->check(CLI::PositiveNumber);
  verify->add_option("--seed", vf.seed);
  verify->add_option("--tol", vf.tol, "Replace every numeric tolerance of the suite");
  verify->add_flag("--timing", vf.timing, "Report wall-clock elapsed_ms (breaks byte-identical output)");

  ExtremalArgs ex;
  auto* extremal = app.add_subcommand("extremal", "Build the extremal sequence and report its embedding sum");
  extremal->add_option("--x1", ex.x1)->required();
  extremal->add_option("--x2", ex.x2)->required();
  extremal->add_option("--n", ex.n)->required();
  extremal->add_option("--depth", ex.depth)->required();
  extremal->add_option("--emit", ex.emit_path, "Write pieces and weights as CSV");
  extremal->add_option("--emit-depth", ex.emit_depth, "Depth of the written tree (default min(depth, 16), at most 22)");
  extremal->add_option("--x3", ex.x3);
  extremal->add_option("--m", ex.m);
  extremal->add_option("--M", ex.M);
  extremal->add_option("--mix-k", ex.mix_k);
  extremal->add_option("--tail", ex.tail)->check(CLI::IsMember({"exact", "truncated"}));

  FoliateArgs fo;
  auto* foliate = app.add_subcommand("foliate", "Export a fan of extremal lines as CSV");
  foliate->add_option("--m", fo.m);
  foliate->add_option("--M", fo.M);
  foliate->add_option("--xi1", fo.xi1)->required();
  foliate->add_option("--branch", fo.branch)->check(CLI::IsMember(branches));
  foliate->add_option("--count", fo.count)->required();
  foliate->add_option("--x3-steps", fo.x3_steps);

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Evaluate on a Cartesian grid and write CSV");
  sweep->add_option("--which", sw.which)->required()->check(CLI::IsMember({"bmax", "bmin", "jni", "lp"}));
  sweep->add_option("--grid", sw.grid, "e.g. x1=-1:1:11,x2=0:2:11,x3=0:1:5")->required();
  sweep->add_option("--m", sw.m);
  sweep->add_option("--M", sw.M);
  sweep->add_option("--p", sw.p);
  sweep->add_option("--branch", sw.branch)->check(CLI::IsMember(branches));
  sweep->add_option("--eps", sw.eps);
  sweep->add_option("--delta", sw.delta);
  sweep->add_option("--out", sw.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*eval) return run_eval(ev);
    if (*verify) return run_verify(vf);
    if (*extremal) return run_extremal(ex);
    if (*foliate) return run_foliate(fo);
    if (*sweep) return run_sweep(sw);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const carlbell::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
