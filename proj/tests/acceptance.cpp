// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
//   acceptance [--wine PATH] [--only N]
//
// --wine adds the desk-scale comparison on a semicolon-delimited wine CSV.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ssam/data_io.hpp"
#include "ssam/experiment.hpp"
#include "ssam/gap.hpp"
#include "ssam/optimizer.hpp"
#include "ssam/validate.hpp"

namespace {

using namespace ssam;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// Collapses a validation report into a verdict listing each check.
Verdict FromReport(const ValidationReport& report, double seconds, double budget) {
  Verdict v;
  v.pass = report.all_pass() && seconds < budget;
  std::ostringstream os;
  for (const Check& c : report.checks) {
    if (!c.pass) os << "FAILED " << c.name << "=" << c.measured << " ";
  }
  os << report.checks.size() << " checks, runtime " << Fmt("%.1f", seconds) << " s (budget " << budget
     << " s)";
  v.detail = os.str();
  return v;
}

Verdict SuiteCriterion(const char* suite, double budget) {
  ValidationOptions opts;
  opts.suites = {suite};
  const auto t0 = std::chrono::steady_clock::now();
  const ValidationReport report = RunValidation(opts);
  const double secs = Seconds(t0);
  Verdict v = FromReport(report, secs, budget);
  std::ostringstream os;
  for (const Check& c : report.checks) os << c.name << "=" << Fmt("%.3g", c.measured) << " ";
  v.detail = os.str() + "| " + v.detail;
  return v;
}

// Shared settings of the convex convergence runs.
AlgoParams ConvexParams() {
  AlgoParams p;
  p.a = 0.5;
  p.beta = 1.0;
  p.seed = 3;
  p.schedule = StepSchedule::Harmonic(0.5, 100.0, 0.5, 1.0);
  return p;
}
constexpr std::uint64_t kConvexBudget = 200000;
constexpr int kConvexDim = 10;
constexpr std::uint64_t kBenchmarkSeed = 1;

Verdict ConvexConvergence() {
  Verdict v{true, ""};
  std::ostringstream os;
  const AlgoParams params = ConvexParams();
  RunOptions opts;
  opts.iters = kConvexBudget;

  const QuadraticBenchmark qb = MakeQuadraticBenchmark(kConvexDim, kBenchmarkSeed);
  const QuadraticOracle exact(qb.A, qb.b);
  const Vector xs = *exact.ExactSolution(qb.box);
  int active = 0;
  for (int i = 0; i < kConvexDim; ++i) active += std::abs(std::abs(xs[i]) - 1.0) < 1e-12;
  v.pass = v.pass && active >= 2;
  os << "active=" << active << "; ";
  for (double sigma : {0.0, 0.01}) {
    auto oracle = quadratic_oracle(qb.A, qb.b, {sigma, 0.0, 1.0});
    const RunResult r = run(Method::kSsam, Vector::Zero(kConvexDim), *oracle, qb.box, params, opts);
    const double dist = (r.final_state.x - xs).norm();
    const double gap = eta(r.final_state.x, r.final_state.z, params.beta, qb.box).eta;
    const double zerr = (r.final_state.z - exact.Gradient(xs)).norm();
    const bool ok = dist <= 1e-3 && gap >= -1e-6 && zerr <= 1e-2;
    v.pass = v.pass && ok;
    os << "quad sigma=" << sigma << ": dist=" << Fmt("%.2e", dist) << " eta=" << Fmt("%.2e", gap)
       << " |z-grad|=" << Fmt("%.2e", zerr) << "; ";
  }

  const L1Benchmark lb = MakeL1Benchmark(kConvexDim, kBenchmarkSeed);
  const L1Oracle l1(lb.xstar);
  const double fstar = *l1.Value(*l1.ExactSolution(lb.box));
  for (double sigma : {0.0, 0.01}) {
    auto oracle = l1_oracle(lb.xstar, {sigma, 0.0, 1.0});
    const RunResult r = run(Method::kSsam, Vector::Zero(kConvexDim), *oracle, lb.box, params, opts);
    const double fgap = *l1.Value(r.final_state.x) - fstar;
    v.pass = v.pass && fgap <= 1e-3;
    os << "l1 sigma=" << sigma << ": f-f*=" << Fmt("%.2e", fgap) << "; ";
  }
  os << "budget " << kConvexBudget;
  v.detail = os.str();
  return v;
}

Verdict HullMonitor() {
  const L1Benchmark lb = MakeL1Benchmark(kConvexDim, kBenchmarkSeed);
  auto oracle = l1_oracle(lb.xstar, {0.01, 0.5, 1.0});
  RunOptions opts;
  opts.iters = kConvexBudget;
  double worst = 0.0;
  double worst_early = 0.0;
  opts.on_step = [&](const IterateState& s, const TraceRow&) {
    const double excess = std::max(0.0, s.z.lpNorm<Eigen::Infinity>() - 1.0);
    if (s.k >= kConvexBudget / 10) {
      worst = std::max(worst, excess);
    } else {
      worst_early = std::max(worst_early, excess);
    }
  };
  run(Method::kSsam, Vector::Zero(kConvexDim), *oracle, lb.box, ConvexParams(), opts);
  return {worst <= 1e-2, "max excess after 10% = " + Fmt("%.2e", worst) +
                             " (threshold 1e-2; first 10%: " + Fmt("%.2e", worst_early) +
                             "), sigma=0.01 delta0=0.5 rho=1"};
}

std::string TraceBytes(const Trace& t) {
  std::ostringstream os;
  WriteTraceStream(os, t);
  return os.str();
}

Verdict DeskScaleComparison(const ExperimentConfig& base, const char* label) {
  const auto t0 = std::chrono::steady_clock::now();
  int variance_wins = 0;
  bool loss_ok = true;
  std::ostringstream os;
  os << label << ": ";
  std::string first_ssam, first_sgd;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ExperimentConfig c = base;
    c.seed = seed;
    const Comparison cmp = Compare(c);
    const MethodSummary& a = cmp.ssam_summary;
    const MethodSummary& b = cmp.sgd_summary;
    loss_ok = loss_ok && a.final_smoothed_loss < 0.5 * a.initial_loss &&
              b.final_smoothed_loss < 0.5 * b.initial_loss;
    variance_wins += a.tail_std < b.tail_std;
    os << "s" << seed << "[loss " << Fmt("%.3g", a.initial_loss) << "->" << Fmt("%.3g", a.final_smoothed_loss)
       << "/" << Fmt("%.3g", b.final_smoothed_loss) << " std ratio " << Fmt("%.2f", a.tail_std / b.tail_std)
       << "] ";
    if (seed == 1) {
      first_ssam = TraceBytes(cmp.ssam.trace);
      first_sgd = TraceBytes(cmp.sgd.trace);
    }
  }
  ExperimentConfig again = base;
  again.seed = 1;
  const Comparison repeat = Compare(again);
  const bool identical = TraceBytes(repeat.ssam.trace) == first_ssam && TraceBytes(repeat.sgd.trace) == first_sgd;
  const double secs = Seconds(t0);
  os << "| (i) loss<50%: " << (loss_ok ? "yes" : "no") << " (ii) ssam lower tail std in " << variance_wins
     << "/5 (iii) byte-identical: " << (identical ? "yes" : "no") << " | runtime " << Fmt("%.1f", secs) << " s";
  return {loss_ok && variance_wins >= 4 && identical && secs < 300.0, os.str()};
}

Verdict FormatContracts() {
  std::ostringstream os;
  bool pass = true;
  const auto dir = std::filesystem::temp_directory_path() / "ssam_acceptance";
  std::filesystem::create_directories(dir);
  RngStream rng(8);
  for (bool with_dist : {false, true}) {
    Trace t;
    t.has_dist = with_dist;
    for (std::uint64_t k = 0; k < 100000; ++k) {
      TraceRow r;
      r.k = k;
      r.t = rng.Uniform(0.0, 1e4);
      r.loss = std::exp(30.0 * rng.Normal());
      r.eta = -std::exp(30.0 * rng.Normal());
      r.residual = rng.Uniform(0.0, 1.0);
      r.step_norm = r.residual * 1e-300;
      if (with_dist) r.dist = rng.Normal();
      t.rows.push_back(r);
    }
    const auto path = dir / (with_dist ? "trace_dist.csv" : "trace.csv");
    write_trace(path, t);
    const bool same = read_trace(path) == t;
    pass = pass && same;
    os << "trace" << (with_dist ? "+dist" : "") << " 1e5 rows: " << (same ? "bit-exact" : "MISMATCH") << "; ";
  }
  int config_ok = 0;
  for (int i = 0; i < 200; ++i) {
    ExperimentConfig c;
    c.method = i % 2 ? "sgd" : "ssam";
    c.oracle = i % 3 == 0 ? "relu" : (i % 3 == 1 ? "l1" : "quadratic");
    c.a = rng.Uniform(1e-3, 2.0);
    c.beta = std::exp(rng.Normal());
    c.tau0 = rng.Uniform(1e-6, 1.0);
    c.decay = rng.Uniform(0.0, 10.0);
    c.horizon = std::floor(rng.Uniform(0.0, 1e6));
    c.iters = 1 + rng.Index(1000000);
    c.seed = rng.engine()();
    c.sigma = std::abs(rng.Normal());
    c.delta0 = std::abs(rng.Normal());
    c.h = rng.Uniform(1e-6, 1e-1);
    c.standardize = i % 5 != 0;
    c.z0 = i % 2 ? "first" : "zero";
    const auto path = dir / "cfg.txt";
    save_config(path, c);
    config_ok += load_config(path) == c && parse_config(render_config(c)) == c;
  }
  pass = pass && config_ok == 200;
  os << "config round trips " << config_ok << "/200";
  std::filesystem::remove_all(dir);
  return {pass, os.str()};
}

ExperimentConfig TeacherConfig() {
  ExperimentConfig c;
  c.oracle = "relu";
  c.data = "synthetic";
  c.arch = {2, 11, 1};
  c.a = 0.1;
  c.tau0 = 0.03;
  c.schedule = "harmonic";
  c.decay = 5.0;
  c.iters = 50000;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::string wine;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--wine" && i + 1 < argc) {
      wine = argv[++i];
    } else if (arg == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--wine PATH] [--only N]\n");
      return 1;
    }
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "gap-properties", [] { return SuiteCriterion("gap", 10.0); }},
      {2, "chain-rule", [] { return SuiteCriterion("chain", 60.0); }},
      {3, "subgradient-correctness", [] { return SuiteCriterion("subgrad", 600.0); }},
      {4, "convex-convergence", ConvexConvergence},
      {5, "hull-monitor", HullMonitor},
      {6, "dynamics-descent", [] { return SuiteCriterion("dynamics", 600.0); }},
      {7, "desk-scale-comparison",
       [&wine] {
         Verdict v = DeskScaleComparison(TeacherConfig(), "synthetic teacher");
         if (wine.empty()) {
           v.detail += " | wine: skipped (no --wine PATH)";
         } else {
           ExperimentConfig c = TeacherConfig();
           c.data = wine;
           const Verdict w = DeskScaleComparison(c, "wine");
           v.pass = v.pass && w.pass;
           v.detail += " || " + w.detail;
         }
         return v;
       }},
      {8, "format-contracts", FormatContracts},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s %d %s: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
