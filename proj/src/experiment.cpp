#include "ssam/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ssam {

namespace {

NoiseSpec Noise(const ExperimentConfig& c) { return NoiseSpec{c.sigma, c.delta0, c.rho}; }

Dataset LoadData(const ExperimentConfig& c) {
  if (c.data == "synthetic") {
    return synth_teacher(c.arch, c.samples, c.teacher_noise, c.seed).data;
  }
  Dataset d = load_csv(c.data);
  if (d.n != c.arch.n || d.m != c.arch.m) {
    throw UsageError("dataset has " + std::to_string(d.n) + " features and " +
                     std::to_string(d.m) + " targets, but arch expects n = " +
                     std::to_string(c.arch.n) + ", m = " + std::to_string(c.arch.m));
  }
  if (d.samples.empty()) throw DataError("dataset '" + c.data + "' has no rows");
  return c.standardize ? standardize(d) : d;
}

}  // namespace

Experiment BuildExperiment(const ExperimentConfig& config) {
  config.Validate();
  if (config.oracle == "quadratic") {
    QuadraticBenchmark q = MakeQuadraticBenchmark(config.dim, config.seed);
    auto oracle = quadratic_oracle(q.A, q.b, Noise(config));
    std::optional<Vector> sol = oracle->ExactSolution(q.box);
    return {std::move(oracle), q.box, Vector::Zero(config.dim), std::move(sol)};
  }
  if (config.oracle == "l1") {
    L1Benchmark l = MakeL1Benchmark(config.dim, config.seed);
    auto oracle = l1_oracle(l.xstar, Noise(config));
    std::optional<Vector> sol = oracle->ExactSolution(l.box);
    return {std::move(oracle), l.box, Vector::Zero(config.dim), std::move(sol)};
  }

  Dataset data = LoadData(config);
  std::vector<std::size_t> order(data.samples.size());
  std::iota(order.begin(), order.end(), 0);
  RngStream eval_rng(config.seed, kEvalStream);
  std::shuffle(order.begin(), order.end(), eval_rng.engine());
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(config.eval_size)));
  auto base = std::make_unique<ReluLossOracle>(std::move(data.samples), config.arch, config.batch,
                                               std::move(order), config.box);
  std::unique_ptr<Oracle> oracle = Noise(config).is_zero()
                                       ? std::unique_ptr<Oracle>(std::move(base))
                                       : with_noise(std::move(base), Noise(config));
  RngStream init_rng(config.seed, kInitStream);
  NetParams init = NetParams::RandomInit(config.arch, init_rng, config.box);
  BoxConstraint box = init.Box();
  Vector x0 = box.Project(init.Flatten());
  return {std::move(oracle), std::move(box), std::move(x0), std::nullopt};
}

RunResult RunExperiment(const ExperimentConfig& config, Method method) {
  Experiment e = BuildExperiment(config);
  RunOptions opts;
  opts.iters = config.iters;
  opts.solution = e.solution;
  return run(method, e.x0, *e.oracle, e.box, config.Params(), opts);
}

SelectionFunction BenchmarkSelection(const ExperimentConfig& config, BoxConstraint* box_out) {
  config.Validate();
  if (config.oracle == "quadratic") {
    QuadraticBenchmark q = MakeQuadraticBenchmark(config.dim, config.seed);
    if (box_out) *box_out = q.box;
    const Matrix A = q.A;
    const Vector b = q.b;
    return {[A, b](const Vector& x) { return 0.5 * (A * x - b).squaredNorm(); },
            [A, b](const Vector& x) { return Vector(A.transpose() * (A * x - b)); }, config.dim};
  }
  if (config.oracle == "l1") {
    L1Benchmark l = MakeL1Benchmark(config.dim, config.seed);
    if (box_out) *box_out = l.box;
    return L1DistanceSelection(l.xstar);
  }
  throw UsageError("simulate supports the quadratic and l1 oracles only");
}

double SmoothedLoss(const Trace& trace, std::size_t window) {
  if (trace.rows.empty()) return std::nan("");
  window = std::clamp<std::size_t>(window, 1, trace.rows.size());
  double sum = 0.0;
  for (std::size_t i = trace.rows.size() - window; i < trace.rows.size(); ++i) {
    sum += trace.rows[i].loss;
  }
  return sum / static_cast<double>(window);
}

double TailStd(const Trace& trace, double fraction) {
  if (trace.rows.empty()) return std::nan("");
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(trace.rows.size()))));
  const std::size_t begin = trace.rows.size() - count;
  double mean = 0.0;
  for (std::size_t i = begin; i < trace.rows.size(); ++i) mean += trace.rows[i].loss;
  mean /= static_cast<double>(count);
  double var = 0.0;
  for (std::size_t i = begin; i < trace.rows.size(); ++i) {
    const double d = trace.rows[i].loss - mean;
    var += d * d;
  }
  return std::sqrt(var / static_cast<double>(count));
}

MethodSummary Summarize(const ExperimentConfig& config, const RunResult& result) {
  MethodSummary s;
  s.config_hash = ConfigHash(config);
  const Trace& tr = result.trace;
  const std::size_t window = std::max<std::size_t>(1, tr.rows.size() / 100);
  s.initial_loss = tr.rows.empty() ? std::nan("") : tr.rows.front().loss;
  s.final_smoothed_loss = SmoothedLoss(tr, window);
  s.tail_std = TailStd(tr, 0.1);
  s.final_residual = tr.rows.empty() ? std::nan("") : tr.rows.back().residual;
  if (tr.has_dist && !tr.rows.empty()) s.final_dist = tr.rows.back().dist;
  return s;
}

Comparison Compare(const ExperimentConfig& config) {
  Comparison cmp;
  cmp.ssam_config = config;
  cmp.ssam_config.method = "ssam";
  cmp.sgd_config = config;
  cmp.sgd_config.method = "sgd";
  cmp.ssam = RunExperiment(cmp.ssam_config, Method::kSsam);
  cmp.sgd = RunExperiment(cmp.sgd_config, Method::kSgd);
  cmp.ssam_summary = Summarize(cmp.ssam_config, cmp.ssam);
  cmp.sgd_summary = Summarize(cmp.sgd_config, cmp.sgd);
  return cmp;
}

std::string RenderSummary(const Comparison& cmp) {
  std::ostringstream os;
  auto emit = [&os](const char* prefix, const MethodSummary& s) {
    os << prefix << ".config_hash = " << s.config_hash << '\n';
    os << prefix << ".initial_loss = " << FormatDouble(s.initial_loss) << '\n';
    os << prefix << ".final_smoothed_loss = " << FormatDouble(s.final_smoothed_loss) << '\n';
    os << prefix << ".tail_std = " << FormatDouble(s.tail_std) << '\n';
    os << prefix << ".final_residual = " << FormatDouble(s.final_residual) << '\n';
    if (s.final_dist) os << prefix << ".final_dist = " << FormatDouble(*s.final_dist) << '\n';
  };
  emit("ssam", cmp.ssam_summary);
  emit("sgd", cmp.sgd_summary);
  os << "tail_std_ratio = " << FormatDouble(cmp.ssam_summary.tail_std / cmp.sgd_summary.tail_std)
     << '\n';
  return os.str();
}

}  // namespace ssam
