#include "ssam/optimizer.hpp"

#include <cassert>
#include <stdexcept>
#include <string>

#include "ssam/gap.hpp"

namespace ssam {

namespace {

SubgradientEstimate Observe(Problem& problem, const Vector& x) {
  SubgradientEstimate est = problem.oracle.Query(x, problem.rng);
  if (est.g.size() != x.size()) throw UsageError("oracle returned a subgradient of wrong size");
  return est;
}

void CheckStart(const Vector& x0, const Problem& problem, const AlgoParams& params) {
  params.Validate();
  RequireFinite(x0, "x0");
  if (x0.size() != problem.oracle.dimension() || x0.size() != problem.box.dim()) {
    throw UsageError("x0, oracle and box dimensions differ");
  }
  if (!problem.box.Contains(x0)) throw UsageError("x0 is not feasible");
}

void FillDist(TraceRow& row, const Vector& x, const Problem& problem) {
  if (problem.solution) row.dist = (x - *problem.solution).norm();
}

}  // namespace

IterateState ssam_init(const Vector& x0, Problem& problem, const AlgoParams& params) {
  CheckStart(x0, problem, params);
  const SubgradientEstimate g0 = Observe(problem, x0);
  IterateState s;
  s.x = x0;
  s.z = params.z0 == Z0Policy::kZero ? Vector::Zero(x0.size()) : g0.g;
  s.loss_estimate = g0.f_estimate;
  return s;
}

StepResult ssam_step(const IterateState& state, Problem& problem, const AlgoParams& params) {
  const double tk = params.schedule.tau(state.k);
  const GapResult gap = eta(state.x, state.z, params.beta, problem.box);

  StepResult out;
  TraceRow& row = out.row;
  row.k = state.k;
  row.t = state.t;
  row.loss = state.loss_estimate;
  row.eta = gap.eta;
  row.residual = gap.residual;
  row.step_norm = tk * gap.residual;
  FillDist(row, state.x, problem);

  IterateState& next = out.state;
  // Clamping is a no-op in exact arithmetic (convex combination of feasible
  // points) and removes last-ulp drift.
  next.x = tk == 1.0 ? gap.ybar : problem.box.Project(state.x + tk * (gap.ybar - state.x));
  const SubgradientEstimate g = Observe(problem, next.x);
  const double w = params.a * tk;
  next.z = (1.0 - w) * state.z + w * g.g;
  next.k = state.k + 1;
  next.t = state.t + tk;
  next.loss_estimate = g.f_estimate;
  return out;
}

IterateState sgd_init(const Vector& x0, Problem& problem, const AlgoParams& params) {
  CheckStart(x0, problem, params);
  IterateState s;
  s.x = x0;
  s.z = Vector::Zero(x0.size());
  return s;
}

StepResult sgd_step(const IterateState& state, Problem& problem, const AlgoParams& params) {
  const double tk = params.schedule.tau(state.k);
  const SubgradientEstimate g = Observe(problem, state.x);
  const GapResult gap = eta(state.x, g.g, params.beta, problem.box);

  StepResult out;
  out.state.x = problem.box.Project(state.x - tk * g.g);
  out.state.z = state.z;
  out.state.k = state.k + 1;
  out.state.t = state.t + tk;
  out.state.loss_estimate = g.f_estimate;

  TraceRow& row = out.row;
  row.k = state.k;
  row.t = state.t;
  row.loss = g.f_estimate;
  row.eta = gap.eta;
  row.residual = gap.residual;
  row.step_norm = (out.state.x - state.x).norm();
  FillDist(row, state.x, problem);
  return out;
}

const char* MethodName(Method m) { return m == Method::kSsam ? "ssam" : "sgd"; }

Method ParseMethod(const std::string& name) {
  if (name == "ssam") return Method::kSsam;
  if (name == "sgd") return Method::kSgd;
  throw UsageError("unknown method '" + name + "' (expected ssam or sgd)");
}

RunResult run(Method method, const Vector& x0, Oracle& oracle, const BoxConstraint& box,
              const AlgoParams& params, const RunOptions& options) {
  if (options.iters < 1) throw UsageError("run: iters must be >= 1");
  RngStream rng(params.seed, kObservationStream);
  Problem problem{oracle, box, rng, options.solution};

  RunResult result;
  result.trace.has_dist = options.solution.has_value();
  result.trace.rows.reserve(options.iters);

  IterateState state = method == Method::kSsam ? ssam_init(x0, problem, params)
                                               : sgd_init(x0, problem, params);
  for (std::uint64_t i = 0; i < options.iters; ++i) {
    if (method == Method::kSsam && options.hull_bound) {
      const double zinf = state.z.lpNorm<Eigen::Infinity>();
      result.monitors.max_z_inf = std::max(result.monitors.max_z_inf, zinf);
      if (zinf > *options.hull_bound) ++result.monitors.hull_violations;
    }
    StepResult step = method == Method::kSsam ? ssam_step(state, problem, params)
                                              : sgd_step(state, problem, params);
    assert(box.Contains(step.state.x));
    if (options.on_step) options.on_step(state, step.row);
    result.trace.rows.push_back(step.row);
    const bool stop = options.stop_residual && step.row.residual <= *options.stop_residual;
    state = std::move(step.state);
    if (stop) {
      result.monitors.stopped_early = true;
      break;
    }
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace ssam
