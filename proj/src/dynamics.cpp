#include "ssam/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssam/gap.hpp"

namespace ssam {

void FlowParams::Validate() const {
  if (!(a > 0.0) || !(beta > 0.0)) throw UsageError("flow: a and beta must be positive");
  if (!(h > 0.0)) throw UsageError("flow: step h must be positive");
}

FlowState flow_step(const FlowState& state, const SelectionFunction& fn, const FlowParams& params,
                    const BoxConstraint& box) {
  const Vector yb = ybar(state.X, state.Z, params.beta, box);
  FlowState next;
  next.X = box.Project(state.X + params.h * (yb - state.X));
  next.Z = state.Z + params.h * params.a * (fn.g(state.X) - state.Z);
  next.t = state.t + params.h;
  return next;
}

LyapunovReading ReadLyapunov(const FlowState& state, const SelectionFunction& fn,
                             const FlowParams& params, const BoxConstraint& box) {
  const GapResult gap = eta(state.X, state.Z, params.beta, box);
  LyapunovReading r;
  r.t = state.t;
  r.f_val = fn.f(state.X);
  r.eta_val = gap.eta;
  r.W = params.a * r.f_val - gap.eta;
  r.speed = gap.residual;
  return r;
}

Integration integrate(const Vector& x0, const Vector& z0, const SelectionFunction& fn,
                      const FlowParams& params, const BoxConstraint& box, double T) {
  params.Validate();
  if (!(T > 0.0)) throw UsageError("integrate: horizon T must be positive");
  RequireSameDim(x0, z0, "integrate");
  if (!box.Contains(x0, kFeasibilityTol)) throw UsageError("integrate: x0 is not feasible");

  const auto steps = static_cast<long>(std::llround(T / params.h));
  Integration out;
  out.readings.reserve(static_cast<std::size_t>(steps) + 1);
  FlowState state{box.Project(x0), z0, 0.0};
  out.readings.push_back(ReadLyapunov(state, fn, params, box));

  double max_violation = -std::numeric_limits<double>::infinity();
  for (long j = 0; j < steps; ++j) {
    state = flow_step(state, fn, params, box);
    state.t = static_cast<double>(j + 1) * params.h;
    out.readings.push_back(ReadLyapunov(state, fn, params, box));
    const LyapunovReading& prev = out.readings[out.readings.size() - 2];
    const LyapunovReading& cur = out.readings.back();
    const double dissipated = params.a * params.beta * params.h * prev.speed * prev.speed;
    out.descent.dissipation += dissipated;
    max_violation = std::max(max_violation, cur.W - prev.W + dissipated);
  }
  out.descent.total_change = out.readings.back().W - out.readings.front().W;
  out.descent.max_violation = steps > 0 ? max_violation : 0.0;
  out.descent.pass = out.descent.max_violation <= 10.0 * params.h;
  out.final_state = std::move(state);
  return out;
}

Trace ToTrace(const std::vector<LyapunovReading>& readings, double h) {
  Trace tr;
  tr.rows.reserve(readings.size());
  for (std::size_t j = 0; j < readings.size(); ++j) {
    const LyapunovReading& r = readings[j];
    TraceRow row;
    row.k = j;
    row.t = r.t;
    row.loss = r.f_val;
    row.eta = r.eta_val;
    row.residual = r.speed;
    row.step_norm = h * r.speed;
    tr.rows.push_back(row);
  }
  return tr;
}

namespace {

// Exact, noise-free observations of a selection.
class SelectionOracle : public Oracle {
 public:
  explicit SelectionOracle(const SelectionFunction& fn) : fn_(fn) {}
  SubgradientEstimate Query(const Vector& x, RngStream&) override {
    SubgradientEstimate est;
    est.g = fn_.g(x);
    est.f_estimate = fn_.f(x);
    return est;
  }
  int dimension() const override { return fn_.dim; }

 private:
  const SelectionFunction& fn_;
};

}  // namespace

double TrackingGap(const Vector& x0, const SelectionFunction& fn, double a, double beta,
                   const BoxConstraint& box, double tau, double T) {
  constexpr int kRefine = 16;
  const auto steps = static_cast<long>(std::llround(T / tau));
  SelectionOracle oracle(fn);
  RngStream rng(0);
  Problem problem{oracle, box, rng, std::nullopt};
  AlgoParams params;
  params.a = a;
  params.beta = beta;
  params.schedule = StepSchedule::Constant(tau, a);
  IterateState it = ssam_init(x0, problem, params);

  FlowParams fp{a, beta, tau / kRefine};
  FlowState flow{x0, fn.g(x0), 0.0};
  double sup = 0.0;
  for (long k = 0; k <= steps; ++k) {
    sup = std::max(sup, (it.x - flow.X).norm() + (it.z - flow.Z).norm());
    if (k == steps) break;
    it = ssam_step(it, problem, params).state;
    for (int r = 0; r < kRefine; ++r) flow = flow_step(flow, fn, fp, box);
  }
  return sup;
}

}  // namespace ssam
