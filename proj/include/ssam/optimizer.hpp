// Single time-scale stochastic subgradient method with subgradient
// averaging, and projected stochastic subgradient descent as a baseline.
//
// One averaged step, in order:
//   y^k     = argmin_{y in X} <z^k, y - x^k> + (beta/2) ||y - x^k||^2
//   x^{k+1} = x^k + tau_k (y^k - x^k)
//   g^{k+1} = oracle(x^{k+1})
//   z^{k+1} = (1 - a tau_k) z^k + a tau_k g^{k+1}
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ssam/core.hpp"
#include "ssam/oracle.hpp"

namespace ssam {

struct IterateState {
  Vector x;
  Vector z;
  std::uint64_t k = 0;
  double t = 0.0;            // sum of tau_j for j < k
  double loss_estimate = 0;  // f_estimate of the observation made at x^k
};

struct TraceRow {
  std::uint64_t k = 0;
  double t = 0.0;
  double loss = 0.0;
  double eta = 0.0;
  double residual = 0.0;
  double step_norm = 0.0;
  std::optional<double> dist;

  bool operator==(const TraceRow&) const = default;
};

struct Trace {
  std::vector<TraceRow> rows;
  bool has_dist = false;

  bool operator==(const Trace&) const = default;
};

// Everything a step needs besides the state: the oracle, the feasible set,
// the observation stream and, for test problems, the known solution used
// to fill TraceRow::dist.
struct Problem {
  Oracle& oracle;
  const BoxConstraint& box;
  RngStream& rng;
  std::optional<Vector> solution;
};

struct StepResult {
  IterateState state;
  TraceRow row;
};

IterateState ssam_init(const Vector& x0, Problem& problem, const AlgoParams& params);
StepResult ssam_step(const IterateState& state, Problem& problem, const AlgoParams& params);

IterateState sgd_init(const Vector& x0, Problem& problem, const AlgoParams& params);
// Baseline row k reports the gap of (x^k, g^k): the stationarity surrogate
// available without averaging.
StepResult sgd_step(const IterateState& state, Problem& problem, const AlgoParams& params);

enum class Method { kSsam, kSgd };

const char* MethodName(Method m);
Method ParseMethod(const std::string& name);

struct RunOptions {
  std::uint64_t iters = 1;
  // Stop after the first row whose residual is at or below this value.
  std::optional<double> stop_residual;
  // Report (never abort) when ||z^k||_inf exceeds this bound.
  std::optional<double> hull_bound;
  std::optional<Vector> solution;
  std::function<void(const IterateState&, const TraceRow&)> on_step;
};

struct MonitorReport {
  std::uint64_t hull_violations = 0;
  double max_z_inf = 0.0;
  bool stopped_early = false;
};

struct RunResult {
  Trace trace;
  IterateState final_state;
  MonitorReport monitors;
};

// Observation stream id used by run(); compare runs reuse it so both
// methods see the same observations.
inline constexpr std::uint64_t kObservationStream = 1;

RunResult run(Method method, const Vector& x0, Oracle& oracle, const BoxConstraint& box,
              const AlgoParams& params, const RunOptions& options);

}  // namespace ssam
