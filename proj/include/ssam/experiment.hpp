// Builds problems from an ExperimentConfig and runs single or paired
// (averaged vs. plain) optimizations.
#pragma once

#include <memory>
#include <optional>
#include <string>

#include "ssam/chain_lab.hpp"
#include "ssam/data_io.hpp"
#include "ssam/optimizer.hpp"

namespace ssam {

struct Experiment {
  std::unique_ptr<Oracle> oracle;
  BoxConstraint box;
  Vector x0;
  std::optional<Vector> solution;
};

// Stream ids derived from the config seed.
inline constexpr std::uint64_t kInitStream = 0x1417;
inline constexpr std::uint64_t kEvalStream = 0xe7a1;

// Relu problems read `config.data` (CSV path or "synthetic"). CSV features
// are standardized when config.standardize is set.
Experiment BuildExperiment(const ExperimentConfig& config);

RunResult RunExperiment(const ExperimentConfig& config, Method method);

// Noise-free f and selection of the quadratic / l1 benchmark in `config`.
SelectionFunction BenchmarkSelection(const ExperimentConfig& config, BoxConstraint* box_out);

// Mean of the loss column over the last `window` rows.
double SmoothedLoss(const Trace& trace, std::size_t window);
// Population std of the loss column over the final `fraction` of rows.
double TailStd(const Trace& trace, double fraction = 0.1);

struct MethodSummary {
  std::string config_hash;
  double initial_loss = 0.0;
  double final_smoothed_loss = 0.0;
  double tail_std = 0.0;
  double final_residual = 0.0;
  std::optional<double> final_dist;
};

struct Comparison {
  ExperimentConfig ssam_config;
  ExperimentConfig sgd_config;
  RunResult ssam;
  RunResult sgd;
  MethodSummary ssam_summary;
  MethodSummary sgd_summary;
};

MethodSummary Summarize(const ExperimentConfig& config, const RunResult& result);

// Same seed, observations, start and schedule for both methods.
Comparison Compare(const ExperimentConfig& config);

std::string RenderSummary(const Comparison& cmp);

}  // namespace ssam
