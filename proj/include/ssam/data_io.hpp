// Dataset ingestion, synthetic teacher data, and the trace / config text
// formats.
//
// Trace file: comma-delimited, header `k,t,loss,eta,residual,step_norm`
// plus `,dist` when distances are recorded; reals printed with 17
// significant digits so a read recovers every double bit-exactly.
//
// Config file: one `key = value` per line; `#` starts a comment line.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ssam/core.hpp"
#include "ssam/optimizer.hpp"
#include "ssam/relu_net.hpp"

namespace ssam {

struct Dataset {
  std::vector<Sample> samples;
  int n = 0;
  int m = 0;
  std::vector<std::string> feature_names;
  std::string target_name;
  // Per-feature mean and std applied by standardize(); empty when raw.
  Vector mean;
  Vector stdev;

  bool standardized() const { return mean.size() > 0; }
};

// `target` names the target column, or gives its 0-based index; empty picks
// `quality` when present, else the last column.
Dataset load_csv(const std::filesystem::path& path, char delimiter = ';',
                 const std::string& target = "");

// Population mean 0 and std 1 per feature; zero-variance features are only
// centered. Targets are untouched.
Dataset standardize(const Dataset& data);
Dataset destandardize(const Dataset& data);

struct TeacherData {
  Dataset data;
  NetParams teacher;
  double loss_floor = 0.0;  // m * noise_std^2 / 2
};

// Teacher weights i.i.d. N(0, 1/n), features standard normal, targets the
// teacher output plus N(0, noise_std^2) noise.
TeacherData synth_teacher(const NetArch& arch, int n_samples, double noise_std,
                          std::uint64_t seed);

std::string FormatDouble(double v);
double ParseDouble(const std::string& text, const std::string& context);

void write_trace(const std::filesystem::path& path, const Trace& trace);
Trace read_trace(const std::filesystem::path& path);
void WriteTraceStream(std::ostream& os, const Trace& trace);
Trace ReadTraceStream(std::istream& is, const std::string& source);

struct ExperimentConfig {
  std::string method = "ssam";
  std::string oracle = "quadratic";  // quadratic | l1 | relu
  std::string data = "synthetic";    // synthetic or a CSV path (relu oracle)
  NetArch arch{2, 11, 1};
  double a = 0.1;
  double beta = 2.0;
  double tau0 = 0.03;
  std::string schedule = "harmonic";  // harmonic | constant
  double horizon = 0.0;               // N in the harmonic law; 0 means iters
  double decay = 5.0;
  std::uint64_t iters = 50000;
  std::uint64_t seed = 0;
  double box = kDefaultWeightBox;
  int batch = 1;
  int dim = 10;
  double sigma = 0.0;
  double delta0 = 0.0;
  double rho = 1.0;
  int samples = 2000;
  double teacher_noise = 0.1;
  int eval_size = 256;
  bool standardize = true;
  std::string z0 = "zero";  // zero | first
  double T = 50.0;
  double h = 1e-3;

  void Validate() const;
  StepSchedule Schedule() const;
  AlgoParams Params() const;
  bool operator==(const ExperimentConfig&) const = default;
};

std::string render_config(const ExperimentConfig& config);
ExperimentConfig parse_config(const std::string& text);
// Applies one key/value pair; throws UsageError for unknown keys or bad values.
void SetConfigValue(ExperimentConfig& config, const std::string& key, const std::string& value);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& config);

// 64-bit FNV-1a of the rendered config, as 16 hex digits.
std::string ConfigHash(const ExperimentConfig& config);

// Writes through a temporary sibling and renames, so a failed write never
// leaves a partial file at `path`.
void AtomicWrite(const std::filesystem::path& path, const std::string& contents);

}  // namespace ssam
