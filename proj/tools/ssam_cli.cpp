// ssam: run, compare and validate the averaged stochastic subgradient method.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 validation failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssam/data_io.hpp"
#include "ssam/dynamics.hpp"
#include "ssam/experiment.hpp"
#include "ssam/validate.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitValidation = 3;

// Flag name -> config key. Values stay strings until SetConfigValue parses
// them, so flags and config files share one validation path.
struct ConfigFlags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;
  std::string start = "origin";

  void Add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    options[key] = app->add_option(flag, values[key], help);
  }

  ssam::ExperimentConfig Resolve(const ssam::ExperimentConfig& defaults) const {
    ssam::ExperimentConfig cfg = config_path.empty() ? defaults : ssam::load_config(config_path);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) ssam::SetConfigValue(cfg, key, values.at(key));
    }
    cfg.Validate();
    return cfg;
  }
};

void AddExperimentFlags(CLI::App* app, ConfigFlags& f) {
  app->set_help_flag("--help", "print this help and exit");
  app->add_option("--config", f.config_path, "key = value config file; flags override it");
  f.Add(app, "--method", "method", "ssam | sgd (default ssam)");
  f.Add(app, "--oracle", "oracle", "quadratic | l1 | relu (default quadratic)");
  f.Add(app, "--data", "data", "relu data: 'synthetic' or a CSV path (default synthetic)");
  f.Add(app, "--arch", "arch", "network L,n,m (default 2,11,1)");
  f.Add(app, "--a", "a", "averaging rate a (default 0.1)");
  f.Add(app, "--beta", "beta", "proximal coefficient beta (default 2)");
  f.Add(app, "--tau0", "tau0", "initial stepsize (default 0.03)");
  f.Add(app, "--schedule", "schedule",
        "harmonic: tau0/(1+decay*k/horizon) | constant (default harmonic)");
  f.Add(app, "--horizon", "horizon", "N of the harmonic law; 0 uses --iters (default 0)");
  f.Add(app, "--decay", "decay", "decay factor of the harmonic law (default 5)");
  f.Add(app, "--iters", "iters", "iterations (default 50000)");
  f.Add(app, "--seed", "seed", "master seed (default 0)");
  f.Add(app, "--box", "box", "weight box half-width for relu (default 10)");
  f.Add(app, "--batch", "batch", "minibatch size (default 1)");
  f.Add(app, "--dim", "dim", "dimension of the quadratic / l1 benchmarks (default 10)");
  f.Add(app, "--sigma", "sigma", "std of the zero-mean observation noise (default 0)");
  f.Add(app, "--delta0", "delta0", "magnitude of the decaying bias (default 0)");
  f.Add(app, "--rho", "rho", "bias decay exponent (default 1)");
  f.Add(app, "--samples", "samples", "synthetic teacher sample count (default 2000)");
  f.Add(app, "--teacher-noise", "teacher_noise", "synthetic target noise std (default 0.1)");
  f.Add(app, "--eval-size", "eval_size",
        "relu: fixed evaluation subset for the loss column; 0 = minibatch loss (default 256)");
  f.Add(app, "--standardize", "standardize", "standardize CSV features: true | false (default true)");
  f.Add(app, "--z0", "z0", "initial direction: zero | first observed subgradient (default zero)");
  f.Add(app, "--T", "T", "simulate: horizon (default 50)");
  f.Add(app, "--h", "h", "simulate: Euler step (default 1e-3)");
}

std::string PathWithSuffix(const std::string& base, const std::string& suffix) {
  return base + suffix;
}

int CmdRun(const ConfigFlags& flags, const std::string& out) {
  const ssam::ExperimentConfig cfg = flags.Resolve(ssam::ExperimentConfig{});
  const ssam::RunResult res = ssam::RunExperiment(cfg, ssam::ParseMethod(cfg.method));
  ssam::write_trace(out, res.trace);
  ssam::save_config(PathWithSuffix(out, ".config"), cfg);
  std::cout << ssam::render_config(cfg);
  const ssam::TraceRow& last = res.trace.rows.back();
  std::cout << "# rows = " << res.trace.rows.size() << "\n# final_residual = "
            << ssam::FormatDouble(last.residual) << "\n# trace = " << out << '\n';
  return 0;
}

int CmdCompare(const ConfigFlags& flags, const std::string& prefix) {
  const ssam::ExperimentConfig cfg = flags.Resolve(ssam::ExperimentConfig{});
  const ssam::Comparison cmp = ssam::Compare(cfg);
  ssam::write_trace(prefix + ".ssam.csv", cmp.ssam.trace);
  ssam::write_trace(prefix + ".sgd.csv", cmp.sgd.trace);
  ssam::save_config(prefix + ".ssam.config", cmp.ssam_config);
  ssam::save_config(prefix + ".sgd.config", cmp.sgd_config);
  const std::string summary = ssam::RenderSummary(cmp);
  ssam::AtomicWrite(prefix + ".summary.txt", summary);
  std::cout << summary;
  return 0;
}

int CmdSimulate(const ConfigFlags& flags, const std::string& out) {
  ssam::ExperimentConfig cfg = flags.Resolve(ssam::ExperimentConfig{});
  ssam::BoxConstraint box = ssam::BoxConstraint::Symmetric(cfg.dim, 1.0);
  const ssam::SelectionFunction fn = ssam::BenchmarkSelection(cfg, &box);
  ssam::Vector x0 = ssam::Vector::Zero(cfg.dim);
  ssam::Vector z0 = ssam::Vector::Zero(cfg.dim);
  if (flags.start == "solution") {
    ssam::Experiment e = ssam::BuildExperiment(cfg);
    x0 = *e.solution;
    z0 = fn.g(x0);
  } else if (flags.start != "origin") {
    throw ssam::UsageError("--start must be origin or solution");
  } else if (cfg.z0 == "first") {
    z0 = fn.g(x0);
  }
  const ssam::Integration integ = ssam::integrate(x0, z0, fn, {cfg.a, cfg.beta, cfg.h}, box, cfg.T);
  ssam::write_trace(out, ssam::ToTrace(integ.readings, cfg.h));
  ssam::save_config(PathWithSuffix(out, ".config"), cfg);
  std::cout << ssam::render_config(cfg);
  std::cout << "# start = " << flags.start << '\n'
            << "# W_change = " << ssam::FormatDouble(integ.descent.total_change) << '\n'
            << "# dissipation = " << ssam::FormatDouble(integ.descent.dissipation) << '\n'
            << "# max_violation = " << ssam::FormatDouble(integ.descent.max_violation) << '\n'
            << "# final_residual = " << ssam::FormatDouble(integ.readings.back().speed) << '\n';
  return 0;
}

int CmdValidate(ssam::ValidationOptions opts, const std::string& out) {
  const ssam::ValidationReport report = ssam::RunValidation(opts);
  const std::string text = report.Render();
  std::cout << text;
  if (!out.empty()) ssam::AtomicWrite(out, text);
  if (!report.all_pass()) {
    for (const ssam::Check& c : report.checks) {
      if (!c.pass) std::cerr << "FAILED: " << c.suite << '.' << c.name << '\n';
    }
    return kExitValidation;
  }
  return 0;
}

int CmdDatagen(const std::string& arch_text, int samples, double noise, std::uint64_t seed,
               const std::string& out) {
  ssam::ExperimentConfig tmp;
  ssam::SetConfigValue(tmp, "arch", arch_text);
  tmp.arch.Validate();
  if (tmp.arch.m != 1) throw ssam::UsageError("datagen writes a single target column (m = 1)");
  const ssam::TeacherData td = ssam::synth_teacher(tmp.arch, samples, noise, seed);
  std::ostringstream os;
  for (const std::string& name : td.data.feature_names) os << '"' << name << "\";";
  os << '"' << td.data.target_name << "\"\n";
  for (const ssam::Sample& s : td.data.samples) {
    for (Eigen::Index i = 0; i < s.features.size(); ++i) os << ssam::FormatDouble(s.features[i]) << ';';
    os << ssam::FormatDouble(s.target[0]) << '\n';
  }
  ssam::AtomicWrite(out, os.str());
  std::cout << "# samples = " << samples << "\n# loss_floor = " << ssam::FormatDouble(td.loss_floor)
            << "\n# data = " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Averaged stochastic subgradient method: experiments and validation"};
  app.require_subcommand(1);

  ConfigFlags run_flags, cmp_flags, sim_flags;
  std::string run_out = "trace.csv", cmp_out = "compare", sim_out = "simulate.csv";

  CLI::App* run = app.add_subcommand("run", "one optimizer run; writes a trace and its config");
  AddExperimentFlags(run, run_flags);
  run->add_option("--out", run_out, "trace path; config goes to <out>.config (default trace.csv)");

  CLI::App* cmp = app.add_subcommand("compare", "paired ssam vs sgd runs with a summary");
  AddExperimentFlags(cmp, cmp_flags);
  cmp->add_option("--out", cmp_out,
                  "prefix for <out>.ssam.csv, <out>.sgd.csv, configs and <out>.summary.txt "
                  "(default compare)");

  CLI::App* sim = app.add_subcommand("simulate", "Euler integration of the limiting dynamics");
  AddExperimentFlags(sim, sim_flags);
  sim->add_option("--out", sim_out, "trace path (default simulate.csv)");
  sim->add_option("--start", sim_flags.start,
                  "origin (x0 = 0) | solution (equilibrium at the exact minimizer) (default origin)");

  ssam::ValidationOptions vopts;
  std::vector<std::string> suites;
  std::string val_out;
  CLI::App* val = app.add_subcommand("validate", "gap, chain-rule, subgradient and dynamics suites");
  val->set_help_flag("--help", "print this help and exit");
  val->add_option("--suite", suites, "suites to run: gap chain subgrad dynamics (default all)")
      ->delimiter(',');
  val->add_option("--h", vopts.h, "chain-rule quadrature step (default 1e-4)")
      ->check(CLI::PositiveNumber);
  val->add_option("--seed", vopts.seed, "seed for random instances (default 20191216)");
  val->add_option("--out", val_out, "also write the report to this path");
  val->add_flag("--inject-sign-flip", vopts.inject_sign_flip,
                "test hook: flip the sign of the |x| selection (the chain suite must fail)");

  std::string dg_arch = "2,11,1", dg_out = "synthetic.csv";
  int dg_samples = 2000;
  double dg_noise = 0.1;
  std::uint64_t dg_seed = 0;
  CLI::App* dg = app.add_subcommand("datagen", "write a synthetic teacher dataset as CSV");
  dg->add_option("--arch", dg_arch, "teacher L,n,m with m = 1 (default 2,11,1)");
  dg->add_option("--samples", dg_samples, "rows (default 2000)")->check(CLI::PositiveNumber);
  dg->add_option("--teacher-noise", dg_noise, "target noise std (default 0.1)");
  dg->add_option("--seed", dg_seed, "seed (default 0)");
  dg->add_option("--out", dg_out, "output CSV path (default synthetic.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return CmdRun(run_flags, run_out);
    if (*cmp) return CmdCompare(cmp_flags, cmp_out);
    if (*sim) return CmdSimulate(sim_flags, sim_out);
    if (*val) {
      vopts.suites = suites;
      return CmdValidate(vopts, val_out);
    }
    if (*dg) return CmdDatagen(dg_arch, dg_samples, dg_noise, dg_seed, dg_out);
  } catch (const ssam::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ssam::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
