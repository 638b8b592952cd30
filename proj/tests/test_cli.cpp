// End-to-end tests of the `ssam` executable.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ssam/data_io.hpp"

namespace ssam {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
};

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::path(::testing::TempDir()) / ("ssam_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Outcome Cli(const std::string& args) {
  const std::string cmd = std::string(SSAM_CLI_PATH) + " " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return o;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(CliRun, RowCountContract) {
  const fs::path dir = Scratch("rows");
  const fs::path out = dir / "t.csv";
  const Outcome o = Cli("run --method ssam --oracle quadratic --iters 1000 --seed 7 --out " + out.string());
  ASSERT_EQ(o.code, 0) << o.out;
  const Trace t = read_trace(out);
  EXPECT_EQ(t.rows.size(), 1000u);
  EXPECT_TRUE(t.has_dist);
}

TEST(CliRun, RepeatedSeedIsByteIdentical) {
  const fs::path dir = Scratch("repeat");
  const std::string common = "run --oracle l1 --sigma 0.1 --delta0 0.2 --iters 2000 --seed 3 --out ";
  ASSERT_EQ(Cli(common + (dir / "a.csv").string()).code, 0);
  ASSERT_EQ(Cli(common + (dir / "b.csv").string()).code, 0);
  EXPECT_EQ(Slurp(dir / "a.csv"), Slurp(dir / "b.csv"));
  EXPECT_FALSE(Slurp(dir / "a.csv").empty());
}

TEST(CliRun, ResolvedConfigIsEchoedAndFlagsOverrideFile) {
  const fs::path dir = Scratch("config");
  ExperimentConfig base;
  base.iters = 50;
  base.seed = 99;
  base.a = 0.5;
  save_config(dir / "in.config", base);
  const fs::path out = dir / "t.csv";
  const Outcome o = Cli("run --config " + (dir / "in.config").string() + " --seed 5 --out " + out.string());
  ASSERT_EQ(o.code, 0) << o.out;
  const ExperimentConfig resolved = load_config(out.string() + ".config");
  EXPECT_EQ(resolved.seed, 5u);
  EXPECT_EQ(resolved.iters, 50u);
  EXPECT_EQ(resolved.a, 0.5);
  EXPECT_NE(o.out.find("seed = 5"), std::string::npos);
  EXPECT_EQ(read_trace(out).rows.size(), 50u);
}

TEST(CliRun, UsageErrorsExitWithOne) {
  const fs::path dir = Scratch("usage");
  EXPECT_EQ(Cli("run --bogus-flag 1").code, 1);
  EXPECT_EQ(Cli("run --a -1 --out " + (dir / "x.csv").string()).code, 1);
  EXPECT_EQ(Cli("run --method adam --out " + (dir / "x.csv").string()).code, 1);
  EXPECT_EQ(Cli("run --iters ten").code, 1);
  EXPECT_EQ(Cli("").code, 1);
  EXPECT_FALSE(fs::exists(dir / "x.csv"));
}

TEST(CliRun, DataErrorsExitWithTwoAndLeaveNoTrace) {
  const fs::path dir = Scratch("data");
  std::ofstream(dir / "bad.csv") << "a,b,quality\n1,2,3\n";
  const Outcome o = Cli("run --oracle relu --data " + (dir / "bad.csv").string() + " --out " +
                        (dir / "t.csv").string());
  EXPECT_EQ(o.code, 2) << o.out;
  EXPECT_NE(o.out.find("delimiter"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "t.csv"));
  EXPECT_EQ(Cli("run --config /nonexistent/cfg --out " + (dir / "t.csv").string()).code, 2);
}

TEST(CliCompare, NoiseFreeQuadraticWritesAllOutputs) {
  const fs::path dir = Scratch("compare");
  const std::string prefix = (dir / "cmp").string();
  const Outcome o = Cli("compare --oracle quadratic --iters 20000 --out " + prefix);
  ASSERT_EQ(o.code, 0) << o.out;
  for (const char* suffix : {".ssam.csv", ".sgd.csv", ".summary.txt", ".ssam.config", ".sgd.config"}) {
    EXPECT_TRUE(fs::exists(prefix + suffix)) << suffix;
  }
  const Trace ssam = read_trace(prefix + ".ssam.csv");
  const Trace sgd = read_trace(prefix + ".sgd.csv");
  EXPECT_LT(ssam.rows.back().residual, 1e-3);
  EXPECT_LT(sgd.rows.back().residual, 1e-3);
  EXPECT_EQ(Slurp(prefix + ".summary.txt"), o.out);
}

TEST(CliValidate, SuiteFilterAndStep) {
  const Outcome o = Cli("validate --suite chain --h 1e-3");
  ASSERT_EQ(o.code, 0) << o.out;
  EXPECT_NE(o.out.find("chain."), std::string::npos);
  EXPECT_EQ(o.out.find("gap."), std::string::npos);
  EXPECT_EQ(o.out.find("dynamics."), std::string::npos);
  EXPECT_NE(o.out.find("all_pass = true"), std::string::npos);
}

TEST(CliValidate, InjectedSignFlipFailsLoudly) {
  const Outcome o = Cli("validate --suite chain --h 1e-3 --inject-sign-flip");
  EXPECT_EQ(o.code, 3);
  EXPECT_NE(o.out.find("FAILED: chain.abs"), std::string::npos) << o.out;
  EXPECT_EQ(Cli("validate --suite nonsense").code, 1);
}

TEST(CliSimulate, EquilibriumStartHasConstantW) {
  const fs::path dir = Scratch("sim_eq");
  const fs::path out = dir / "s.csv";
  const Outcome o = Cli("simulate --oracle quadratic --dim 5 --a 1 --beta 1 --T 5 --h 1e-2 --start solution --out " +
                        out.string());
  ASSERT_EQ(o.code, 0) << o.out;
  const Trace t = read_trace(out);
  ASSERT_EQ(t.rows.size(), 501u);
  // W = a f - eta with a = 1.
  const double w0 = t.rows.front().loss - t.rows.front().eta;
  for (const TraceRow& r : t.rows) {
    EXPECT_NEAR(r.loss - r.eta, w0, 1e-12);
    EXPECT_LE(r.residual, 1e-12);
  }
}

TEST(CliSimulate, QuadraticReachesStationarity) {
  const fs::path dir = Scratch("sim_q");
  const fs::path out = dir / "s.csv";
  const Outcome o = Cli("simulate --oracle quadratic --a 1 --beta 1 --T 50 --h 1e-3 --out " + out.string());
  ASSERT_EQ(o.code, 0) << o.out;
  EXPECT_LE(read_trace(out).rows.back().residual, 1e-3);
  EXPECT_TRUE(fs::exists(out.string() + ".config"));
}

TEST(CliDatagen, WritesLoadableCsv) {
  const fs::path dir = Scratch("datagen");
  const fs::path out = dir / "syn.csv";
  ASSERT_EQ(Cli("datagen --arch 2,4,1 --samples 40 --seed 2 --out " + out.string()).code, 0);
  const Dataset d = load_csv(out);
  EXPECT_EQ(d.samples.size(), 40u);
  EXPECT_EQ(d.n, 4);
  const TeacherData td = synth_teacher({2, 4, 1}, 40, 0.1, 2);
  EXPECT_EQ(d.samples[7].features, td.data.samples[7].features);
  EXPECT_EQ(d.samples[7].target, td.data.samples[7].target);
  EXPECT_EQ(Cli("datagen --arch 2,4,2 --out " + out.string()).code, 1);
}

TEST(CliHelp, DocumentsEveryFlag) {
  const Outcome o = Cli("run --help");
  EXPECT_EQ(o.code, 0);
  for (const char* flag : {"--method", "--oracle", "--data", "--arch", "--a ", "--beta", "--tau0", "--schedule",
                           "--iters", "--seed", "--box", "--batch", "--out", "--config", "--h ", "--T "}) {
    EXPECT_NE(o.out.find(flag), std::string::npos) << flag;
  }
  EXPECT_NE(Cli("validate --help").out.find("--suite"), std::string::npos);
}

}  // namespace
}  // namespace ssam
