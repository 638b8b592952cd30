#include "ssam/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ssam {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string Unquote(const std::string& s) {
  std::string t = Trim(s);
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = t.substr(1, t.size() - 2);
  return t;
}

std::vector<std::string> Split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool TryParseDouble(const std::string& text, double& out) {
  const std::string t = Trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

}  // namespace

double ParseDouble(const std::string& text, const std::string& context) {
  double v = 0.0;
  if (!TryParseDouble(text, v)) throw DataError(context + ": not a number: '" + text + "'");
  return v;
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Dataset load_csv(const std::filesystem::path& path, char delimiter, const std::string& target) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  const std::string where = path.string();

  std::string line;
  long lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!Trim(line).empty()) {
      for (const std::string& h : Split(line, delimiter)) header.push_back(Unquote(h));
      break;
    }
  }
  if (header.empty()) throw DataError(where + ": missing header row");
  if (header.size() < 2) {
    throw DataError(where + ": header has a single column; check the delimiter (expected '" +
                    std::string(1, delimiter) + "')");
  }

  std::size_t tcol = header.size() - 1;
  if (target.empty()) {
    const auto it = std::find(header.begin(), header.end(), "quality");
    if (it != header.end()) tcol = static_cast<std::size_t>(it - header.begin());
  } else {
    const auto it = std::find(header.begin(), header.end(), target);
    std::size_t idx = 0;
    const auto [p, ec] = std::from_chars(target.data(), target.data() + target.size(), idx);
    if (it != header.end()) {
      tcol = static_cast<std::size_t>(it - header.begin());
    } else if (ec == std::errc() && p == target.data() + target.size() && idx < header.size()) {
      tcol = idx;
    } else {
      throw DataError(where + ": target column '" + target + "' not found");
    }
  }

  Dataset ds;
  ds.n = static_cast<int>(header.size()) - 1;
  ds.m = 1;
  ds.target_name = header[tcol];
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != tcol) ds.feature_names.push_back(header[c]);
  }

  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    const std::vector<std::string> fields = Split(line, delimiter);
    if (fields.size() != header.size()) {
      throw DataError(where + " line " + std::to_string(lineno) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    Sample s;
    s.features.resize(ds.n);
    s.target.resize(1);
    int f = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      if (!TryParseDouble(Unquote(fields[c]), v) || !std::isfinite(v)) {
        throw DataError(where + " line " + std::to_string(lineno) + ": column '" + header[c] +
                        "' is not numeric: '" + Trim(fields[c]) + "'");
      }
      if (c == tcol) {
        s.target[0] = v;
      } else {
        s.features[f++] = v;
      }
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

Dataset standardize(const Dataset& data) {
  if (data.samples.empty()) throw UsageError("standardize: empty dataset");
  if (data.standardized()) return data;
  const double count = static_cast<double>(data.samples.size());
  Vector mean = Vector::Zero(data.n);
  for (const Sample& s : data.samples) mean += s.features;
  mean /= count;
  Vector var = Vector::Zero(data.n);
  for (const Sample& s : data.samples) var += (s.features - mean).cwiseAbs2();
  Vector stdev = (var / count).cwiseSqrt();

  Dataset out = data;
  for (Sample& s : out.samples) {
    for (int i = 0; i < data.n; ++i) {
      s.features[i] -= mean[i];
      if (stdev[i] > 0.0) s.features[i] /= stdev[i];
    }
  }
  out.mean = std::move(mean);
  out.stdev = std::move(stdev);
  return out;
}

Dataset destandardize(const Dataset& data) {
  if (!data.standardized()) return data;
  Dataset out = data;
  for (Sample& s : out.samples) {
    for (int i = 0; i < data.n; ++i) {
      if (data.stdev[i] > 0.0) s.features[i] *= data.stdev[i];
      s.features[i] += data.mean[i];
    }
  }
  out.mean.resize(0);
  out.stdev.resize(0);
  return out;
}

TeacherData synth_teacher(const NetArch& arch, int n_samples, double noise_std,
                          std::uint64_t seed) {
  arch.Validate();
  if (n_samples < 1) throw UsageError("synth_teacher: n_samples must be >= 1");
  if (!(noise_std >= 0.0)) throw UsageError("synth_teacher: noise_std must be >= 0");
  RngStream weights_rng(seed, 0x7e);
  RngStream data_rng(seed, 0xda);

  TeacherData out;
  out.teacher = NetParams::Zeros(arch);
  const double scale = 1.0 / std::sqrt(static_cast<double>(arch.n));
  for (Matrix& W : out.teacher.layers) {
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = scale * weights_rng.Normal();
    }
  }
  out.data.n = arch.n;
  out.data.m = arch.m;
  for (int i = 0; i < arch.n; ++i) out.data.feature_names.push_back("x" + std::to_string(i));
  out.data.target_name = "y";
  out.data.samples.reserve(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    Sample s;
    s.features = data_rng.NormalVector(arch.n);
    s.target = Vector::Zero(arch.m);
    s.target = forward(s, out.teacher).y;
    for (int j = 0; j < arch.m; ++j) s.target[j] += noise_std * data_rng.Normal();
    out.data.samples.push_back(std::move(s));
  }
  out.loss_floor = 0.5 * arch.m * noise_std * noise_std;
  return out;
}

void WriteTraceStream(std::ostream& os, const Trace& trace) {
  os << "k,t,loss,eta,residual,step_norm" << (trace.has_dist ? ",dist" : "") << '\n';
  char buf[256];
  for (const TraceRow& r : trace.rows) {
    int len = std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g,%.17g,%.17g",
                            static_cast<unsigned long long>(r.k), r.t, r.loss, r.eta, r.residual,
                            r.step_norm);
    os.write(buf, len);
    if (trace.has_dist) {
      len = std::snprintf(buf, sizeof buf, ",%.17g", r.dist.value_or(std::nan("")));
      os.write(buf, len);
    }
    os.put('\n');
  }
}

Trace ReadTraceStream(std::istream& is, const std::string& source) {
  std::string line;
  if (!std::getline(is, line)) throw DataError(source + ": empty trace file");
  Trace tr;
  const std::string header = Trim(line);
  if (header == "k,t,loss,eta,residual,step_norm,dist") {
    tr.has_dist = true;
  } else if (header != "k,t,loss,eta,residual,step_norm") {
    throw DataError(source + ": unrecognized trace header '" + header + "'");
  }
  const std::size_t ncol = tr.has_dist ? 7 : 6;
  long lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    const std::vector<std::string> f = Split(line, ',');
    const std::string ctx = source + " line " + std::to_string(lineno);
    if (f.size() != ncol) throw DataError(ctx + ": expected " + std::to_string(ncol) + " fields");
    TraceRow r;
    unsigned long long k = 0;
    const std::string kf = Trim(f[0]);
    const auto [p, ec] = std::from_chars(kf.data(), kf.data() + kf.size(), k);
    if (ec != std::errc() || p != kf.data() + kf.size()) throw DataError(ctx + ": bad k");
    r.k = k;
    r.t = ParseDouble(f[1], ctx);
    r.loss = ParseDouble(f[2], ctx);
    r.eta = ParseDouble(f[3], ctx);
    r.residual = ParseDouble(f[4], ctx);
    r.step_norm = ParseDouble(f[5], ctx);
    if (tr.has_dist) r.dist = ParseDouble(f[6], ctx);
    tr.rows.push_back(r);
  }
  return tr;
}

void AtomicWrite(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << contents;
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw DataError("write failed for '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError("cannot write '" + path.string() + "': " + ec.message());
  }
}

void write_trace(const std::filesystem::path& path, const Trace& trace) {
  std::ostringstream os;
  WriteTraceStream(os, trace);
  AtomicWrite(path, os.str());
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trace '" + path.string() + "'");
  return ReadTraceStream(in, path.string());
}

void ExperimentConfig::Validate() const {
  if (method != "ssam" && method != "sgd") throw UsageError("method must be ssam or sgd");
  if (oracle != "quadratic" && oracle != "l1" && oracle != "relu") {
    throw UsageError("oracle must be quadratic, l1 or relu");
  }
  if (schedule != "harmonic" && schedule != "constant") {
    throw UsageError("schedule must be harmonic or constant");
  }
  if (z0 != "first" && z0 != "zero") throw UsageError("z0 must be first or zero");
  arch.Validate();
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw UsageError(std::string(what) + " must be positive");
  };
  positive(a, "a");
  positive(beta, "beta");
  positive(tau0, "tau0");
  positive(box, "box");
  positive(T, "T");
  positive(h, "h");
  if (!(horizon >= 0.0)) throw UsageError("horizon must be >= 0");
  if (!(decay >= 0.0)) throw UsageError("decay must be >= 0");
  if (iters < 1) throw UsageError("iters must be >= 1");
  if (batch < 1) throw UsageError("batch must be >= 1");
  if (dim < 2) throw UsageError("dim must be >= 2");
  if (samples < 1) throw UsageError("samples must be >= 1");
  if (eval_size < 0) throw UsageError("eval_size must be >= 0");
  if (!(teacher_noise >= 0.0)) throw UsageError("teacher_noise must be >= 0");
  NoiseSpec{sigma, delta0, rho}.Validate();
}

StepSchedule ExperimentConfig::Schedule() const {
  if (schedule == "constant") return StepSchedule::Constant(tau0, a);
  const double n = horizon > 0.0 ? horizon : static_cast<double>(iters);
  return StepSchedule::Harmonic(tau0, n, a, decay);
}

AlgoParams ExperimentConfig::Params() const {
  AlgoParams p;
  p.a = a;
  p.beta = beta;
  p.schedule = Schedule();
  p.seed = seed;
  p.z0 = z0 == "zero" ? Z0Policy::kZero : Z0Policy::kFirstSubgradient;
  return p;
}

std::string render_config(const ExperimentConfig& c) {
  std::ostringstream os;
  auto kv = [&os](const char* key, const std::string& value) {
    os << key << " = " << value << '\n';
  };
  kv("method", c.method);
  kv("oracle", c.oracle);
  kv("data", c.data);
  kv("arch", std::to_string(c.arch.L) + "," + std::to_string(c.arch.n) + "," +
                 std::to_string(c.arch.m));
  kv("a", FormatDouble(c.a));
  kv("beta", FormatDouble(c.beta));
  kv("tau0", FormatDouble(c.tau0));
  kv("schedule", c.schedule);
  kv("horizon", FormatDouble(c.horizon));
  kv("decay", FormatDouble(c.decay));
  kv("iters", std::to_string(c.iters));
  kv("seed", std::to_string(c.seed));
  kv("box", FormatDouble(c.box));
  kv("batch", std::to_string(c.batch));
  kv("dim", std::to_string(c.dim));
  kv("sigma", FormatDouble(c.sigma));
  kv("delta0", FormatDouble(c.delta0));
  kv("rho", FormatDouble(c.rho));
  kv("samples", std::to_string(c.samples));
  kv("teacher_noise", FormatDouble(c.teacher_noise));
  kv("eval_size", std::to_string(c.eval_size));
  kv("standardize", c.standardize ? "true" : "false");
  kv("z0", c.z0);
  kv("T", FormatDouble(c.T));
  kv("h", FormatDouble(c.h));
  return os.str();
}

namespace {

template <typename Int>
Int ParseInt(const std::string& key, const std::string& value) {
  Int v{};
  const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size()) {
    throw UsageError("config '" + key + "': not an integer: '" + value + "'");
  }
  return v;
}

double ParseReal(const std::string& key, const std::string& value) {
  double v = 0.0;
  if (!TryParseDouble(value, v)) throw UsageError("config '" + key + "': not a number: '" + value + "'");
  return v;
}

}  // namespace

void SetConfigValue(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = Trim(raw);
  if (key == "method") c.method = v;
  else if (key == "oracle") c.oracle = v;
  else if (key == "data") c.data = v;
  else if (key == "arch") {
    const std::vector<std::string> parts = Split(v, ',');
    if (parts.size() != 3) throw UsageError("config 'arch': expected L,n,m");
    c.arch = {ParseInt<int>(key, Trim(parts[0])), ParseInt<int>(key, Trim(parts[1])),
              ParseInt<int>(key, Trim(parts[2]))};
  }
  else if (key == "a") c.a = ParseReal(key, v);
  else if (key == "beta") c.beta = ParseReal(key, v);
  else if (key == "tau0") c.tau0 = ParseReal(key, v);
  else if (key == "schedule") c.schedule = v;
  else if (key == "horizon") c.horizon = ParseReal(key, v);
  else if (key == "decay") c.decay = ParseReal(key, v);
  else if (key == "iters") c.iters = ParseInt<std::uint64_t>(key, v);
  else if (key == "seed") c.seed = ParseInt<std::uint64_t>(key, v);
  else if (key == "box") c.box = ParseReal(key, v);
  else if (key == "batch") c.batch = ParseInt<int>(key, v);
  else if (key == "dim") c.dim = ParseInt<int>(key, v);
  else if (key == "sigma") c.sigma = ParseReal(key, v);
  else if (key == "delta0") c.delta0 = ParseReal(key, v);
  else if (key == "rho") c.rho = ParseReal(key, v);
  else if (key == "samples") c.samples = ParseInt<int>(key, v);
  else if (key == "teacher_noise") c.teacher_noise = ParseReal(key, v);
  else if (key == "eval_size") c.eval_size = ParseInt<int>(key, v);
  else if (key == "standardize") {
    if (v != "true" && v != "false") throw UsageError("config 'standardize': expected true or false");
    c.standardize = v == "true";
  }
  else if (key == "z0") c.z0 = v;
  else if (key == "T") c.T = ParseReal(key, v);
  else if (key == "h") c.h = ParseReal(key, v);
  else throw UsageError("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    SetConfigValue(c, Trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& config) {
  AtomicWrite(path, render_config(config));
}

std::string ConfigHash(const ExperimentConfig& config) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : render_config(config)) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace ssam
