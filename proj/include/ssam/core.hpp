// Shared numeric types, the box feasible set, RNG streams and stepsize
// schedules.
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ssam {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Caller passed arguments that violate a documented precondition.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input files or datasets are unreadable or malformed.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws UsageError if any entry is NaN or infinite.
void RequireFinite(const Vector& v, const char* what);
void RequireSameDim(const Vector& a, const Vector& b, const char* what);

// Bound used for coordinates that are conceptually unbounded.
inline constexpr double kUnboundedSentinel = 1e12;

/// Per-coordinate bounds lower <= x <= upper. Unbounded coordinates are
/// represented by +-kUnboundedSentinel so projection stays a plain clamp.
class BoxConstraint {
 public:
  BoxConstraint(Vector lower, Vector upper);

  static BoxConstraint Uniform(int dim, double lower, double upper);
  static BoxConstraint Symmetric(int dim, double half_width) {
    return Uniform(dim, -half_width, half_width);
  }
  static BoxConstraint Unbounded(int dim, double sentinel = kUnboundedSentinel) {
    return Uniform(dim, -sentinel, sentinel);
  }

  int dim() const { return static_cast<int>(lower_.size()); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  Vector Project(const Vector& x) const;
  bool Contains(const Vector& x, double tol = 0.0) const;

 private:
  Vector lower_;
  Vector upper_;
};

// Euclidean projection onto the box (coordinate-wise clamp).
Vector project_box(const Vector& x, const BoxConstraint& box);

/// Deterministic random stream. Independent streams are derived from one
/// master seed and a stream id, so replicas never share state.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  double Normal() { return normal_(engine_); }
  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::size_t Index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  Vector NormalVector(int dim);
  Vector UniformVector(int dim, double lo, double hi);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

enum class ScheduleKind { kHarmonic, kConstantThenDecay, kUserTable };

/// Stepsize law tau_k. Every emitted value is clipped into (0, min(1, 1/a)].
///
///   harmonic:      tau0 / (1 + decay * k / horizon)
///   constant-then-decay: tau0 for k < hold, then tau0 * (hold / k)^power
///   user-table:          table[k], the last entry repeated past the end
class StepSchedule {
 public:
  static StepSchedule Harmonic(double tau0, double horizon, double a, double decay = 5.0);
  static StepSchedule ConstantThenDecay(double tau0, double hold, double power, double a);
  static StepSchedule Constant(double tau0, double a);
  static StepSchedule UserTable(std::vector<double> table, double a);

  double tau(std::uint64_t k) const;
  double cap() const;

  ScheduleKind kind() const { return kind_; }
  double tau0() const { return tau0_; }
  double horizon() const { return horizon_; }
  double decay() const { return decay_; }
  double hold() const { return hold_; }
  double power() const { return power_; }
  double a() const { return a_; }
  const std::vector<double>& table() const { return table_; }

 private:
  StepSchedule() = default;

  ScheduleKind kind_ = ScheduleKind::kHarmonic;
  double tau0_ = 0.03;
  double horizon_ = 500000.0;
  double decay_ = 5.0;
  double hold_ = 0.0;
  double power_ = 1.0;
  double a_ = 1.0;
  std::vector<double> table_;
};

double tau(const StepSchedule& schedule, std::uint64_t k);

enum class Z0Policy { kFirstSubgradient, kZero };

struct AlgoParams {
  double a = 0.1;     // averaging rate
  double beta = 1.0;  // proximal coefficient of the direction subproblem
  StepSchedule schedule = StepSchedule::Harmonic(0.03, 500000.0, 0.1);
  std::uint64_t seed = 0;
  Z0Policy z0 = Z0Policy::kFirstSubgradient;

  void Validate() const;
};

}  // namespace ssam
