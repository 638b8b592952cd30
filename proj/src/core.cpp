#include "ssam/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ssam {

void RequireFinite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw UsageError(std::string(what) + ": non-finite entry");
  }
}

void RequireSameDim(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw UsageError(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()) + ")");
  }
}

BoxConstraint::BoxConstraint(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() < 1) throw UsageError("BoxConstraint: dimension must be >= 1");
  RequireSameDim(lower_, upper_, "BoxConstraint");
  RequireFinite(lower_, "BoxConstraint lower");
  RequireFinite(upper_, "BoxConstraint upper");
  if ((lower_.array() > upper_.array()).any()) {
    throw UsageError("BoxConstraint: lower bound exceeds upper bound");
  }
}

BoxConstraint BoxConstraint::Uniform(int dim, double lower, double upper) {
  if (dim < 1) throw UsageError("BoxConstraint: dimension must be >= 1");
  return BoxConstraint(Vector::Constant(dim, lower), Vector::Constant(dim, upper));
}

Vector BoxConstraint::Project(const Vector& x) const {
  RequireSameDim(x, lower_, "project_box");
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

bool BoxConstraint::Contains(const Vector& x, double tol) const {
  if (x.size() != lower_.size()) return false;
  return ((x.array() >= lower_.array() - tol) && (x.array() <= upper_.array() + tol)).all();
}

Vector project_box(const Vector& x, const BoxConstraint& box) { return box.Project(x); }

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

Vector RngStream::NormalVector(int dim) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Normal();
  return v;
}

Vector RngStream::UniformVector(int dim, double lo, double hi) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = Uniform(lo, hi);
  return v;
}

namespace {

void RequirePositive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw UsageError(std::string(what) + " must be a positive finite number");
  }
}

}  // namespace

StepSchedule StepSchedule::Harmonic(double tau0, double horizon, double a, double decay) {
  RequirePositive(tau0, "tau0");
  RequirePositive(horizon, "schedule horizon");
  RequirePositive(a, "a");
  if (!(decay >= 0.0)) throw UsageError("schedule decay must be >= 0");
  StepSchedule s;
  s.kind_ = ScheduleKind::kHarmonic;
  s.tau0_ = tau0;
  s.horizon_ = horizon;
  s.decay_ = decay;
  s.a_ = a;
  return s;
}

StepSchedule StepSchedule::ConstantThenDecay(double tau0, double hold, double power, double a) {
  RequirePositive(tau0, "tau0");
  RequirePositive(a, "a");
  if (!(hold >= 1.0)) throw UsageError("schedule hold must be >= 1");
  if (!(power >= 0.0)) throw UsageError("schedule power must be >= 0");
  StepSchedule s;
  s.kind_ = ScheduleKind::kConstantThenDecay;
  s.tau0_ = tau0;
  s.hold_ = hold;
  s.power_ = power;
  s.a_ = a;
  return s;
}

StepSchedule StepSchedule::Constant(double tau0, double a) {
  return ConstantThenDecay(tau0, std::numeric_limits<double>::infinity(), 1.0, a);
}

StepSchedule StepSchedule::UserTable(std::vector<double> table, double a) {
  RequirePositive(a, "a");
  if (table.empty()) throw UsageError("schedule table must not be empty");
  for (double v : table) {
    if (!std::isfinite(v)) throw UsageError("schedule table entries must be finite");
  }
  StepSchedule s;
  s.kind_ = ScheduleKind::kUserTable;
  s.tau0_ = table.front();
  s.a_ = a;
  s.table_ = std::move(table);
  return s;
}

double StepSchedule::cap() const { return std::min(1.0, 1.0 / a_); }

double StepSchedule::tau(std::uint64_t k) const {
  const double kd = static_cast<double>(k);
  double raw = tau0_;
  switch (kind_) {
    case ScheduleKind::kHarmonic:
      raw = tau0_ / (1.0 + decay_ * kd / horizon_);
      break;
    case ScheduleKind::kConstantThenDecay:
      raw = kd < hold_ ? tau0_ : tau0_ * std::pow(hold_ / kd, power_);
      break;
    case ScheduleKind::kUserTable:
      raw = table_[std::min<std::uint64_t>(k, table_.size() - 1)];
      break;
  }
  return std::clamp(raw, std::numeric_limits<double>::min(), cap());
}

double tau(const StepSchedule& schedule, std::uint64_t k) { return schedule.tau(k); }

void AlgoParams::Validate() const {
  RequirePositive(a, "a");
  RequirePositive(beta, "beta");
  if (schedule.a() != a) {
    throw UsageError("schedule was built for a different averaging rate a");
  }
}

}  // namespace ssam
