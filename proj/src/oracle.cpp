#include "ssam/oracle.hpp"

#include <cmath>
#include <string>

namespace ssam {

void NoiseSpec::Validate() const {
  if (!(sigma_e >= 0.0) || !std::isfinite(sigma_e)) throw UsageError("noise sigma_e must be >= 0");
  if (!(delta0 >= 0.0) || !std::isfinite(delta0)) throw UsageError("noise delta0 must be >= 0");
  if (!(rho > 0.0)) throw UsageError("noise decay rho must be > 0");
}

QuadraticOracle::QuadraticOracle(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() != b_.size()) throw UsageError("quadratic_oracle: A rows must match b");
  if (A_.cols() < 1) throw UsageError("quadratic_oracle: A needs at least one column");
  if (!A_.allFinite()) throw UsageError("quadratic_oracle: A has non-finite entries");
  RequireFinite(b_, "quadratic_oracle b");
}

Vector QuadraticOracle::Gradient(const Vector& x) const {
  return A_.transpose() * (A_ * x - b_);
}

SubgradientEstimate QuadraticOracle::Query(const Vector& x, RngStream& /*rng*/) {
  SubgradientEstimate est;
  est.g = Gradient(x);
  est.f_estimate = 0.5 * (A_ * x - b_).squaredNorm();
  est.true_part = est.g;
  return est;
}

std::optional<double> QuadraticOracle::Value(const Vector& x) const {
  return 0.5 * (A_ * x - b_).squaredNorm();
}

std::optional<Vector> QuadraticOracle::ExactSolution(const BoxConstraint& box) const {
  Eigen::ColPivHouseholderQR<Matrix> qr(A_);
  if (qr.rank() < A_.cols()) {
    throw UsageError("quadratic_oracle: A is rank deficient, the minimizer is not unique");
  }
  if (box.dim() != dimension()) throw UsageError("quadratic_oracle: box dimension mismatch");

  // Projected gradient with step 1/L; linear convergence since A has full
  // column rank.
  const Matrix H = A_.transpose() * A_;
  const Vector c = A_.transpose() * b_;
  const double lipschitz = Eigen::SelfAdjointEigenSolver<Matrix>(H).eigenvalues().maxCoeff();
  Vector x = box.Project(qr.solve(b_));
  for (int it = 0; it < 10'000'000; ++it) {
    const Vector next = box.Project(x - (H * x - c) / lipschitz);
    const double step = (next - x).norm();
    x = next;
    if (step <= 1e-15 * std::max(1.0, x.norm())) break;
  }
  return x;
}

L1Oracle::L1Oracle(Vector xstar) : xstar_(std::move(xstar)) {
  if (xstar_.size() < 1) throw UsageError("l1_oracle: empty target");
  RequireFinite(xstar_, "l1_oracle target");
}

Vector L1Oracle::Selection(const Vector& x) const {
  RequireSameDim(x, xstar_, "l1_oracle");
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double d = x[i] - xstar_[i];
    g[i] = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
  }
  return g;
}

SubgradientEstimate L1Oracle::Query(const Vector& x, RngStream& /*rng*/) {
  SubgradientEstimate est;
  est.g = Selection(x);
  est.f_estimate = (x - xstar_).lpNorm<1>();
  est.true_part = est.g;
  return est;
}

std::optional<double> L1Oracle::Value(const Vector& x) const {
  RequireSameDim(x, xstar_, "l1_oracle");
  return (x - xstar_).lpNorm<1>();
}

std::optional<Vector> L1Oracle::ExactSolution(const BoxConstraint& box) const {
  return box.Project(xstar_);
}

NoisyOracle::NoisyOracle(std::unique_ptr<Oracle> base, NoiseSpec noise,
                         std::optional<Vector> bias_direction)
    : base_(std::move(base)), noise_(noise) {
  if (!base_) throw UsageError("with_noise: null base oracle");
  noise_.Validate();
  const int n = base_->dimension();
  direction_ = bias_direction.value_or(Vector::Ones(n));
  if (direction_.size() != n || !(direction_.norm() > 0.0)) {
    throw UsageError("with_noise: bias direction must be a nonzero vector of the oracle dimension");
  }
  direction_.normalize();
}

Vector NoisyOracle::Bias(std::uint64_t k) const {
  if (noise_.delta0 == 0.0) return Vector::Zero(direction_.size());
  return (noise_.delta0 / std::pow(1.0 + static_cast<double>(k), noise_.rho)) * direction_;
}

SubgradientEstimate NoisyOracle::Query(const Vector& x, RngStream& rng) {
  SubgradientEstimate est = base_->Query(x, rng);
  if (!est.true_part) est.true_part = est.g;
  if (noise_.sigma_e > 0.0) {
    for (Eigen::Index i = 0; i < est.g.size(); ++i) est.g[i] += noise_.sigma_e * rng.Normal();
  }
  if (noise_.delta0 > 0.0) est.g += Bias(k_);
  ++k_;
  return est;
}

std::unique_ptr<Oracle> with_noise(std::unique_ptr<Oracle> base, const NoiseSpec& noise) {
  return std::make_unique<NoisyOracle>(std::move(base), noise);
}

std::unique_ptr<Oracle> quadratic_oracle(Matrix A, Vector b, const NoiseSpec& noise) {
  auto base = std::make_unique<QuadraticOracle>(std::move(A), std::move(b));
  if (noise.is_zero()) return base;
  return with_noise(std::move(base), noise);
}

std::unique_ptr<Oracle> l1_oracle(Vector xstar, const NoiseSpec& noise) {
  auto base = std::make_unique<L1Oracle>(std::move(xstar));
  if (noise.is_zero()) return base;
  return with_noise(std::move(base), noise);
}

QuadraticBenchmark MakeQuadraticBenchmark(int dim, std::uint64_t seed) {
  if (dim < 2) throw UsageError("quadratic benchmark needs dim >= 2");
  RngStream rng(seed, 0x51);
  Matrix A = Matrix::Identity(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) A(i, j) += 0.3 * rng.Normal() / std::sqrt(dim);
  }
  // Unconstrained minimizer u with two coordinates well outside [-1, 1].
  Vector u = rng.UniformVector(dim, -0.5, 0.5);
  u[0] = 2.5;
  u[1] = -3.0;
  Vector b = A * u;
  return {std::move(A), std::move(b), BoxConstraint::Symmetric(dim, 1.0)};
}

L1Benchmark MakeL1Benchmark(int dim, std::uint64_t seed) {
  if (dim < 2) throw UsageError("l1 benchmark needs dim >= 2");
  RngStream rng(seed, 0x11);
  Vector xstar = rng.UniformVector(dim, -0.8, 0.8);
  xstar[0] = 1.5;
  xstar[1] = -2.0;
  return {std::move(xstar), BoxConstraint::Symmetric(dim, 1.0)};
}

}  // namespace ssam
