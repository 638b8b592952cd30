// Stochastic subgradient oracles. An observation at x is
//
//   g = (selection from a generalized subdifferential at x) + e + delta
//
// with e i.i.d. mean-zero Gaussian and delta a deterministic, decaying bias.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "ssam/core.hpp"

namespace ssam {

struct SubgradientEstimate {
  Vector g;
  double f_estimate = 0.0;
  // Exact selection before noise. Oracles fill it for diagnostics; the
  // optimizer never reads it.
  std::optional<Vector> true_part;
};

class Oracle {
 public:
  virtual ~Oracle() = default;

  // Noise at this call is drawn after x is fixed. Deterministic given the
  // stream state and the number of previous calls.
  virtual SubgradientEstimate Query(const Vector& x, RngStream& rng) = 0;
  virtual int dimension() const = 0;

  // Exact objective, where one is available (test problems).
  virtual std::optional<double> Value(const Vector& /*x*/) const { return std::nullopt; }
  virtual std::optional<Vector> ExactSolution(const BoxConstraint& /*box*/) const {
    return std::nullopt;
  }
};

struct NoiseSpec {
  double sigma_e = 0.0;  // std of the martingale part, per coordinate
  double delta0 = 0.0;   // bias magnitude at k = 0
  double rho = 1.0;      // bias decay exponent, ||delta^k|| = delta0 / (1 + k)^rho

  bool is_zero() const { return sigma_e == 0.0 && delta0 == 0.0; }
  void Validate() const;
};

// f(x) = 1/2 ||A x - b||^2
class QuadraticOracle : public Oracle {
 public:
  QuadraticOracle(Matrix A, Vector b);

  SubgradientEstimate Query(const Vector& x, RngStream& rng) override;
  int dimension() const override { return static_cast<int>(A_.cols()); }
  std::optional<double> Value(const Vector& x) const override;
  // Throws UsageError when A is rank deficient (no unique minimizer).
  std::optional<Vector> ExactSolution(const BoxConstraint& box) const override;

  Vector Gradient(const Vector& x) const;
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }

 private:
  Matrix A_;
  Vector b_;
};

// f(x) = ||x - x*||_1 with the selection sign(x - x*), 0 at ties.
class L1Oracle : public Oracle {
 public:
  explicit L1Oracle(Vector xstar);

  SubgradientEstimate Query(const Vector& x, RngStream& rng) override;
  int dimension() const override { return static_cast<int>(xstar_.size()); }
  std::optional<double> Value(const Vector& x) const override;
  std::optional<Vector> ExactSolution(const BoxConstraint& box) const override;

  Vector Selection(const Vector& x) const;
  const Vector& xstar() const { return xstar_; }

 private:
  Vector xstar_;
};

/// Adds e^k + delta^k to a base oracle. delta^k points along a fixed unit
/// vector (all-ones, normalized, unless one is supplied); k counts queries
/// made through this wrapper.
class NoisyOracle : public Oracle {
 public:
  NoisyOracle(std::unique_ptr<Oracle> base, NoiseSpec noise,
              std::optional<Vector> bias_direction = std::nullopt);

  SubgradientEstimate Query(const Vector& x, RngStream& rng) override;
  int dimension() const override { return base_->dimension(); }
  std::optional<double> Value(const Vector& x) const override { return base_->Value(x); }
  std::optional<Vector> ExactSolution(const BoxConstraint& box) const override {
    return base_->ExactSolution(box);
  }

  Vector Bias(std::uint64_t k) const;
  std::uint64_t queries() const { return k_; }
  const Oracle& base() const { return *base_; }

 private:
  std::unique_ptr<Oracle> base_;
  NoiseSpec noise_;
  Vector direction_;
  std::uint64_t k_ = 0;
};

std::unique_ptr<Oracle> with_noise(std::unique_ptr<Oracle> base, const NoiseSpec& noise);
std::unique_ptr<Oracle> quadratic_oracle(Matrix A, Vector b, const NoiseSpec& noise = {});
std::unique_ptr<Oracle> l1_oracle(Vector xstar, const NoiseSpec& noise = {});

// Seeded dim-n quadratic on [-1, 1]^n whose unconstrained minimizer lies
// outside the box in at least two coordinates.
struct QuadraticBenchmark {
  Matrix A;
  Vector b;
  BoxConstraint box;
};
QuadraticBenchmark MakeQuadraticBenchmark(int dim, std::uint64_t seed);

// Seeded l1 target on [-1, 1]^n; two coordinates of x* lie outside the box.
struct L1Benchmark {
  Vector xstar;
  BoxConstraint box;
};
L1Benchmark MakeL1Benchmark(int dim, std::uint64_t seed);

}  // namespace ssam
