// Bias-free ReLU network
//
//   s_1 = X,  s_{l+1} = (W_l s_l)_+  (l < L),  y = W_L s_L
//
// with the squared loss and its generalized subgradient. The selector at a
// pre-activation of exactly zero is 0 in every layer.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ssam/core.hpp"
#include "ssam/oracle.hpp"

namespace ssam {

struct NetArch {
  int L = 2;  // number of weight matrices
  int n = 1;  // input and hidden width
  int m = 1;  // output dimension

  void Validate() const;
  int num_params() const { return (L - 1) * n * n + m * n; }
  int rows(int layer) const { return layer == L - 1 ? m : n; }
  bool operator==(const NetArch&) const = default;
};

struct Sample {
  Vector features;  // dim n
  Vector target;    // dim m
};

inline constexpr double kDefaultWeightBox = 10.0;

/// Layer matrices W_1..W_L. The flattened layout is layer-major and
/// row-major within each layer; traces depend on it, so do not reorder.
struct NetParams {
  NetArch arch;
  std::vector<Matrix> layers;
  double half_width = kDefaultWeightBox;

  static NetParams Zeros(const NetArch& arch, double half_width = kDefaultWeightBox);
  // Entries i.i.d. uniform on [-1/sqrt(n), 1/sqrt(n)].
  static NetParams RandomInit(const NetArch& arch, RngStream& rng,
                              double half_width = kDefaultWeightBox);
  static NetParams Unflatten(const NetArch& arch, const Vector& flat,
                             double half_width = kDefaultWeightBox);

  Vector Flatten() const;
  BoxConstraint Box() const;
  void Validate() const;
};

struct ForwardTrace {
  std::vector<Vector> s;        // s_1 .. s_L
  std::vector<Vector> preacts;  // W_l s_l for l = 1 .. L-1
  Vector y;
};

ForwardTrace forward(const Sample& sample, const NetParams& params);
double sample_loss(const Sample& sample, const NetParams& params);
// Gradient-layout vector (same as NetParams::Flatten).
Vector sample_subgrad(const Sample& sample, const NetParams& params);
Vector minibatch_subgrad(std::span<const Sample> samples, const NetParams& params);

// Closed form for L = 2, m = 1:
//   (y - Y) [ D W_2^T X^T | (W_1 X)_+^T ],  D_ii = 1 iff (W_1 X)_i > 0.
Vector two_layer_closed_form(const Sample& sample, const NetParams& params);

// Mean of sample_loss over the samples, evaluated layer by layer on the
// whole batch at once.
double mean_loss(std::span<const Sample> samples, const NetParams& params);
// Same, with features (n x B) and targets (m x B) stacked column-wise.
double mean_loss(const Matrix& features, const Matrix& targets, const NetParams& params);

/// Stochastic oracle for the expected squared loss over a finite dataset.
/// Each query draws `batch` sample indices uniformly with replacement. The
/// reported f_estimate is the mean loss on a fixed evaluation subset when
/// one is configured, otherwise the minibatch loss.
class ReluLossOracle : public Oracle {
 public:
  ReluLossOracle(std::vector<Sample> data, NetArch arch, int batch,
                 std::vector<std::size_t> eval_indices = {}, double half_width = kDefaultWeightBox);

  SubgradientEstimate Query(const Vector& x, RngStream& rng) override;
  int dimension() const override { return arch_.num_params(); }
  std::optional<double> Value(const Vector& x) const override;

  const NetArch& arch() const { return arch_; }
  const std::vector<Sample>& data() const { return data_; }

 private:
  std::vector<Sample> data_;
  std::vector<Sample> eval_;
  Matrix eval_features_;
  Matrix eval_targets_;
  NetArch arch_;
  int batch_;
  double half_width_;
  std::vector<Sample> scratch_;
};

}  // namespace ssam
