#include "ssam/relu_net.hpp"

#include <cmath>
#include <string>

namespace ssam {

void NetArch::Validate() const {
  if (L < 1 || n < 1 || m < 1) throw UsageError("network architecture needs L, n, m >= 1");
}

NetParams NetParams::Zeros(const NetArch& arch, double half_width) {
  arch.Validate();
  NetParams p;
  p.arch = arch;
  p.half_width = half_width;
  for (int l = 0; l < arch.L; ++l) p.layers.push_back(Matrix::Zero(arch.rows(l), arch.n));
  return p;
}

NetParams NetParams::RandomInit(const NetArch& arch, RngStream& rng, double half_width) {
  NetParams p = Zeros(arch, half_width);
  const double r = 1.0 / std::sqrt(static_cast<double>(arch.n));
  for (Matrix& W : p.layers) {
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = rng.Uniform(-r, r);
    }
  }
  return p;
}

NetParams NetParams::Unflatten(const NetArch& arch, const Vector& flat, double half_width) {
  NetParams p = Zeros(arch, half_width);
  if (flat.size() != arch.num_params()) {
    throw UsageError("Unflatten: expected " + std::to_string(arch.num_params()) +
                     " parameters, got " + std::to_string(flat.size()));
  }
  Eigen::Index k = 0;
  for (Matrix& W : p.layers) {
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = flat[k++];
    }
  }
  return p;
}

Vector NetParams::Flatten() const {
  Vector flat(arch.num_params());
  Eigen::Index k = 0;
  for (const Matrix& W : layers) {
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      for (Eigen::Index j = 0; j < W.cols(); ++j) flat[k++] = W(i, j);
    }
  }
  return flat;
}

BoxConstraint NetParams::Box() const {
  if (!(half_width > 0.0)) throw UsageError("weight box half-width must be positive");
  return BoxConstraint::Symmetric(arch.num_params(), half_width);
}

void NetParams::Validate() const {
  arch.Validate();
  if (static_cast<int>(layers.size()) != arch.L) throw UsageError("NetParams: wrong layer count");
  for (int l = 0; l < arch.L; ++l) {
    if (layers[l].rows() != arch.rows(l) || layers[l].cols() != arch.n) {
      throw UsageError("NetParams: layer " + std::to_string(l + 1) + " has wrong shape");
    }
  }
}

namespace {

void CheckSample(const Sample& sample, const NetArch& arch) {
  if (sample.features.size() != arch.n || sample.target.size() != arch.m) {
    throw UsageError("sample shape does not match the network architecture");
  }
}

}  // namespace

ForwardTrace forward(const Sample& sample, const NetParams& params) {
  params.Validate();
  CheckSample(sample, params.arch);
  ForwardTrace tr;
  tr.s.reserve(params.arch.L);
  tr.s.push_back(sample.features);
  for (int l = 0; l + 1 < params.arch.L; ++l) {
    tr.preacts.push_back(params.layers[l] * tr.s.back());
    tr.s.push_back(tr.preacts.back().cwiseMax(0.0));
  }
  tr.y = params.layers.back() * tr.s.back();
  return tr;
}

double sample_loss(const Sample& sample, const NetParams& params) {
  return 0.5 * (forward(sample, params).y - sample.target).squaredNorm();
}

Vector sample_subgrad(const Sample& sample, const NetParams& params) {
  const ForwardTrace tr = forward(sample, params);
  const int L = params.arch.L;
  std::vector<Matrix> grads(L);

  const Vector r = tr.y - sample.target;
  grads[L - 1] = r * tr.s.back().transpose();
  Vector delta = params.layers[L - 1].transpose() * r;
  for (int l = L - 2; l >= 0; --l) {
    const Vector dpre = (tr.preacts[l].array() > 0.0).select(delta, 0.0);
    grads[l] = dpre * tr.s[l].transpose();
    if (l > 0) delta = params.layers[l].transpose() * dpre;
  }

  NetParams g;
  g.arch = params.arch;
  g.layers = std::move(grads);
  return g.Flatten();
}

Vector minibatch_subgrad(std::span<const Sample> samples, const NetParams& params) {
  if (samples.empty()) throw UsageError("minibatch_subgrad: empty batch");
  Vector sum = Vector::Zero(params.arch.num_params());
  // Fixed summation order keeps traces bit-reproducible.
  for (const Sample& s : samples) sum += sample_subgrad(s, params);
  return sum / static_cast<double>(samples.size());
}

Vector two_layer_closed_form(const Sample& sample, const NetParams& params) {
  params.Validate();
  if (params.arch.L != 2 || params.arch.m != 1) {
    throw UsageError("two_layer_closed_form requires L = 2 and m = 1");
  }
  CheckSample(sample, params.arch);
  const Matrix& W1 = params.layers[0];
  const Matrix& W2 = params.layers[1];
  const Vector& X = sample.features;
  const Vector pre = W1 * X;
  const Vector act = pre.cwiseMax(0.0);
  const double resid = (W2 * act)(0) - sample.target(0);

  const int n = params.arch.n;
  Matrix D = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) D(i, i) = pre[i] > 0.0 ? 1.0 : 0.0;

  NetParams g;
  g.arch = params.arch;
  g.layers = {resid * D * W2.transpose() * X.transpose(), resid * act.transpose()};
  return g.Flatten();
}

double mean_loss(const Matrix& features, const Matrix& targets, const NetParams& params) {
  Matrix S = features;
  for (int l = 0; l + 1 < params.arch.L; ++l) S = (params.layers[l] * S).cwiseMax(0.0);
  const Matrix diff = params.layers.back() * S - targets;
  return 0.5 * diff.squaredNorm() / static_cast<double>(features.cols());
}

namespace {

void Stack(std::span<const Sample> samples, const NetArch& arch, Matrix& features,
           Matrix& targets) {
  features.resize(arch.n, static_cast<Eigen::Index>(samples.size()));
  targets.resize(arch.m, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CheckSample(samples[i], arch);
    features.col(i) = samples[i].features;
    targets.col(i) = samples[i].target;
  }
}

}  // namespace

double mean_loss(std::span<const Sample> samples, const NetParams& params) {
  if (samples.empty()) throw UsageError("mean_loss: empty sample set");
  params.Validate();
  Matrix features, targets;
  Stack(samples, params.arch, features, targets);
  return mean_loss(features, targets, params);
}

ReluLossOracle::ReluLossOracle(std::vector<Sample> data, NetArch arch, int batch,
                               std::vector<std::size_t> eval_indices, double half_width)
    : data_(std::move(data)), arch_(arch), batch_(batch), half_width_(half_width) {
  arch_.Validate();
  if (data_.empty()) throw UsageError("ReluLossOracle: empty dataset");
  if (batch_ < 1) throw UsageError("ReluLossOracle: batch size must be >= 1");
  for (const Sample& s : data_) CheckSample(s, arch_);
  for (std::size_t i : eval_indices) {
    if (i >= data_.size()) throw UsageError("ReluLossOracle: evaluation index out of range");
    eval_.push_back(data_[i]);
  }
  if (!eval_.empty()) Stack(eval_, arch_, eval_features_, eval_targets_);
  scratch_.resize(static_cast<std::size_t>(batch_));
}

SubgradientEstimate ReluLossOracle::Query(const Vector& x, RngStream& rng) {
  const NetParams params = NetParams::Unflatten(arch_, x, half_width_);
  for (Sample& s : scratch_) s = data_[rng.Index(data_.size())];
  SubgradientEstimate est;
  est.g = minibatch_subgrad(scratch_, params);
  est.true_part = est.g;
  est.f_estimate = eval_.empty() ? mean_loss(scratch_, params)
                                 : mean_loss(eval_features_, eval_targets_, params);
  return est;
}

std::optional<double> ReluLossOracle::Value(const Vector& x) const {
  return mean_loss(data_, NetParams::Unflatten(arch_, x, half_width_));
}

}  // namespace ssam
