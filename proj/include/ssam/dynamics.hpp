// Explicit Euler integration of the limiting system
//
//   x' = ybar(x, z) - x,   z' = a (g(x) - z),   g a fixed selection,
//
// with the Lyapunov function W(x, z) = a f(x) - eta(x, z), which decreases
// at rate at least a beta ||x'||^2 along exact trajectories.
#pragma once

#include <vector>

#include "ssam/chain_lab.hpp"
#include "ssam/core.hpp"
#include "ssam/optimizer.hpp"

namespace ssam {

struct FlowState {
  Vector X;
  Vector Z;
  double t = 0.0;
};

struct FlowParams {
  double a = 0.1;
  double beta = 1.0;
  double h = 1e-3;

  void Validate() const;
};

struct LyapunovReading {
  double t = 0.0;
  double W = 0.0;
  double f_val = 0.0;
  double eta_val = 0.0;
  double speed = 0.0;  // ||x'|| = ||ybar(X, Z) - X||
};

// One Euler step; X is re-projected onto the box afterwards.
FlowState flow_step(const FlowState& state, const SelectionFunction& fn, const FlowParams& params,
                    const BoxConstraint& box);

LyapunovReading ReadLyapunov(const FlowState& state, const SelectionFunction& fn,
                             const FlowParams& params, const BoxConstraint& box);

struct DescentReport {
  double total_change = 0.0;  // W(T) - W(0)
  double dissipation = 0.0;   // a beta sum_j h ||x'_j||^2
  // max_j [W_{j+1} - W_j + a beta h ||x'_j||^2]; zero or below on exact descent
  double max_violation = 0.0;
  bool pass = false;          // max_violation <= 10 h
};

struct Integration {
  std::vector<LyapunovReading> readings;  // one per grid time, t = 0 .. T
  FlowState final_state;
  DescentReport descent;
};

Integration integrate(const Vector& x0, const Vector& z0, const SelectionFunction& fn,
                      const FlowParams& params, const BoxConstraint& box, double T);

// Readings in the optimizer trace layout: loss = f, residual = speed,
// step_norm = h * speed.
Trace ToTrace(const std::vector<LyapunovReading>& readings, double h);

/// Runs the averaged method with constant stepsize tau and noise-free
/// observations g(x) for T / tau steps, and the Euler flow with step tau / 16
/// from the same start (z0 = g(x0)). Returns sup_k ||x^k - X(t_k)|| +
/// ||z^k - Z(t_k)||.
double TrackingGap(const Vector& x0, const SelectionFunction& fn, double a, double beta,
                   const BoxConstraint& box, double tau, double T);

}  // namespace ssam
