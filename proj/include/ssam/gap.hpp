// Gap function of the direction subproblem
//
//   eta(x, z) = min_{y in X} <z, y - x> + (beta / 2) ||y - x||^2
//
// and its minimizer ybar(x, z), which for a box is the projection of
// x - z / beta.
#pragma once

#include "ssam/core.hpp"

namespace ssam {

// Points further than this outside the box are rejected as infeasible.
inline constexpr double kFeasibilityTol = 1e-9;

struct GapResult {
  Vector ybar;
  double eta = 0.0;       // <= 0
  double residual = 0.0;  // ||ybar - x||
};

Vector ybar(const Vector& x, const Vector& z, double beta, const BoxConstraint& box);

GapResult eta(const Vector& x, const Vector& z, double beta, const BoxConstraint& box);

// True iff ||ybar(x, g) - x|| <= tol, i.e. -g is (nearly) normal to the box at x.
bool stationarity_ok(const Vector& x, const Vector& g, double beta, const BoxConstraint& box,
                     double tol);

}  // namespace ssam
