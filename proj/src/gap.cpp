#include "ssam/gap.hpp"

#include <algorithm>

namespace ssam {

namespace {

void CheckArgs(const Vector& x, const Vector& z, double beta, const BoxConstraint& box) {
  RequireSameDim(x, z, "gap");
  if (x.size() != box.dim()) throw UsageError("gap: box dimension mismatch");
  if (!(beta > 0.0)) throw UsageError("gap: beta must be positive");
  if (!box.Contains(x, kFeasibilityTol)) throw UsageError("gap: x is not in the feasible box");
}

}  // namespace

Vector ybar(const Vector& x, const Vector& z, double beta, const BoxConstraint& box) {
  CheckArgs(x, z, beta, box);
  return box.Project(x - z / beta);
}

GapResult eta(const Vector& x, const Vector& z, double beta, const BoxConstraint& box) {
  GapResult r;
  r.ybar = ybar(x, z, beta, box);
  const Vector d = r.ybar - x;
  const double sq = d.squaredNorm();
  // Rounding can leave a tiny positive value when z is almost normal.
  r.eta = std::min(0.0, z.dot(d) + 0.5 * beta * sq);
  r.residual = std::sqrt(sq);
  if (r.residual == 0.0) r.eta = 0.0;
  return r;
}

bool stationarity_ok(const Vector& x, const Vector& g, double beta, const BoxConstraint& box,
                     double tol) {
  return (ybar(x, g, beta, box) - x).norm() <= tol;
}

}  // namespace ssam
