// Numerical checks of the chain rule on a path,
//
//   f(p(T)) - f(p(0)) = int_0^T <g(p(t)), p'(t)> dt,
//
// for any selection g from a generalized subdifferential of f, plus the
// composition rule used to assemble such selections.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ssam/core.hpp"

namespace ssam {

enum class PathKind { kSegment, kPiecewiseLinear, kSmooth };

/// Lipschitz path p : [0, T] -> R^n with an explicitly known derivative.
/// Knots are the times where p' may jump; quadrature never straddles them.
class Path {
 public:
  static Path Segment(Vector from, Vector to, double T = 1.0);
  // points[i] is visited at times[i]; times strictly increasing from 0.
  static Path PiecewiseLinear(std::vector<double> times, std::vector<Vector> points);
  static Path Smooth(std::function<Vector(double)> point, std::function<Vector(double)> velocity,
                     double T, double speed_bound, int dim);
  static Path Constant(Vector at, double T = 1.0);

  Vector Point(double t) const;
  Vector Velocity(double t) const;
  double T() const { return T_; }
  int dim() const { return dim_; }
  PathKind kind() const { return kind_; }
  const std::vector<double>& knots() const { return knots_; }  // includes 0 and T
  double speed_bound() const { return speed_bound_; }

 private:
  Path() = default;
  std::size_t Piece(double t) const;

  PathKind kind_ = PathKind::kSegment;
  double T_ = 1.0;
  int dim_ = 0;
  std::vector<double> knots_;
  std::vector<Vector> points_;
  std::function<Vector(double)> point_fn_;
  std::function<Vector(double)> velocity_fn_;
  double speed_bound_ = 0.0;
};

/// A function paired with a selection x -> g(x) from one of its
/// generalized subdifferentials.
struct SelectionFunction {
  std::function<double(const Vector&)> f;
  std::function<Vector(const Vector&)> g;
  int dim = 0;
};

// Midpoint rule for int_0^T <g(p(t)), p'(t)> dt; each knot interval is
// split into ceil(length / h) equal cells. Requires 0 < h <= T / 10.
double path_integral(const SelectionFunction& fn, const Path& p, double h);

struct ChainReport {
  double lhs = 0.0;   // f(p(T)) - f(p(0))
  double rhs = 0.0;   // path integral
  double gap = 0.0;   // |lhs - rhs|
  double tol = 0.0;   // C * h
  double C = 0.0;
  double h = 0.0;
  bool pass = false;
};

// Tolerance constant 10 * (max ||g|| seen along p) * (speed bound of p).
double CalibrateChainConstant(const SelectionFunction& fn, const Path& p, double h);

// Uses CalibrateChainConstant when C is not positive.
ChainReport chain_rule_check(const SelectionFunction& fn, const Path& p, double h, double C = 0.0);

// psi(x) = outer(f_1(x), ..., f_m(x)) with selection [g_1 ... g_m] g_0.
SelectionFunction compose_subgrad(const SelectionFunction& outer,
                                  const std::vector<SelectionFunction>& inners);

// Least-squares slope of log(gap) against log(h).
double ConvergenceOrder(const std::vector<double>& hs, const std::vector<double>& gaps);

// Building blocks used by the validation suites and tests.
SelectionFunction AbsSelection(double tie_value = 0.0);  // |x| on R
SelectionFunction MaxCoordSelection(int dim);            // max_i x_i, first maximizer
SelectionFunction L1DistanceSelection(Vector center);    // ||x - c||_1, sign with 0 at ties
SelectionFunction AffineSelection(Vector slope, double offset);
SelectionFunction CoordinateSelection(int dim, int index);  // x -> x_index
SelectionFunction ReluSelection();                          // max(0, u), selector 0 at u = 0
SelectionFunction ProductSelection();                       // (u, v) -> u v
SelectionFunction SumSelection(int dim);
SelectionFunction HalfSquaredErrorSelection(double target);  // u -> (u - target)^2 / 2

}  // namespace ssam
