#include "ssam/chain_lab.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssam {

Path Path::Segment(Vector from, Vector to, double T) {
  return PiecewiseLinear({0.0, T}, {std::move(from), std::move(to)});
}

Path Path::Constant(Vector at, double T) {
  Vector copy = at;
  return Segment(std::move(at), std::move(copy), T);
}

Path Path::PiecewiseLinear(std::vector<double> times, std::vector<Vector> points) {
  if (times.size() < 2 || times.size() != points.size()) {
    throw UsageError("Path: need matching times and points, at least two");
  }
  if (times.front() != 0.0) throw UsageError("Path: first knot must be at t = 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw UsageError("Path: knot times must increase");
    RequireSameDim(points[i], points[0], "Path");
  }
  Path p;
  p.kind_ = times.size() == 2 ? PathKind::kSegment : PathKind::kPiecewiseLinear;
  p.T_ = times.back();
  p.dim_ = static_cast<int>(points[0].size());
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double speed = (points[i] - points[i - 1]).norm() / (times[i] - times[i - 1]);
    p.speed_bound_ = std::max(p.speed_bound_, speed);
  }
  p.knots_ = std::move(times);
  p.points_ = std::move(points);
  return p;
}

Path Path::Smooth(std::function<Vector(double)> point, std::function<Vector(double)> velocity,
                  double T, double speed_bound, int dim) {
  if (!(T > 0.0)) throw UsageError("Path: horizon must be positive");
  if (!point || !velocity) throw UsageError("Path: smooth path needs point and velocity");
  Path p;
  p.kind_ = PathKind::kSmooth;
  p.T_ = T;
  p.dim_ = dim;
  p.knots_ = {0.0, T};
  p.point_fn_ = std::move(point);
  p.velocity_fn_ = std::move(velocity);
  p.speed_bound_ = speed_bound;
  return p;
}

std::size_t Path::Piece(double t) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const auto idx = static_cast<std::size_t>(std::distance(knots_.begin(), it));
  return std::clamp<std::size_t>(idx, 1, knots_.size() - 1) - 1;
}

Vector Path::Point(double t) const {
  if (kind_ == PathKind::kSmooth) return point_fn_(t);
  const std::size_t i = Piece(t);
  // Evaluate the knot endpoints exactly so constant paths stay constant.
  if (t <= knots_[i]) return points_[i];
  if (t >= knots_[i + 1]) return points_[i + 1];
  const double s = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
  return points_[i] + s * (points_[i + 1] - points_[i]);
}

Vector Path::Velocity(double t) const {
  if (kind_ == PathKind::kSmooth) return velocity_fn_(t);
  const std::size_t i = Piece(t);
  return (points_[i + 1] - points_[i]) / (knots_[i + 1] - knots_[i]);
}

double path_integral(const SelectionFunction& fn, const Path& p, double h) {
  if (!(h > 0.0) || h > p.T() / 10.0) {
    throw UsageError("path_integral: need 0 < h <= T/10");
  }
  if (fn.dim != p.dim()) throw UsageError("path_integral: path and function dimensions differ");
  const std::vector<double>& knots = p.knots();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i];
    const double len = knots[i + 1] - a;
    const auto cells = static_cast<long>(std::ceil(len / h));
    const double cell = len / static_cast<double>(cells);
    double piece = 0.0;
    for (long c = 0; c < cells; ++c) {
      const double t = a + (static_cast<double>(c) + 0.5) * cell;
      piece += fn.g(p.Point(t)).dot(p.Velocity(t));
    }
    total += piece * cell;
  }
  return total;
}

double CalibrateChainConstant(const SelectionFunction& fn, const Path& p, double /*h*/) {
  constexpr int kSamples = 1000;
  double gmax = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double t = p.T() * static_cast<double>(i) / kSamples;
    gmax = std::max(gmax, fn.g(p.Point(t)).norm());
  }
  return 10.0 * gmax * p.speed_bound();
}

ChainReport chain_rule_check(const SelectionFunction& fn, const Path& p, double h, double C) {
  ChainReport r;
  r.h = h;
  r.C = C > 0.0 ? C : CalibrateChainConstant(fn, p, h);
  r.lhs = fn.f(p.Point(p.T())) - fn.f(p.Point(0.0));
  r.rhs = path_integral(fn, p, h);
  r.gap = std::abs(r.lhs - r.rhs);
  r.tol = r.C * h;
  r.pass = r.gap <= r.tol;
  return r;
}

SelectionFunction compose_subgrad(const SelectionFunction& outer,
                                  const std::vector<SelectionFunction>& inners) {
  if (inners.empty()) throw UsageError("compose_subgrad: no inner functions");
  if (static_cast<int>(inners.size()) != outer.dim) {
    throw UsageError("compose_subgrad: outer dimension must equal the number of inner functions");
  }
  const int n = inners.front().dim;
  for (const SelectionFunction& in : inners) {
    if (in.dim != n) throw UsageError("compose_subgrad: inner functions disagree on dimension");
  }
  SelectionFunction out;
  out.dim = n;
  out.f = [outer, inners](const Vector& x) {
    Vector u(static_cast<Eigen::Index>(inners.size()));
    for (std::size_t j = 0; j < inners.size(); ++j) u[j] = inners[j].f(x);
    return outer.f(u);
  };
  out.g = [outer, inners, n](const Vector& x) {
    Vector u(static_cast<Eigen::Index>(inners.size()));
    for (std::size_t j = 0; j < inners.size(); ++j) u[j] = inners[j].f(x);
    const Vector g0 = outer.g(u);
    Vector g = Vector::Zero(n);
    for (std::size_t j = 0; j < inners.size(); ++j) {
      if (g0[j] != 0.0) g += g0[j] * inners[j].g(x);
    }
    return g;
  };
  return out;
}

double ConvergenceOrder(const std::vector<double>& hs, const std::vector<double>& gaps) {
  if (hs.size() != gaps.size() || hs.size() < 2) {
    throw UsageError("ConvergenceOrder: need at least two (h, gap) pairs");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double x = std::log(hs[i]);
    const double y = std::log(std::max(gaps[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SelectionFunction AbsSelection(double tie_value) {
  return {[](const Vector& x) { return std::abs(x[0]); },
          [tie_value](const Vector& x) {
            Vector g(1);
            g[0] = x[0] > 0.0 ? 1.0 : (x[0] < 0.0 ? -1.0 : tie_value);
            return g;
          },
          1};
}

SelectionFunction MaxCoordSelection(int dim) {
  return {[](const Vector& x) { return x.maxCoeff(); },
          [dim](const Vector& x) {
            Eigen::Index i = 0;
            x.maxCoeff(&i);
            Vector g = Vector::Zero(dim);
            g[i] = 1.0;
            return g;
          },
          dim};
}

SelectionFunction L1DistanceSelection(Vector center) {
  const int dim = static_cast<int>(center.size());
  return {[center](const Vector& x) { return (x - center).lpNorm<1>(); },
          [center](const Vector& x) {
            const Vector d = x - center;
            return Vector(d.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }));
          },
          dim};
}

SelectionFunction AffineSelection(Vector slope, double offset) {
  const int dim = static_cast<int>(slope.size());
  return {[slope, offset](const Vector& x) { return slope.dot(x) + offset; },
          [slope](const Vector&) { return slope; }, dim};
}

SelectionFunction CoordinateSelection(int dim, int index) {
  return {[index](const Vector& x) { return x[index]; },
          [dim, index](const Vector&) {
            Vector g = Vector::Zero(dim);
            g[index] = 1.0;
            return g;
          },
          dim};
}

SelectionFunction ReluSelection() {
  return {[](const Vector& u) { return std::max(0.0, u[0]); },
          [](const Vector& u) {
            Vector g(1);
            g[0] = u[0] > 0.0 ? 1.0 : 0.0;
            return g;
          },
          1};
}

SelectionFunction ProductSelection() {
  return {[](const Vector& u) { return u[0] * u[1]; },
          [](const Vector& u) {
            Vector g(2);
            g << u[1], u[0];
            return g;
          },
          2};
}

SelectionFunction SumSelection(int dim) {
  return {[](const Vector& u) { return u.sum(); },
          [dim](const Vector&) { return Vector(Vector::Ones(dim)); }, dim};
}

SelectionFunction HalfSquaredErrorSelection(double target) {
  return {[target](const Vector& u) { return 0.5 * (u[0] - target) * (u[0] - target); },
          [target](const Vector& u) {
            Vector g(1);
            g[0] = u[0] - target;
            return g;
          },
          1};
}

}  // namespace ssam
