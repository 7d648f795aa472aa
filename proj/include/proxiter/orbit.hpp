#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "proxiter/contraction.hpp"
#include "proxiter/convex_set.hpp"
#include "proxiter/errors.hpp"
#include "proxiter/metric.hpp"
#include "proxiter/schedule.hpp"

namespace proxiter {

/// Piecewise-affine self-map x -> M_i x + b_i, where i is the first piece
/// whose region contains x. A piece without a region applies everywhere and
/// may only appear last.
template <typename Scalar>
class PiecewiseAffineMap {
public:
  using VectorT = Vector<Scalar>;
  using MatrixT = Matrix<Scalar>;

  struct Piece {
    std::optional<ConvexSet<Scalar>> region;
    MatrixT matrix;
    VectorT offset;

    friend bool operator==(const Piece& a, const Piece& b) {
      return a.region == b.region && a.matrix.rows() == b.matrix.rows() &&
             a.matrix.cols() == b.matrix.cols() && a.matrix == b.matrix &&
             a.offset.size() == b.offset.size() && a.offset == b.offset;
    }
  };

  static constexpr double kRegionTol = 1e-9;

  explicit PiecewiseAffineMap(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw InvariantViolation("MapDef", "map needs at least one piece");
    const Eigen::Index n = pieces_.front().matrix.rows();
    if (n == 0) throw InvariantViolation("MapDef", "matrix has no rows");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const Piece& p = pieces_[i];
      const std::string where = "piece " + std::to_string(i);
      if (p.matrix.rows() != n || p.matrix.cols() != n) {
        throw InvariantViolation("MapDef", where + " matrix is " + std::to_string(p.matrix.rows()) +
                                               "x" + std::to_string(p.matrix.cols()) +
                                               ", expected " + std::to_string(n) + "x" +
                                               std::to_string(n));
      }
      if (p.offset.size() != n) {
        throw InvariantViolation("MapDef", where + " offset has dimension " +
                                               std::to_string(p.offset.size()) + ", expected " +
                                               std::to_string(n));
      }
      if (!p.matrix.allFinite() || !p.offset.allFinite()) {
        throw InvariantViolation("MapDef", where + " has non-finite coefficients");
      }
      if (p.region && p.region->dim() != n) {
        throw InvariantViolation("MapDef", where + " region has dimension " +
                                               std::to_string(p.region->dim()));
      }
      if (!p.region && i + 1 != pieces_.size()) {
        throw InvariantViolation("MapDef", "an everywhere piece must be the last piece");
      }
    }
  }

  static PiecewiseAffineMap affine(MatrixT matrix, VectorT offset) {
    return PiecewiseAffineMap({Piece{std::nullopt, std::move(matrix), std::move(offset)}});
  }

  /// x -> a x + b on the real line.
  static PiecewiseAffineMap scalar(Scalar a, Scalar b) {
    return affine(MatrixT::Constant(1, 1, a), VectorT::Constant(1, b));
  }

  Eigen::Index dim() const { return pieces_.front().matrix.rows(); }
  const std::vector<Piece>& pieces() const { return pieces_; }

  template <typename Derived>
  VectorT operator()(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != dim()) {
      throw InvalidInput("map of dimension " + std::to_string(dim()) +
                         " applied to a point of dimension " + std::to_string(x.size()));
    }
    for (const Piece& p : pieces_) {
      if (!p.region || p.region->contains(x, Scalar(kRegionTol))) {
        return p.matrix * x + p.offset;
      }
    }
    throw UndefinedMap("point lies outside every region of the map");
  }

  friend bool operator==(const PiecewiseAffineMap& a, const PiecewiseAffineMap& b) {
    return a.pieces_ == b.pieces_;
  }

private:
  std::vector<Piece> pieces_;
};

using PiecewiseAffineMapd = PiecewiseAffineMap<double>;

/// Orbit x, Tx, T^2 x, ... with the distances recorded along it.
template <typename Scalar>
struct IterationTrace {
  Metric<Scalar> metric = Metric<Scalar>::euclidean();
  std::vector<Vector<Scalar>> points;
  std::vector<Scalar> step_distances;  // d(T^n x, T^{n+1} x), size points - 1
  std::vector<Vector<Scalar>> pair_points;
  std::vector<Scalar> pair_distances;  // d(T^n x, T^n y) when run on a pair
  std::vector<ContractionReport<Scalar>> reports;  // reports[n - 1] is step n >= 1

  bool has_pair() const { return !pair_distances.empty(); }
};

using IterationTraced = IterationTrace<double>;

template <typename Scalar, typename Derived>
IterationTrace<Scalar> orbit(const PiecewiseAffineMap<Scalar>& T,
                             const Eigen::MatrixBase<Derived>& x0, std::size_t N,
                             const Metric<Scalar>& metric = Metric<Scalar>::euclidean()) {
  if (N < 1) throw InvalidInput("orbit needs N >= 1");
  require_point(x0, "start point");
  if (x0.size() != T.dim()) {
    throw InvalidInput("start point of dimension " + std::to_string(x0.size()) +
                       " for a map of dimension " + std::to_string(T.dim()));
  }
  IterationTrace<Scalar> trace;
  trace.metric = metric;
  trace.points.reserve(N + 1);
  trace.step_distances.reserve(N);
  trace.points.emplace_back(x0);
  for (std::size_t k = 0; k < N; ++k) {
    Vector<Scalar> next = T(trace.points.back());
    trace.step_distances.push_back(metric(trace.points.back(), next));
    trace.points.push_back(std::move(next));
  }
  return trace;
}

/// Orbits of x0 and y0 side by side. With a schedule, step n >= 1 also gets
/// the contraction report for d(x0, y0) against d(T^n x0, T^n y0); `D` is the
/// set gap used by the cyclic variants.
template <typename Scalar, typename DX, typename DY>
IterationTrace<Scalar> pair_trace(const PiecewiseAffineMap<Scalar>& T,
                                  const Eigen::MatrixBase<DX>& x0,
                                  const Eigen::MatrixBase<DY>& y0, std::size_t N,
                                  const ParamSchedule* schedule = nullptr,
                                  InequalityVariant variant = InequalityVariant::Cross,
                                  const Metric<Scalar>& metric = Metric<Scalar>::euclidean(),
                                  Scalar D = Scalar(0)) {
  IterationTrace<Scalar> trace = orbit(T, x0, N, metric);
  const IterationTrace<Scalar> other = orbit(T, y0, N, metric);
  trace.pair_points = other.points;
  trace.pair_distances.reserve(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    trace.pair_distances.push_back(metric(trace.points[n], other.points[n]));
  }
  if (schedule) {
    trace.reports.reserve(N);
    const Scalar d_xy = trace.pair_distances.front();
    for (std::size_t n = 1; n <= N; ++n) {
      const ParamPointd q = schedule->at(n);
      const ParamPoint<Scalar> p{Scalar(q.alpha), Scalar(q.beta), Scalar(q.mu), Scalar(q.gamma)};
      trace.reports.push_back(contraction_report(variant, p, d_xy, trace.pair_distances[n], D));
    }
  }
  return trace;
}

/// Last point z of the trace if both the last step and a fresh evaluation of
/// d(z, Tz) are below tol.
template <typename Scalar>
std::optional<Vector<Scalar>> detect_fixed_point(const IterationTrace<Scalar>& trace,
                                                 const PiecewiseAffineMap<Scalar>& T,
                                                 Scalar tol = Scalar(1e-9)) {
  if (trace.points.empty()) throw InvalidInput("empty trace");
  const Vector<Scalar>& z = trace.points.back();
  if (!trace.step_distances.empty() && !(trace.step_distances.back() < tol)) return std::nullopt;
  if (!(trace.metric(z, T(z)) < tol)) return std::nullopt;
  return z;
}

/// d(T^n x, T^{n+m} x) for every n the trace allows.
template <typename Scalar>
std::vector<Scalar> tail_residuals(const IterationTrace<Scalar>& trace, std::size_t m) {
  if (m < 1 || m >= trace.points.size()) {
    throw InvalidInput("lag m = " + std::to_string(m) + " outside [1, " +
                       std::to_string(trace.points.size()) + ")");
  }
  std::vector<Scalar> out;
  out.reserve(trace.points.size() - m);
  for (std::size_t n = 0; n + m < trace.points.size(); ++n) {
    out.push_back(trace.metric(trace.points[n], trace.points[n + m]));
  }
  return out;
}

/// d^2(T^{n+1} x, T^{n+1} y) - d^2(T^n x, T^n y).
template <typename Scalar>
std::vector<Scalar> squared_gap_deltas(const IterationTrace<Scalar>& trace) {
  if (!trace.has_pair()) throw InvalidInput("trace has no pair distances");
  std::vector<Scalar> out;
  const auto& d = trace.pair_distances;
  for (std::size_t n = 0; n + 1 < d.size(); ++n) out.push_back(d[n + 1] * d[n + 1] - d[n] * d[n]);
  return out;
}

template <typename Scalar>
struct FixedPointRun {
  std::optional<Vector<Scalar>> fixed_point;
  std::size_t iterations = 0;
  IterationTrace<Scalar> trace;
};

/// Picard iteration until a step moves less than tol and d(z, Tz) < tol on
/// re-evaluation, or max_iter steps.
template <typename Scalar, typename Derived>
FixedPointRun<Scalar> iterate_to_fixed_point(
    const PiecewiseAffineMap<Scalar>& T, const Eigen::MatrixBase<Derived>& x0,
    Scalar tol = Scalar(1e-9), std::size_t max_iter = 10000,
    const Metric<Scalar>& metric = Metric<Scalar>::euclidean()) {
  require_point(x0, "start point");
  FixedPointRun<Scalar> run;
  run.trace.metric = metric;
  run.trace.points.emplace_back(x0);
  for (std::size_t k = 0; k < max_iter; ++k) {
    Vector<Scalar> next = T(run.trace.points.back());
    const Scalar step = metric(run.trace.points.back(), next);
    run.trace.step_distances.push_back(step);
    run.trace.points.push_back(std::move(next));
    run.iterations = k + 1;
    if (step < tol) {
      run.fixed_point = detect_fixed_point(run.trace, T, tol);
      if (run.fixed_point) break;
    }
  }
  return run;
}

template <typename Scalar>
struct LimitComparison {
  std::vector<std::optional<Vector<Scalar>>> limits;
  bool all_converged = false;
  bool coincide = false;  // all converged and pairwise within 10 tol
  Scalar spread{0};       // largest pairwise distance between limits found
};

/// Runs iterate_to_fixed_point from each start and reports whether the
/// limits agree. The limit may legitimately depend on the start.
template <typename Scalar>
LimitComparison<Scalar> compare_limits(const PiecewiseAffineMap<Scalar>& T,
                                       const std::vector<Vector<Scalar>>& starts,
                                       Scalar tol = Scalar(1e-9), std::size_t max_iter = 10000,
                                       const Metric<Scalar>& metric = Metric<Scalar>::euclidean()) {
  LimitComparison<Scalar> out;
  out.all_converged = true;
  for (const auto& s : starts) {
    auto run = iterate_to_fixed_point(T, s, tol, max_iter, metric);
    out.all_converged = out.all_converged && run.fixed_point.has_value();
    out.limits.push_back(std::move(run.fixed_point));
  }
  for (std::size_t i = 0; i < out.limits.size(); ++i) {
    for (std::size_t j = i + 1; j < out.limits.size(); ++j) {
      if (out.limits[i] && out.limits[j]) {
        out.spread = std::max(out.spread, metric(*out.limits[i], *out.limits[j]));
      }
    }
  }
  // Each limit is only good to about tol, so two of them may sit 2 tol apart.
  out.coincide = out.all_converged && out.spread < Scalar(10) * tol;
  return out;
}

}  // namespace proxiter
