#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "proxiter/errors.hpp"
#include "proxiter/metric.hpp"

namespace proxiter {

enum class SetKind { Box, Ball, Segment, HalfspaceIntersection };

/// Closed convex subset of R^n with an exact Euclidean projection.
///
/// Four kinds are supported: axis-aligned boxes, closed balls, line segments
/// and finite intersections of halfspaces {x : <n_i, x> <= c_i}. The halfspace
/// projection solves the KKT system over active sets of linearly independent
/// constraints, so it is exact (to rounding) rather than iterative. That
/// enumeration is exponential in the number of halfspaces; it is capped at
/// `kMaxHalfspaces`.
template <typename Scalar>
class ConvexSet {
public:
  using VectorT = Vector<Scalar>;
  using MatrixT = Matrix<Scalar>;

  static constexpr Eigen::Index kMaxHalfspaces = 20;

  struct Box {
    VectorT lower;
    VectorT upper;
  };
  struct Ball {
    VectorT center;
    Scalar radius;
  };
  struct Segment {
    VectorT from;
    VectorT to;
  };
  struct Halfspaces {
    MatrixT normals;  // one row per halfspace
    VectorT offsets;
  };

  static ConvexSet box(VectorT lower, VectorT upper) {
    require_point(lower, "box lower bound");
    require_point(upper, "box upper bound");
    require_same_dim(lower, upper);
    if ((lower.array() > upper.array()).any()) {
      throw InfeasibleSet("box has a lower bound above its upper bound");
    }
    return ConvexSet(Box{std::move(lower), std::move(upper)});
  }

  static ConvexSet interval(Scalar lo, Scalar hi) {
    return box(VectorT::Constant(1, lo), VectorT::Constant(1, hi));
  }

  static ConvexSet ball(VectorT center, Scalar radius) {
    require_point(center, "ball center");
    if (!(radius >= Scalar(0)) || !std::isfinite(static_cast<double>(radius))) {
      throw InvalidInput("ball radius must be finite and nonnegative");
    }
    return ConvexSet(Ball{std::move(center), radius});
  }

  static ConvexSet segment(VectorT from, VectorT to) {
    require_point(from, "segment endpoint");
    require_point(to, "segment endpoint");
    require_same_dim(from, to);
    return ConvexSet(Segment{std::move(from), std::move(to)});
  }

  /// Throws InfeasibleSet when the intersection is empty.
  static ConvexSet halfspaces(MatrixT normals, VectorT offsets) {
    if (normals.rows() == 0 || normals.cols() == 0) {
      throw InvalidInput("halfspace intersection needs at least one halfspace");
    }
    if (normals.rows() != offsets.size()) {
      throw InvalidInput("halfspace intersection has " + std::to_string(normals.rows()) +
                         " normals but " + std::to_string(offsets.size()) + " offsets");
    }
    if (normals.rows() > kMaxHalfspaces) {
      throw InvalidInput("halfspace intersection limited to " +
                         std::to_string(kMaxHalfspaces) + " halfspaces");
    }
    if (!normals.allFinite() || !offsets.allFinite()) {
      throw InvalidInput("halfspace data must be finite");
    }
    for (Eigen::Index i = 0; i < normals.rows(); ++i) {
      if (normals.row(i).norm() == Scalar(0)) throw InvalidInput("zero halfspace normal");
    }
    ConvexSet s(Halfspaces{std::move(normals), std::move(offsets)});
    (void)s.project(VectorT::Zero(s.dim()));  // feasibility probe
    return s;
  }

  SetKind kind() const { return static_cast<SetKind>(shape_.index()); }

  template <typename T>
  const T& as() const {
    return std::get<T>(shape_);
  }

  Eigen::Index dim() const {
    return std::visit(
        [](const auto& s) -> Eigen::Index {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Box>) return s.lower.size();
          if constexpr (std::is_same_v<S, Ball>) return s.center.size();
          if constexpr (std::is_same_v<S, Segment>) return s.from.size();
          if constexpr (std::is_same_v<S, Halfspaces>) return s.normals.cols();
        },
        shape_);
  }

  /// Nearest member of the set to `x` in the Euclidean norm.
  template <typename Derived>
  VectorT project(const Eigen::MatrixBase<Derived>& x) const {
    if (x.size() != dim()) {
      throw InvalidInput("projection of a point of dimension " + std::to_string(x.size()) +
                         " onto a set of dimension " + std::to_string(dim()));
    }
    return std::visit([&](const auto& s) { return project_onto(s, VectorT(x)); }, shape_);
  }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x, Scalar tol = Scalar(1e-9)) const {
    if (x.size() != dim()) return false;
    return std::visit(
        [&](const auto& s) -> bool {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Box>) {
            return ((x.array() >= s.lower.array() - tol) && (x.array() <= s.upper.array() + tol))
                .all();
          } else if constexpr (std::is_same_v<S, Ball>) {
            return (x - s.center).norm() <= s.radius + tol;
          } else if constexpr (std::is_same_v<S, Segment>) {
            return (VectorT(x) - project_onto(s, VectorT(x))).norm() <= tol;
          } else {
            const VectorT lhs = s.normals * x;
            for (Eigen::Index i = 0; i < lhs.size(); ++i) {
              if (lhs[i] > s.offsets[i] + tol * s.normals.row(i).norm()) return false;
            }
            return true;
          }
        },
        shape_);
  }

  /// Deterministic representative points: corners, centers, endpoints.
  std::vector<VectorT> anchors() const {
    return std::visit(
        [&](const auto& s) -> std::vector<VectorT> {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Box>) {
            return {s.lower, s.upper, (s.lower + s.upper) / Scalar(2)};
          } else if constexpr (std::is_same_v<S, Ball>) {
            VectorT rim = s.center;
            rim[0] += s.radius;
            return {s.center, rim};
          } else if constexpr (std::is_same_v<S, Segment>) {
            return {s.from, s.to, (s.from + s.to) / Scalar(2)};
          } else {
            return {project_onto(s, VectorT::Zero(s.normals.cols()))};
          }
        },
        shape_);
  }

  /// A pseudo-random member of the set.
  template <typename Rng>
  VectorT sample(Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    return std::visit(
        [&](const auto& s) -> VectorT {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, Box>) {
            VectorT x(s.lower.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) {
              x[i] = s.lower[i] + Scalar(unit(rng)) * (s.upper[i] - s.lower[i]);
            }
            return x;
          } else if constexpr (std::is_same_v<S, Ball>) {
            VectorT dir(s.center.size());
            for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = Scalar(gauss(rng));
            const Scalar n = dir.norm();
            if (n == Scalar(0)) return s.center;
            using std::pow;
            const Scalar r =
                s.radius * pow(Scalar(unit(rng)), Scalar(1) / Scalar(s.center.size()));
            return s.center + (r / n) * dir;
          } else if constexpr (std::is_same_v<S, Segment>) {
            return s.from + Scalar(unit(rng)) * (s.to - s.from);
          } else {
            const VectorT base = project_onto(s, VectorT::Zero(s.normals.cols()));
            VectorT x(base.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = base[i] + Scalar(gauss(rng));
            return project_onto(s, x);
          }
        },
        shape_);
  }

  friend bool operator==(const ConvexSet& a, const ConvexSet& b) {
    if (a.shape_.index() != b.shape_.index() || a.dim() != b.dim()) return false;
    return std::visit(
        [&](const auto& s) -> bool {
          using S = std::decay_t<decltype(s)>;
          const S& t = std::get<S>(b.shape_);
          if constexpr (std::is_same_v<S, Box>) return s.lower == t.lower && s.upper == t.upper;
          if constexpr (std::is_same_v<S, Ball>) return s.center == t.center && s.radius == t.radius;
          if constexpr (std::is_same_v<S, Segment>) return s.from == t.from && s.to == t.to;
          if constexpr (std::is_same_v<S, Halfspaces>) {
            return s.normals.rows() == t.normals.rows() && s.normals == t.normals &&
                   s.offsets == t.offsets;
          }
        },
        a.shape_);
  }

private:
  using Shape = std::variant<Box, Ball, Segment, Halfspaces>;

  explicit ConvexSet(Shape shape) : shape_(std::move(shape)) {}

  static VectorT project_onto(const Box& s, const VectorT& x) {
    return x.cwiseMax(s.lower).cwiseMin(s.upper);
  }

  static VectorT project_onto(const Ball& s, const VectorT& x) {
    const VectorT offset = x - s.center;
    const Scalar n = offset.norm();
    if (n <= s.radius) return x;
    return s.center + (s.radius / n) * offset;
  }

  static VectorT project_onto(const Segment& s, const VectorT& x) {
    const VectorT dir = s.to - s.from;
    const Scalar len2 = dir.squaredNorm();
    if (len2 == Scalar(0)) return s.from;
    const Scalar t = std::clamp((x - s.from).dot(dir) / len2, Scalar(0), Scalar(1));
    if (t == Scalar(0)) return s.from;
    if (t == Scalar(1)) return s.to;
    return s.from + t * dir;
  }

  static bool feasible(const Halfspaces& s, const VectorT& p, Scalar scale) {
    const VectorT lhs = s.normals * p;
    for (Eigen::Index i = 0; i < lhs.size(); ++i) {
      const Scalar slack = Scalar(1e-12) * (scale + std::abs(s.offsets[i])) * s.normals.row(i).norm();
      if (lhs[i] > s.offsets[i] + slack) return false;
    }
    return true;
  }

  // Minimize ||p - x||^2 subject to N p <= c. A candidate active set S yields
  // p = x - N_S^T lambda with (N_S N_S^T) lambda = N_S x - c_S; it is the
  // projection iff lambda >= 0 and p is feasible.
  static VectorT project_onto(const Halfspaces& s, const VectorT& x) {
    const Eigen::Index m = s.normals.rows();
    const Eigen::Index n = s.normals.cols();
    const Scalar scale = Scalar(1) + x.norm();
    if (feasible(s, x, scale)) return x;

    std::vector<Eigen::Index> active;
    VectorT result;
    bool found = false;
    const Eigen::Index max_active = std::min(m, n);

    // Depth-first enumeration of index subsets of size k, smallest sets first.
    auto try_subsets = [&](auto&& self, Eigen::Index start, Eigen::Index k) -> void {
      if (found) return;
      if (static_cast<Eigen::Index>(active.size()) == k) {
        MatrixT rows(k, n);
        VectorT rhs(k);
        for (Eigen::Index j = 0; j < k; ++j) {
          rows.row(j) = s.normals.row(active[j]);
          rhs[j] = s.offsets[active[j]];
        }
        const MatrixT gram = rows * rows.transpose();
        Eigen::FullPivLU<MatrixT> lu(gram);
        if (lu.rank() < k) return;
        const VectorT lambda = lu.solve(rows * x - rhs);
        if ((lambda.array() < -Scalar(1e-12) * scale).any()) return;
        VectorT p = x - rows.transpose() * lambda;
        if (!feasible(s, p, scale)) return;
        result = std::move(p);
        found = true;
        return;
      }
      for (Eigen::Index i = start; i < m && !found; ++i) {
        active.push_back(i);
        self(self, i + 1, k);
        active.pop_back();
      }
    };
    for (Eigen::Index k = 1; k <= max_active && !found; ++k) try_subsets(try_subsets, 0, k);
    if (!found) throw InfeasibleSet("halfspace intersection is empty");
    return result;
  }

  Shape shape_;
};

using ConvexSetd = ConvexSet<double>;

template <typename Scalar, typename Derived>
Vector<Scalar> project(const ConvexSet<Scalar>& s, const Eigen::MatrixBase<Derived>& x) {
  return s.project(x);
}

template <typename Scalar>
struct ClosestPair {
  Vector<Scalar> a;
  Vector<Scalar> b;
  Scalar distance;
  std::size_t iterations;
};

/// Alternating projections a_{k+1} = P_A(b_k), b_{k+1} = P_B(a_{k+1}).
///
/// For closed convex A, B with a nearest pair the iterates converge to a pair
/// realizing dist(A, B). Stops once both iterates move less than `tol`; a gap
/// below `tol` is reported as exactly 0 (the sets meet). Throws
/// NonConvergence carrying the last gap if `max_iter` is exhausted.
template <typename Scalar>
ClosestPair<Scalar> closest_points(const ConvexSet<Scalar>& A, const ConvexSet<Scalar>& B,
                                   Scalar tol = Scalar(1e-10), std::size_t max_iter = 100000) {
  if (A.dim() != B.dim()) {
    throw InvalidInput("set_distance between sets of dimension " + std::to_string(A.dim()) +
                       " and " + std::to_string(B.dim()));
  }
  Vector<Scalar> a = A.anchors().front();
  Vector<Scalar> b = B.project(a);
  for (std::size_t k = 1; k <= max_iter; ++k) {
    Vector<Scalar> a_next = A.project(b);
    Vector<Scalar> b_next = B.project(a_next);
    const Scalar moved = std::max((a_next - a).norm(), (b_next - b).norm());
    a = std::move(a_next);
    b = std::move(b_next);
    if (moved < tol) {
      Scalar gap = (a - b).norm();
      if (gap < tol) gap = Scalar(0);
      return {a, b, gap, k};
    }
  }
  throw NonConvergence("alternating projections did not settle in " +
                           std::to_string(max_iter) + " iterations",
                       static_cast<double>((a - b).norm()));
}

/// Euclidean distance between two closed convex sets.
template <typename Scalar>
Scalar set_distance(const ConvexSet<Scalar>& A, const ConvexSet<Scalar>& B,
                    Scalar tol = Scalar(1e-10), std::size_t max_iter = 100000) {
  return closest_points(A, B, tol, max_iter).distance;
}

}  // namespace proxiter
