#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "proxiter/errors.hpp"

namespace proxiter {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vectord = Vector<double>;
using Matrixd = Matrix<double>;

/// Throws unless every coordinate of `x` is finite and `x` is non-empty.
template <typename Derived>
void require_point(const Eigen::MatrixBase<Derived>& x, const char* what = "point") {
  if (x.size() == 0) throw InvalidInput(std::string(what) + " has dimension 0");
  if (!x.allFinite()) throw InvalidInput(std::string(what) + " has a non-finite coordinate");
}

template <typename A, typename B>
void require_same_dim(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  if (x.size() != y.size()) {
    throw InvalidInput("dimension mismatch: " + std::to_string(x.size()) + " vs " +
                       std::to_string(y.size()));
  }
}

enum class MetricKind { Euclidean, PNorm, WeightedEuclidean };

/// A norm-induced metric d(x, y) = ||x - y|| on R^n.
///
/// Every kind is homogeneous and translation invariant. The ambient space is
/// uniformly convex for the Euclidean, weighted and 1 < p < inf cases; p = 1 and
/// p = inf are accepted but report `uniformly_convex() == false`.
template <typename Scalar>
class Metric {
public:
  static Metric euclidean() { return Metric(MetricKind::Euclidean, Scalar(2), {}); }

  static Metric p_norm(Scalar p) {
    if (!(p >= Scalar(1))) throw InvalidInput("p-norm requires p >= 1");
    return Metric(MetricKind::PNorm, p, {});
  }

  static Metric weighted(Vector<Scalar> weights) {
    require_point(weights, "metric weights");
    if ((weights.array() <= Scalar(0)).any()) {
      throw InvalidInput("weighted metric requires positive weights");
    }
    return Metric(MetricKind::WeightedEuclidean, Scalar(2), std::move(weights));
  }

  MetricKind kind() const { return kind_; }
  Scalar p() const { return p_; }
  const Vector<Scalar>& weights() const { return weights_; }

  bool uniformly_convex() const {
    if (kind_ != MetricKind::PNorm) return true;
    return p_ > Scalar(1) && std::isfinite(static_cast<double>(p_));
  }

  /// The norm the metric is induced by.
  template <typename Derived>
  Scalar norm(const Eigen::MatrixBase<Derived>& v) const {
    using std::abs;
    using std::pow;
    using std::sqrt;
    switch (kind_) {
      case MetricKind::Euclidean:
        return v.norm();
      case MetricKind::PNorm:
        if (p_ == Scalar(1)) return v.template lpNorm<1>();
        if (p_ == Scalar(2)) return v.norm();
        if (!std::isfinite(static_cast<double>(p_))) return v.template lpNorm<Eigen::Infinity>();
        {
          // Scale by the largest entry so the p-th powers stay representable.
          const Scalar scale = v.cwiseAbs().maxCoeff();
          if (scale == Scalar(0)) return Scalar(0);
          Scalar acc(0);
          for (Eigen::Index i = 0; i < v.size(); ++i) acc += pow(abs(v[i]) / scale, p_);
          return scale * pow(acc, Scalar(1) / p_);
        }
      case MetricKind::WeightedEuclidean:
        if (weights_.size() != v.size()) {
          throw InvalidInput("weighted metric has " + std::to_string(weights_.size()) +
                             " weights for a vector of dimension " +
                             std::to_string(v.size()));
        }
        return sqrt((weights_.array() * v.array().square()).sum());
    }
    return Scalar(0);
  }

  template <typename A, typename B>
  Scalar operator()(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) const {
    require_same_dim(x, y);
    require_point(x);
    require_point(y);
    return norm(x - y);
  }

  friend bool operator==(const Metric& a, const Metric& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ == MetricKind::PNorm && a.p_ != b.p_) return false;
    if (a.kind_ == MetricKind::WeightedEuclidean) {
      return a.weights_.size() == b.weights_.size() && a.weights_ == b.weights_;
    }
    return true;
  }

private:
  Metric(MetricKind kind, Scalar p, Vector<Scalar> weights)
      : kind_(kind), p_(p), weights_(std::move(weights)) {}

  MetricKind kind_;
  Scalar p_;
  Vector<Scalar> weights_;
};

using Metricd = Metric<double>;

template <typename Scalar, typename A, typename B>
Scalar distance(const Metric<Scalar>& m, const Eigen::MatrixBase<A>& x,
                const Eigen::MatrixBase<B>& y) {
  return m(x, y);
}

template <typename Scalar>
struct EnvelopeSlack {
  Scalar lower;
  Scalar upper;
};

/// Slack on both sides of the norm envelope
///   (d(x,y) - d(u,v))^2 <= d^2(x - y, u - v) <= (d(x,y) + d(u,v))^2
/// where u, v stand for the images T^n x, T^n y. Both slacks are nonnegative
/// up to rounding for any norm-induced metric, which also shows that the set
/// of admissible correlation coefficients rho is never empty.
template <typename Scalar, typename X, typename Y, typename U, typename V>
EnvelopeSlack<Scalar> envelope_residuals(const Metric<Scalar>& m, const Eigen::MatrixBase<X>& x,
                                         const Eigen::MatrixBase<Y>& y,
                                         const Eigen::MatrixBase<U>& u,
                                         const Eigen::MatrixBase<V>& v) {
  require_same_dim(x, y);
  require_same_dim(x, u);
  require_same_dim(x, v);
  const Scalar d_xy = m(x, y);
  const Scalar d_uv = m(u, v);
  const Scalar d_diff = m.norm((x - y) - (u - v));
  const Scalar lo = d_xy - d_uv;
  const Scalar hi = d_xy + d_uv;
  return {d_diff * d_diff - lo * lo, hi * hi - d_diff * d_diff};
}

}  // namespace proxiter
