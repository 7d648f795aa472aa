#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "proxiter/contraction.hpp"
#include "proxiter/convex_set.hpp"
#include "proxiter/errors.hpp"
#include "proxiter/metric.hpp"
#include "proxiter/orbit.hpp"

namespace proxiter {

enum class SetRole { A, B };

/// Two closed convex sets and a map that should send each into the other.
/// D = dist(A, B) is computed once by alternating projections.
template <typename Scalar>
class CyclicPair {
public:
  CyclicPair(ConvexSet<Scalar> A, ConvexSet<Scalar> B, PiecewiseAffineMap<Scalar> T,
             Scalar tol = Scalar(1e-10), std::size_t max_iter = 100000)
      : A_(std::move(A)), B_(std::move(B)), T_(std::move(T)) {
    if (A_.dim() != B_.dim() || A_.dim() != T_.dim()) {
      throw InvariantViolation("CyclicPair", "sets and map must share a dimension");
    }
    const auto closest = closest_points(A_, B_, tol, max_iter);
    D_ = closest.distance;
    proximal_a_ = closest.a;
    proximal_b_ = closest.b;
  }

  const ConvexSet<Scalar>& A() const { return A_; }
  const ConvexSet<Scalar>& B() const { return B_; }
  const ConvexSet<Scalar>& set(SetRole r) const { return r == SetRole::A ? A_ : B_; }
  const PiecewiseAffineMap<Scalar>& T() const { return T_; }
  Scalar D() const { return D_; }
  /// A nearest pair (a, b) with |a - b| = D from the alternating projections.
  const Vector<Scalar>& proximal_a() const { return proximal_a_; }
  const Vector<Scalar>& proximal_b() const { return proximal_b_; }

private:
  ConvexSet<Scalar> A_;
  ConvexSet<Scalar> B_;
  PiecewiseAffineMap<Scalar> T_;
  Scalar D_{0};
  Vector<Scalar> proximal_a_;
  Vector<Scalar> proximal_b_;
};

using CyclicPaird = CyclicPair<double>;

constexpr SetRole other(SetRole r) { return r == SetRole::A ? SetRole::B : SetRole::A; }

template <typename Scalar>
struct CyclicityCounterexample {
  Vector<Scalar> point;
  Vector<Scalar> image;
  SetRole from;
  std::size_t sample;  // index among the points drawn from `from`
};

template <typename Scalar>
struct CyclicityCheck {
  bool ok = true;
  std::optional<CyclicityCounterexample<Scalar>> counterexample;
};

/// Checks T(A) in B and T(B) in A on the anchors of each set followed by
/// `sample_count` seeded random members. Stops at the first violation.
template <typename Scalar>
CyclicityCheck<Scalar> verify_cyclicity(const CyclicPair<Scalar>& pair, std::size_t sample_count,
                                        std::uint64_t seed, Scalar tol = Scalar(1e-9)) {
  if (sample_count < 1) throw InvalidInput("verify_cyclicity needs sample_count >= 1");
  std::mt19937_64 rng(seed);
  for (SetRole from : {SetRole::A, SetRole::B}) {
    const auto& source = pair.set(from);
    const auto& target = pair.set(other(from));
    std::vector<Vector<Scalar>> points = source.anchors();
    for (std::size_t i = 0; i < sample_count; ++i) points.push_back(source.sample(rng));
    for (std::size_t i = 0; i < points.size(); ++i) {
      Vector<Scalar> image = pair.T()(points[i]);
      if (!target.contains(image, tol)) {
        return {false, CyclicityCounterexample<Scalar>{points[i], std::move(image), from, i}};
      }
    }
  }
  return {};
}

/// The step constant with its cyclic branch: the nonexpansive form
/// (alpha + beta(1 + 2 mu)) / (1 - beta) or the expansive form
/// (alpha + beta) / (1 - beta(1 + 2 mu)).
template <typename Scalar>
Scalar cyclic_k(const ParamPoint<Scalar>& p, bool expansive_step) {
  return expansive_step ? k_b(p) : k_a(p);
}

/// Smallest admissible gamma for constant k: max(0, 1 - k).
template <typename Scalar>
Scalar gamma_floor(Scalar k) {
  return std::max(Scalar(0), Scalar(1) - k);
}

template <typename Scalar>
Scalar gamma_floor(const ParamPoint<Scalar>& p, bool expansive_step) {
  return gamma_floor(cyclic_k(p, expansive_step));
}

/// gamma_n = delta (1 - k_n)(1 - beta_n), the gap allowance that keeps a
/// strictly contractive cyclic map converging to best proximity points.
template <typename Scalar>
Scalar proximity_gamma(Scalar delta, Scalar k, Scalar beta) {
  if (!(delta >= Scalar(0))) throw InvalidInput("delta must be nonnegative");
  if (!(k >= Scalar(0) && k <= Scalar(1))) throw InvalidInput("k must lie in [0, 1]");
  if (!(beta >= Scalar(0) && beta <= Scalar(1))) throw InvalidInput("beta must lie in [0, 1]");
  return delta * (Scalar(1) - k) * (Scalar(1) - beta);
}

/// Side condition paired with proximity_gamma: beta <= 1 implies
/// mu <= -(1 + alpha) / 2.
template <typename Scalar>
bool proximity_side_condition(const ParamPoint<Scalar>& p) {
  return p.beta > Scalar(1) || p.mu <= -(Scalar(1) + p.alpha) / Scalar(2);
}

/// A nonexpansive step with beta = 1 admits no gap allowance (gamma = 0).
template <typename Scalar>
bool nonexpansive_gamma_admissible(const ParamPoint<Scalar>& p, bool nonexpansive_step) {
  return !(nonexpansive_step && p.beta == Scalar(1) && p.gamma != Scalar(0));
}

template <typename Scalar>
struct ProximityResult {
  Vector<Scalar> z;   // limit of the even iterates, in the start set
  Vector<Scalar> Tz;  // its image, in the other set
  SetRole z_set = SetRole::A;
  Scalar D_hat{0};
  Scalar even_limit_gap{0};
  Scalar odd_limit_gap{0};
  bool converged = false;
  std::size_t iterations = 0;
};

namespace detail {

template <typename Scalar, typename Derived>
SetRole start_role(const CyclicPair<Scalar>& pair, const Eigen::MatrixBase<Derived>& x0,
                   Scalar tol) {
  require_point(x0, "start point");
  if (x0.size() != pair.A().dim()) throw InvalidInput("start point has the wrong dimension");
  if (pair.A().contains(x0, tol)) return SetRole::A;
  if (pair.B().contains(x0, tol)) return SetRole::B;
  throw InvalidInput("start point lies in neither A nor B");
}

// Orbit of x0 checking that iterate k lies in the start set for even k and in
// the other set for odd k.
template <typename Scalar, typename Derived>
std::vector<Vector<Scalar>> cyclic_orbit(const CyclicPair<Scalar>& pair,
                                         const Eigen::MatrixBase<Derived>& x0, std::size_t N,
                                         SetRole start, Scalar tol) {
  std::vector<Vector<Scalar>> pts;
  pts.reserve(N + 1);
  pts.emplace_back(x0);
  for (std::size_t k = 1; k <= N; ++k) {
    pts.push_back(pair.T()(pts.back()));
    const SetRole expected = (k % 2 == 0) ? start : other(start);
    if (!pair.set(expected).contains(pts.back(), tol)) {
      throw CyclicityViolation("iterate " + std::to_string(k) + " left set " +
                                   (expected == SetRole::A ? "A" : "B"),
                               k);
    }
  }
  return pts;
}

}  // namespace detail

/// Runs the cyclic orbit of x0 for N steps and reads off the limiting pair.
///
/// z is the last even iterate (in the start set), Tz its image. The even and
/// odd gaps are the largest d(T^k x, T^{k+2} x) over the last 10 even and the
/// last 10 odd k. Converged when both gaps and |d(z, Tz) - D| are below tol.
template <typename Scalar, typename Derived>
ProximityResult<Scalar> best_proximity_run(const CyclicPair<Scalar>& pair,
                                           const Eigen::MatrixBase<Derived>& x0, std::size_t N,
                                           Scalar tol = Scalar(1e-9)) {
  if (N < 4) throw InvalidInput("best_proximity_run needs N >= 4");
  constexpr Scalar kMembershipTol = Scalar(1e-9);
  const SetRole start = detail::start_role(pair, x0, kMembershipTol);
  const auto pts = detail::cyclic_orbit(pair, x0, N, start, kMembershipTol);

  auto tail_gap = [&](std::size_t parity) {
    Scalar worst(0);
    std::size_t taken = 0;
    for (std::size_t k = N - 2; taken < 10; --k) {
      if (k % 2 == parity) {
        worst = std::max(worst, Scalar((pts[k] - pts[k + 2]).norm()));
        ++taken;
      }
      if (k == 0) break;
    }
    return worst;
  };

  ProximityResult<Scalar> r;
  const std::size_t last_even = (N % 2 == 0) ? N : N - 1;
  r.z = pts[last_even];
  r.Tz = pair.T()(r.z);
  r.z_set = start;
  r.D_hat = pair.D();
  r.even_limit_gap = tail_gap(0);
  r.odd_limit_gap = tail_gap(1);
  r.iterations = N;
  using std::abs;
  r.converged = r.even_limit_gap < tol && r.odd_limit_gap < tol &&
                abs((r.z - r.Tz).norm() - r.D_hat) < tol;
  return r;
}

/// d(T^n x, T^{n+1} x) for n = 0 .. N-1 along a checked cyclic orbit.
template <typename Scalar, typename Derived>
std::vector<Scalar> proximity_distance_trace(const CyclicPair<Scalar>& pair,
                                             const Eigen::MatrixBase<Derived>& x0, std::size_t N) {
  constexpr Scalar kMembershipTol = Scalar(1e-9);
  const SetRole start = detail::start_role(pair, x0, kMembershipTol);
  const auto pts = detail::cyclic_orbit(pair, x0, N, start, kMembershipTol);
  std::vector<Scalar> out;
  out.reserve(N);
  for (std::size_t n = 0; n < N; ++n) out.push_back((pts[n + 1] - pts[n]).norm());
  return out;
}

template <typename Scalar>
std::vector<Vector<Scalar>> random_starts(const ConvexSet<Scalar>& set, std::size_t count,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vector<Scalar>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(set.sample(rng));
  return out;
}

template <typename Scalar>
struct MultiStartAgreement {
  std::vector<ProximityResult<Scalar>> runs;
  bool all_converged = false;
  Scalar spread{0};  // largest pairwise distance between the z's
};

/// Runs best_proximity_run from each start; agreement of the z's is the
/// empirical face of uniqueness of the best proximity point.
template <typename Scalar>
MultiStartAgreement<Scalar> multi_start_agreement(const CyclicPair<Scalar>& pair,
                                                  const std::vector<Vector<Scalar>>& starts,
                                                  std::size_t N, Scalar tol = Scalar(1e-9)) {
  MultiStartAgreement<Scalar> out;
  out.all_converged = true;
  for (const auto& s : starts) {
    out.runs.push_back(best_proximity_run(pair, s, N, tol));
    out.all_converged = out.all_converged && out.runs.back().converged;
  }
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    for (std::size_t j = i + 1; j < out.runs.size(); ++j) {
      out.spread = std::max(out.spread, Scalar((out.runs[i].z - out.runs[j].z).norm()));
    }
  }
  return out;
}

}  // namespace proxiter
