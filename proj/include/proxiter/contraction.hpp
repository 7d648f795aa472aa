#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "proxiter/errors.hpp"

namespace proxiter {

/// One term (alpha_n, beta_n, mu_n, gamma_n) of a parameter schedule.
template <typename Scalar>
struct ParamPoint {
  Scalar alpha{0};
  Scalar beta{0};
  Scalar mu{0};
  Scalar gamma{0};

  bool valid() const {
    return std::isfinite(static_cast<double>(alpha)) && std::isfinite(static_cast<double>(beta)) &&
           std::isfinite(static_cast<double>(mu)) && std::isfinite(static_cast<double>(gamma)) &&
           alpha >= Scalar(0) && beta >= Scalar(0) && mu >= Scalar(-1) && gamma >= Scalar(0);
  }

  friend bool operator==(const ParamPoint&, const ParamPoint&) = default;
};

using ParamPointd = ParamPoint<double>;

template <typename Scalar>
void require_valid(const ParamPoint<Scalar>& p) {
  if (!p.valid()) {
    throw InvariantViolation("ParamPoint", "need alpha, beta, gamma >= 0 and mu >= -1, got (" +
                                               std::to_string(double(p.alpha)) + ", " +
                                               std::to_string(double(p.beta)) + ", " +
                                               std::to_string(double(p.mu)) + ", " +
                                               std::to_string(double(p.gamma)) + ")");
  }
}

/// Which contractive inequality is being checked.
///
/// The cross forms carry the mixed term 2 mu beta d(x,y) d(T^n x, T^n y), the
/// squared forms carry 2 mu beta d^2(T^n x, T^n y). Cyclic forms add the
/// gamma D^2 allowance for the gap D between the two sets.
enum class InequalityVariant { Cross, Squared, CyclicCross, CyclicSquared };

constexpr bool is_cyclic(InequalityVariant v) {
  return v == InequalityVariant::CyclicCross || v == InequalityVariant::CyclicSquared;
}

constexpr bool has_cross_term(InequalityVariant v) {
  return v == InequalityVariant::Cross || v == InequalityVariant::CyclicCross;
}

constexpr std::string_view to_string(InequalityVariant v) {
  switch (v) {
    case InequalityVariant::Cross: return "cross";
    case InequalityVariant::Squared: return "squared";
    case InequalityVariant::CyclicCross: return "cyclic_cross";
    case InequalityVariant::CyclicSquared: return "cyclic_squared";
  }
  return "?";
}

inline std::optional<InequalityVariant> parse_variant(std::string_view s) {
  for (auto v : {InequalityVariant::Cross, InequalityVariant::Squared,
                 InequalityVariant::CyclicCross, InequalityVariant::CyclicSquared}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

enum class StepBranch { Nonexpansive, Expansive };

template <typename Scalar>
struct ContractionReport {
  Scalar xi{0};
  Scalar residual{0};
  Scalar k{std::numeric_limits<Scalar>::quiet_NaN()};  // NaN when the branch constant is undefined
  StepBranch branch{StepBranch::Nonexpansive};
  bool holds{false};
};

/// Smallest rho in [-1, 1] with
///   d_diff^2 <= d_xy^2 + d_T^2 + 2 rho d_xy d_T.
/// Returns -1 when d_xy * d_T is (numerically) zero since every rho qualifies.
template <typename Scalar>
Scalar empirical_mu(Scalar d_xy, Scalar d_T, Scalar d_diff) {
  if (d_xy < Scalar(0) || d_T < Scalar(0) || d_diff < Scalar(0)) {
    throw InvalidInput("empirical_mu needs nonnegative distances");
  }
  const Scalar lo = d_xy - d_T;
  const Scalar hi = d_xy + d_T;
  const Scalar slack = Scalar(1e-9) * (Scalar(1) + hi * hi);
  const Scalar d2 = d_diff * d_diff;
  if (d2 < lo * lo - slack || d2 > hi * hi + slack) {
    throw InconsistentDistances("distances violate the norm envelope");
  }
  const Scalar prod = d_xy * d_T;
  if (prod < Scalar(1e-12)) return Scalar(-1);
  const Scalar rho = (d2 - d_xy * d_xy - d_T * d_T) / (Scalar(2) * prod);
  return std::clamp(rho, Scalar(-1), Scalar(1));
}

/// The mu-weighted term 2 mu beta (d_xy d_T or d_T^2) of the inequality.
template <typename Scalar>
Scalar mu_term(InequalityVariant v, const ParamPoint<Scalar>& p, Scalar d_xy, Scalar d_T) {
  const Scalar base = has_cross_term(v) ? d_xy * d_T : d_T * d_T;
  return Scalar(2) * p.mu * p.beta * base;
}

/// Excess of the left side over the ξ-free right side:
///   (1 - beta) d_T^2 - (alpha + beta) d_xy^2 - mu_term.
template <typename Scalar>
Scalar raw_excess(InequalityVariant v, const ParamPoint<Scalar>& p, Scalar d_xy, Scalar d_T) {
  return (Scalar(1) - p.beta) * d_T * d_T - (p.alpha + p.beta) * d_xy * d_xy -
         mu_term(v, p, d_xy, d_T);
}

/// Slack ξ needed for the inequality to hold: max(0, raw_excess). The cyclic
/// allowance gamma D^2 is not part of ξ; it is added in inequality_residual.
template <typename Scalar>
Scalar xi_slack(InequalityVariant v, const ParamPoint<Scalar>& p, Scalar d_xy, Scalar d_T,
                Scalar /*D*/ = Scalar(0)) {
  return std::max(Scalar(0), raw_excess(v, p, d_xy, d_T));
}

template <typename Scalar>
struct ResidualCheck {
  Scalar residual;
  bool holds;
};

/// Right side minus left side of
///   d_T^2 <= alpha d_xy^2 + beta (d_xy^2 + d_T^2) + mu_term + ξ [+ gamma D^2].
template <typename Scalar>
ResidualCheck<Scalar> inequality_residual(InequalityVariant v, const ParamPoint<Scalar>& p,
                                          Scalar d_xy, Scalar d_T, Scalar xi,
                                          Scalar D = Scalar(0)) {
  Scalar rhs = p.alpha * d_xy * d_xy + p.beta * (d_xy * d_xy + d_T * d_T) +
               mu_term(v, p, d_xy, d_T) + xi;
  if (is_cyclic(v)) rhs += p.gamma * D * D;
  const Scalar r = rhs - d_T * d_T;
  return {r, r >= Scalar(-1e-12)};
}

/// alpha + 2 beta (1 + mu) - 1; the limit condition asks this to vanish.
template <typename Scalar>
Scalar limit_gap(const ParamPoint<Scalar>& p) {
  return p.alpha + Scalar(2) * p.beta * (Scalar(1) + p.mu) - Scalar(1);
}

/// Constant for steps that do not expand: (alpha + beta(1 + 2 mu)) / (1 - beta).
/// It is <= 1 exactly when limit_gap(p) <= 0.
template <typename Scalar>
Scalar k_a(const ParamPoint<Scalar>& p) {
  if (p.beta >= Scalar(1)) {
    throw DivisionRegime("nonexpansive-step constant needs beta < 1");
  }
  return (p.alpha + p.beta * (Scalar(1) + Scalar(2) * p.mu)) / (Scalar(1) - p.beta);
}

/// Constant for expanding steps: (alpha + beta) / (1 - beta(1 + 2 mu)).
template <typename Scalar>
Scalar k_b(const ParamPoint<Scalar>& p) {
  const Scalar den = Scalar(1) - p.beta * (Scalar(1) + Scalar(2) * p.mu);
  if (den <= Scalar(0)) {
    throw DivisionRegime("expanding-step constant needs beta (1 + 2 mu) < 1");
  }
  return (p.alpha + p.beta) / den;
}

template <typename Scalar>
bool k_a_at_most_one(const ParamPoint<Scalar>& p) {
  return limit_gap(p) <= Scalar(0);
}

template <typename Scalar>
struct Interval {
  Scalar lo;
  Scalar hi;
  bool contains(Scalar x) const { return lo <= x && x <= hi; }
  bool empty() const { return lo > hi; }
};

/// mu values for which k_b >= 1 (requires beta > 0):
///   [(1 - alpha - 2 beta) / (2 beta), (1 - beta) / (2 beta)].
template <typename Scalar>
Interval<Scalar> k_b_unit_band(const ParamPoint<Scalar>& p) {
  if (p.beta <= Scalar(0)) throw InvalidInput("mu band needs beta > 0");
  const Scalar two_beta = Scalar(2) * p.beta;
  return {(Scalar(1) - p.alpha - two_beta) / two_beta, (Scalar(1) - p.beta) / two_beta};
}

/// Which disjunct of the zero-slack region a parameter point falls in.
enum class XiZeroRegion { LowBeta, HighBeta, MuBand, None };

constexpr std::string_view to_string(XiZeroRegion r) {
  switch (r) {
    case XiZeroRegion::LowBeta: return "low_beta";
    case XiZeroRegion::HighBeta: return "high_beta";
    case XiZeroRegion::MuBand: return "mu_band";
    case XiZeroRegion::None: return "none";
  }
  return "?";
}

/// Classifies (alpha, beta, mu) against the three disjuncts
///   low_beta : mu in [-(alpha+beta)/(2 beta), (1-alpha-2 beta)/(2 beta)] and beta < 1
///   high_beta: mu < -(alpha+beta)/(2 beta) and beta > 1
///   mu_band  : mu in [(1-alpha-2 beta)/(2 beta), (1-beta)/(2 beta)]
/// taking the first that matches. beta = 0 sends every band endpoint to
/// +-infinity; the low_beta band then covers all mu when alpha <= 1 and is
/// empty otherwise.
///
/// `band_distance`, when given, divides the upper end of the low_beta band by
/// d(x, y) as in the cyclic form of the constraint.
template <typename Scalar>
XiZeroRegion region_xi_zero(const ParamPoint<Scalar>& p,
                            std::optional<Scalar> band_distance = std::nullopt) {
  if (p.beta == Scalar(0)) return p.alpha <= Scalar(1) ? XiZeroRegion::LowBeta : XiZeroRegion::None;
  const Scalar two_beta = Scalar(2) * p.beta;
  const Scalar low = -(p.alpha + p.beta) / two_beta;
  const Scalar mid = (Scalar(1) - p.alpha - two_beta) / two_beta;
  Scalar low_band_hi = mid;
  if (band_distance) {
    if (!(*band_distance > Scalar(0))) throw InvalidInput("band distance must be positive");
    low_band_hi = mid / *band_distance;
  }
  const Scalar high = (Scalar(1) - p.beta) / two_beta;
  if (p.beta < Scalar(1) && low <= p.mu && p.mu <= low_band_hi) return XiZeroRegion::LowBeta;
  if (p.beta > Scalar(1) && p.mu < low) return XiZeroRegion::HighBeta;
  if (mid <= p.mu && p.mu <= high) return XiZeroRegion::MuBand;
  return XiZeroRegion::None;
}

/// Per-step bound implied by the inequality on each branch:
///   nonexpansive: d_T^2 <= k_a d_xy^2 + ξ / (1 - beta)
///   expansive:    d_T^2 <= k_b d_xy^2 + ξ / (1 - beta(1 + 2 mu))
/// Throws BranchMismatch if the distances or parameters are off-branch.
template <typename Scalar>
bool bound_check(StepBranch branch, const ParamPoint<Scalar>& p, Scalar d_xy, Scalar d_T,
                 Scalar xi) {
  Scalar k;
  Scalar den;
  if (branch == StepBranch::Nonexpansive) {
    if (d_T > d_xy) throw BranchMismatch("nonexpansive branch needs d(T^n x, T^n y) <= d(x, y)");
    if (p.beta >= Scalar(1)) throw BranchMismatch("nonexpansive branch needs beta < 1");
    k = k_a(p);
    den = Scalar(1) - p.beta;
  } else {
    if (d_T < d_xy) throw BranchMismatch("expansive branch needs d(T^n x, T^n y) >= d(x, y)");
    den = Scalar(1) - p.beta * (Scalar(1) + Scalar(2) * p.mu);
    if (den <= Scalar(0)) throw BranchMismatch("expansive branch needs beta (1 + 2 mu) < 1");
    k = k_b(p);
  }
  const Scalar bound = k * d_xy * d_xy + xi / den;
  using std::abs;
  return d_T * d_T <= bound + Scalar(1e-12) * (Scalar(1) + abs(bound));
}

/// Evaluates one step: slack, residual, branch and its constant.
template <typename Scalar>
ContractionReport<Scalar> contraction_report(InequalityVariant v, const ParamPoint<Scalar>& p,
                                             Scalar d_xy, Scalar d_T, Scalar D = Scalar(0)) {
  ContractionReport<Scalar> r;
  r.xi = xi_slack(v, p, d_xy, d_T, D);
  const auto check = inequality_residual(v, p, d_xy, d_T, r.xi, D);
  r.residual = check.residual;
  r.holds = check.holds;
  // Cyclic forms split strictly (d_T < d_xy is the nonexpansive side).
  const bool shrinking = is_cyclic(v) ? d_T < d_xy : d_T <= d_xy;
  r.branch = shrinking ? StepBranch::Nonexpansive : StepBranch::Expansive;
  // The cyclic squared form only admits the expanding constant, and beta >= 1
  // leaves k_a undefined, so both fall back to k_b.
  const bool use_a = shrinking && v != InequalityVariant::CyclicSquared && p.beta < Scalar(1);
  try {
    r.k = use_a ? k_a(p) : k_b(p);
  } catch (const DivisionRegime&) {
    r.k = std::numeric_limits<Scalar>::quiet_NaN();
  }
  return r;
}

}  // namespace proxiter
