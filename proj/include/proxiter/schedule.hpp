#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proxiter/contraction.hpp"

namespace proxiter {

enum class SequenceFamily { Constant, OnePlusCOverN, GeometricDecayToLimit, ExplicitTable };

std::string_view to_string(SequenceFamily f);
std::optional<SequenceFamily> parse_family(std::string_view s);

/// A real sequence indexed from n = 1.
///
///   constant                  value
///   one_plus_c_over_n         base + c / n   (base defaults to 1)
///   geometric_decay_to_limit  limit + (start - limit) * ratio^(n - 1)
///   explicit_table            table[n - 1], finite
class Sequence {
public:
  static Sequence constant(double value);
  static Sequence one_plus_c_over_n(double c, double base = 1.0);
  static Sequence geometric(double limit, double start, double ratio);
  static Sequence table(std::vector<double> values);

  SequenceFamily family() const { return family_; }
  double base() const { return a_; }
  double c() const { return b_; }
  double limit() const { return a_; }
  double start() const { return b_; }
  double ratio() const { return c_; }
  const std::vector<double>& values() const { return table_; }

  /// nullopt for infinite families.
  std::optional<std::size_t> length() const;

  double at(std::size_t n) const;

  friend bool operator==(const Sequence&, const Sequence&) = default;

private:
  Sequence(SequenceFamily f, double a, double b, double c, std::vector<double> t = {});

  SequenceFamily family_;
  double a_;
  double b_;
  double c_;
  std::vector<double> table_;
};

struct DeclaredLimits {
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> mu;

  friend bool operator==(const DeclaredLimits&, const DeclaredLimits&) = default;
};

/// n-indexed (alpha_n, beta_n, mu_n, gamma_n), one sequence per component.
struct ParamSchedule {
  Sequence alpha = Sequence::constant(0.0);
  Sequence beta = Sequence::constant(0.0);
  Sequence mu = Sequence::constant(0.0);
  Sequence gamma = Sequence::constant(0.0);
  std::optional<DeclaredLimits> limits;

  /// Throws InvariantViolation if the emitted point breaks ParamPoint bounds,
  /// InvalidInput if n is 0 or past the end of a table.
  ParamPointd at(std::size_t n) const;

  std::optional<std::size_t> length() const;

  friend bool operator==(const ParamSchedule&, const ParamSchedule&) = default;
};

/// Number of trailing indices that stand in for n -> infinity.
std::size_t tail_window(std::size_t horizon);

/// Estimate of lim v_n from v_1..v_horizon.
///
/// The tail must be consistent, to within `tol`, with one of: a constant,
/// L + c/n, or a geometric approach L + C q^n. The first model that fits
/// gives the estimate. nullopt when none fits.
std::optional<double> estimate_limit(const std::vector<double>& values, double tol);

/// |alpha_n + 2 beta_n (1 + mu_n) - 1| < tol over the whole tail window.
bool limit_condition(const ParamSchedule& schedule, std::size_t horizon, double tol = 1e-6);

/// Every declared limit agrees with estimate_limit to within tol.
bool declared_limits_hold(const ParamSchedule& schedule, std::size_t horizon, double tol = 1e-6);

enum class Verdict { StrictContractiveIS, ContractiveIS, StrictPseudoIS, PseudoIS, Unclassified };

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view s);

/// Upper end of the admissible mu-limit range for the strict contractive class.
enum class StrictMuBand {
  /// (1 - alpha - 2 beta) / (2 beta)
  LimitCondition,
  /// (1 - beta) / (2 beta) * min(1, 1 / (alpha + beta))
  Definition,
};

/// Whether a limit point (alpha, beta, mu) meets the limit conditions of a
/// class. Exact comparisons: meant for grid points, not estimated limits.
bool limit_in_class(Verdict v, const ParamPointd& p,
                    StrictMuBand band = StrictMuBand::LimitCondition);

struct ConditionResult {
  std::string name;
  bool passed = true;
  std::optional<std::size_t> failed_at;  // first offending n for per-term checks
  std::string detail;
};

struct DefinitionCheck {
  Verdict definition = Verdict::Unclassified;
  bool passed = true;
  std::vector<ConditionResult> conditions;
};

struct Classification {
  Verdict verdict = Verdict::Unclassified;
  std::vector<DefinitionCheck> checks;  // in precedence order
  bool limit_condition = false;
};

/// Checks the schedule against the four asymptotic classes on n = 1..horizon
/// with limits judged by estimate_limit on the tail window. Precedence:
/// strict contractive, contractive, strict pseudocontractive, pseudocontractive.
Classification classify_schedule(const ParamSchedule& schedule, std::size_t horizon,
                                 double tol = 1e-6,
                                 StrictMuBand band = StrictMuBand::LimitCondition);

}  // namespace proxiter
