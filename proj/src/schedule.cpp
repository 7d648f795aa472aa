#include "proxiter/schedule.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "proxiter/errors.hpp"

namespace proxiter {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_real(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// (1 - beta) / (2 beta), +inf at beta = 0.
double mu_ceiling(double beta) { return beta == 0.0 ? kInf : (1.0 - beta) / (2.0 * beta); }

double strict_mu_upper(double alpha, double beta, StrictMuBand band) {
  if (band == StrictMuBand::LimitCondition) {
    if (beta == 0.0) return alpha <= 1.0 ? kInf : -kInf;
    return (1.0 - alpha - 2.0 * beta) / (2.0 * beta);
  }
  const double s = alpha + beta;
  return mu_ceiling(beta) * (s > 0.0 ? std::min(1.0, 1.0 / s) : 1.0);
}

}  // namespace

std::string_view to_string(SequenceFamily f) {
  switch (f) {
    case SequenceFamily::Constant: return "constant";
    case SequenceFamily::OnePlusCOverN: return "one_plus_c_over_n";
    case SequenceFamily::GeometricDecayToLimit: return "geometric_decay_to_limit";
    case SequenceFamily::ExplicitTable: return "explicit_table";
  }
  return "?";
}

std::optional<SequenceFamily> parse_family(std::string_view s) {
  for (auto f : {SequenceFamily::Constant, SequenceFamily::OnePlusCOverN,
                 SequenceFamily::GeometricDecayToLimit, SequenceFamily::ExplicitTable}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

Sequence::Sequence(SequenceFamily f, double a, double b, double c, std::vector<double> t)
    : family_(f), a_(a), b_(b), c_(c), table_(std::move(t)) {}

Sequence Sequence::constant(double value) {
  if (!std::isfinite(value)) throw InvalidInput("constant sequence value must be finite");
  return Sequence(SequenceFamily::Constant, value, 0.0, 0.0);
}

Sequence Sequence::one_plus_c_over_n(double c, double base) {
  if (!std::isfinite(c) || !std::isfinite(base)) {
    throw InvalidInput("one_plus_c_over_n parameters must be finite");
  }
  return Sequence(SequenceFamily::OnePlusCOverN, base, c, 0.0);
}

Sequence Sequence::geometric(double limit, double start, double ratio) {
  if (!std::isfinite(limit) || !std::isfinite(start)) {
    throw InvalidInput("geometric_decay_to_limit parameters must be finite");
  }
  if (!(ratio >= 0.0 && ratio < 1.0)) {
    throw InvalidInput("geometric_decay_to_limit ratio must lie in [0, 1)");
  }
  return Sequence(SequenceFamily::GeometricDecayToLimit, limit, start, ratio);
}

Sequence Sequence::table(std::vector<double> values) {
  if (values.empty()) throw InvalidInput("explicit_table needs at least one value");
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidInput("explicit_table values must be finite");
  }
  return Sequence(SequenceFamily::ExplicitTable, 0.0, 0.0, 0.0, std::move(values));
}

std::optional<std::size_t> Sequence::length() const {
  if (family_ == SequenceFamily::ExplicitTable) return table_.size();
  return std::nullopt;
}

double Sequence::at(std::size_t n) const {
  if (n == 0) throw InvalidInput("sequences are indexed from n = 1");
  switch (family_) {
    case SequenceFamily::Constant:
      return a_;
    case SequenceFamily::OnePlusCOverN:
      return a_ + b_ / static_cast<double>(n);
    case SequenceFamily::GeometricDecayToLimit:
      return a_ + (b_ - a_) * std::pow(c_, static_cast<double>(n - 1));
    case SequenceFamily::ExplicitTable:
      if (n > table_.size()) {
        throw InvalidInput("explicit_table has " + std::to_string(table_.size()) +
                           " entries, index " + std::to_string(n) + " requested");
      }
      return table_[n - 1];
  }
  return 0.0;
}

ParamPointd ParamSchedule::at(std::size_t n) const {
  ParamPointd p{alpha.at(n), beta.at(n), mu.at(n), gamma.at(n)};
  if (!p.valid()) {
    throw InvariantViolation("ParamPoint", "schedule term n = " + std::to_string(n) +
                                               " is (" + fmt_real(p.alpha) + ", " +
                                               fmt_real(p.beta) + ", " + fmt_real(p.mu) + ", " +
                                               fmt_real(p.gamma) +
                                               "); need alpha, beta, gamma >= 0, mu >= -1");
  }
  return p;
}

std::optional<std::size_t> ParamSchedule::length() const {
  std::optional<std::size_t> len;
  for (const Sequence* s : {&alpha, &beta, &mu, &gamma}) {
    if (auto l = s->length()) len = len ? std::min(*len, *l) : *l;
  }
  return len;
}

std::size_t tail_window(std::size_t horizon) { return std::max<std::size_t>(20, horizon / 5); }

std::optional<double> estimate_limit(const std::vector<double>& values, double tol) {
  const std::size_t H = values.size();
  if (H == 0) return std::nullopt;
  const std::size_t w = std::min(H, tail_window(H));
  const std::size_t first = H - w + 1;  // 1-based index of the first tail term
  auto v = [&](std::size_t n) { return values[n - 1]; };
  const double last = v(H);

  double spread = 0.0;
  for (std::size_t n = first; n <= H; ++n) spread = std::max(spread, std::abs(v(n) - last));
  if (spread < tol) return last;
  if (w < 3) return std::nullopt;

  // L + c / n, least squares over the tail.
  {
    Eigen::MatrixXd basis(w, 2);
    Eigen::VectorXd rhs(w);
    for (std::size_t i = 0; i < w; ++i) {
      const double n = static_cast<double>(first + i);
      basis(i, 0) = 1.0;
      basis(i, 1) = 1.0 / n;
      rhs[i] = v(first + i);
    }
    const Eigen::Vector2d coef = basis.colPivHouseholderQr().solve(rhs);
    const double worst = (basis * coef - rhs).cwiseAbs().maxCoeff();
    if (worst < tol) return coef[0];
  }

  // L + C q^n via three equally spaced tail terms.
  {
    const std::size_t n1 = ((H - first) % 2 == 0) ? first : first + 1;
    const std::size_t n3 = H;
    const std::size_t h = (n3 - n1) / 2;
    const std::size_t n2 = n1 + h;
    const double d1 = v(n2) - v(n1);
    const double d2 = v(n3) - v(n2);
    if (h > 0 && d1 != 0.0) {
      const double q = d2 / d1;
      if (q > 0.0 && q < 1.0) {
        const double limit = v(n3) + d2 * q / (1.0 - q);
        const double amp = v(n1) - limit;
        double worst = 0.0;
        for (std::size_t n = first; n <= H; ++n) {
          const double t = (static_cast<double>(n) - static_cast<double>(n1)) / static_cast<double>(h);
          worst = std::max(worst, std::abs(limit + amp * std::pow(q, t) - v(n)));
        }
        if (worst < tol) return limit;
      }
    }
  }
  return std::nullopt;
}

namespace {

void require_horizon(const ParamSchedule& s, std::size_t horizon) {
  if (horizon < tail_window(horizon)) {
    throw InvalidInput("horizon " + std::to_string(horizon) + " is shorter than the tail window " +
                       std::to_string(tail_window(horizon)));
  }
  if (auto len = s.length(); len && *len < horizon) {
    throw InvalidInput("schedule emits " + std::to_string(*len) + " terms, horizon is " +
                       std::to_string(horizon));
  }
}

struct Terms {
  std::vector<double> alpha, beta, mu;
};

Terms collect(const ParamSchedule& s, std::size_t horizon) {
  Terms t;
  t.alpha.reserve(horizon);
  t.beta.reserve(horizon);
  t.mu.reserve(horizon);
  for (std::size_t n = 1; n <= horizon; ++n) {
    const ParamPointd p = s.at(n);
    t.alpha.push_back(p.alpha);
    t.beta.push_back(p.beta);
    t.mu.push_back(p.mu);
  }
  return t;
}

ConditionResult for_all_n(std::string name, std::size_t horizon,
                          const std::function<bool(std::size_t)>& ok) {
  ConditionResult r;
  r.name = std::move(name);
  for (std::size_t n = 1; n <= horizon; ++n) {
    if (!ok(n)) {
      r.passed = false;
      r.failed_at = n;
      return r;
    }
  }
  return r;
}

// Limit of `values`: the declared one if given (and it must match the tail),
// otherwise the estimate. An estimate is only good to tol, so range checks
// treat a limit within tol of an open end as lying on it.
struct LimitResult {
  std::optional<double> value;
  std::string detail;
};

LimitResult limit_of(const std::vector<double>& values, std::optional<double> declared,
                     double tol) {
  const auto est = estimate_limit(values, tol);
  if (!est) return {std::nullopt, "tail does not settle"};
  if (declared) {
    if (std::abs(*est - *declared) >= tol) {
      return {std::nullopt, "tail settles at " + fmt_real(*est) + ", declared " +
                                fmt_real(*declared)};
    }
    return {*declared, "limit " + fmt_real(*declared)};
  }
  return {*est, "limit " + fmt_real(*est)};
}

ConditionResult converges_to(std::string name, const std::vector<double>& values,
                             std::optional<double> declared, double target, double tol) {
  ConditionResult r;
  r.name = std::move(name);
  const auto lim = limit_of(values, declared, tol);
  r.detail = lim.detail;
  r.passed = lim.value && std::abs(*lim.value - target) < tol;
  if (!r.passed) r.failed_at = values.size();
  return r;
}

ConditionResult converges_into(std::string name, const LimitResult& lim,
                               const std::function<bool(double)>& in_range,
                               std::size_t horizon) {
  ConditionResult r;
  r.name = std::move(name);
  r.detail = lim.detail;
  r.passed = lim.value && in_range(*lim.value);
  if (!r.passed) r.failed_at = horizon;
  return r;
}

void finish(DefinitionCheck& d) {
  d.passed = std::all_of(d.conditions.begin(), d.conditions.end(),
                         [](const ConditionResult& c) { return c.passed; });
}

}  // namespace

bool limit_condition(const ParamSchedule& schedule, std::size_t horizon, double tol) {
  require_horizon(schedule, horizon);
  const std::size_t w = tail_window(horizon);
  for (std::size_t n = horizon - w + 1; n <= horizon; ++n) {
    if (!(std::abs(limit_gap(schedule.at(n))) < tol)) return false;
  }
  return true;
}

bool declared_limits_hold(const ParamSchedule& schedule, std::size_t horizon, double tol) {
  require_horizon(schedule, horizon);
  if (!schedule.limits) return true;
  const Terms t = collect(schedule, horizon);
  auto check = [&](const std::vector<double>& values, std::optional<double> declared) {
    if (!declared) return true;
    const auto est = estimate_limit(values, tol);
    return est && std::abs(*est - *declared) < tol;
  };
  return check(t.alpha, schedule.limits->alpha) && check(t.beta, schedule.limits->beta) &&
         check(t.mu, schedule.limits->mu);
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::StrictContractiveIS: return "StrictContractiveIS";
    case Verdict::ContractiveIS: return "ContractiveIS";
    case Verdict::StrictPseudoIS: return "StrictPseudoIS";
    case Verdict::PseudoIS: return "PseudoIS";
    case Verdict::Unclassified: return "Unclassified";
  }
  return "?";
}

std::optional<Verdict> parse_verdict(std::string_view s) {
  for (auto v : {Verdict::StrictContractiveIS, Verdict::ContractiveIS, Verdict::StrictPseudoIS,
                 Verdict::PseudoIS, Verdict::Unclassified}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

bool limit_in_class(Verdict v, const ParamPointd& p, StrictMuBand band) {
  if (!p.valid()) return false;
  switch (v) {
    case Verdict::StrictContractiveIS:
      return p.alpha < 1.0 && p.beta < 1.0 && p.mu < strict_mu_upper(p.alpha, p.beta, band);
    case Verdict::ContractiveIS:
      return p.alpha < 1.0 && p.beta == 1.0 && p.mu < -(1.0 + p.alpha) / 2.0;
    case Verdict::StrictPseudoIS:
      return p.alpha == 1.0 && p.beta < 1.0 && p.mu == -1.0;
    case Verdict::PseudoIS:
      return p.alpha == 1.0 && p.beta == 1.0 && p.mu == -1.0;
    case Verdict::Unclassified:
      break;
  }
  return false;
}

Classification classify_schedule(const ParamSchedule& schedule, std::size_t horizon, double tol,
                                 StrictMuBand band) {
  require_horizon(schedule, horizon);
  Classification out;

  Terms t;
  try {
    t = collect(schedule, horizon);
  } catch (const InvariantViolation& e) {
    for (auto v : {Verdict::StrictContractiveIS, Verdict::ContractiveIS, Verdict::StrictPseudoIS,
                   Verdict::PseudoIS}) {
      out.checks.push_back({v, false, {{"terms satisfy ParamPoint bounds", false, std::nullopt,
                                        e.what()}}});
    }
    return out;
  }

  const DeclaredLimits declared = schedule.limits.value_or(DeclaredLimits{});
  const auto alpha = [&](std::size_t n) { return t.alpha[n - 1]; };
  const auto beta = [&](std::size_t n) { return t.beta[n - 1]; };
  const auto mu = [&](std::size_t n) { return t.mu[n - 1]; };

  const bool beta_constant =
      std::all_of(t.beta.begin(), t.beta.end(), [&](double b) { return b == t.beta.front(); });
  auto constant_beta_below_one = [&] {
    ConditionResult r;
    r.name = "beta_n = beta in [0, 1)";
    if (!beta_constant) {
      r.passed = false;
      for (std::size_t n = 1; n <= horizon; ++n) {
        if (beta(n) != beta(1)) {
          r.failed_at = n;
          break;
        }
      }
      r.detail = "beta_n varies";
    } else if (!(beta(1) < 1.0)) {
      r.passed = false;
      r.failed_at = 1;
    }
    return r;
  };
  auto mu_below_ceiling = [&] {
    return for_all_n("mu_n in [-1, (1 - beta_n) / (2 beta_n))", horizon, [&](std::size_t n) {
      return mu(n) >= -1.0 && mu(n) < mu_ceiling(beta(n));
    });
  };

  // Strict contractive: alpha_n -> alpha < 1, beta constant, mu limit below a band.
  {
    DefinitionCheck d;
    d.definition = Verdict::StrictContractiveIS;
    d.conditions.push_back(
        for_all_n("alpha_n >= 0", horizon, [&](std::size_t n) { return alpha(n) >= 0.0; }));
    d.conditions.push_back(constant_beta_below_one());
    d.conditions.push_back(mu_below_ceiling());
    const LimitResult a_lim = limit_of(t.alpha, declared.alpha, tol);
    d.conditions.push_back(converges_into("alpha_n -> alpha in [0, 1)", a_lim,
                                          [&](double a) { return a >= -tol && a < 1.0 - tol; },
                                          horizon));
    const double b = beta(1);
    const LimitResult m_lim = limit_of(t.mu, declared.mu, tol);
    const std::string band_name =
        band == StrictMuBand::LimitCondition
            ? "mu_n -> mu in [-1, (1 - alpha - 2 beta) / (2 beta))"
            : "mu_n -> mu in [-1, (1 - beta) / (2 beta) min(1, 1 / (alpha + beta)))";
    const auto in_band = [&](double m) {
      return a_lim.value && m >= -1.0 - tol && m < strict_mu_upper(*a_lim.value, b, band) - tol;
    };
    d.conditions.push_back(converges_into(band_name, m_lim, in_band, horizon));
    finish(d);
    out.checks.push_back(std::move(d));
  }

  // Contractive: beta_n -> 1, alpha_n -> alpha < 1, mu_n -> mu < -(1 + alpha) / 2.
  {
    DefinitionCheck d;
    d.definition = Verdict::ContractiveIS;
    d.conditions.push_back(
        for_all_n("alpha_n >= 0", horizon, [&](std::size_t n) { return alpha(n) >= 0.0; }));
    d.conditions.push_back(
        for_all_n("beta_n in [0, 1)", horizon, [&](std::size_t n) { return beta(n) < 1.0; }));
    d.conditions.push_back(mu_below_ceiling());
    d.conditions.push_back(converges_to("beta_n -> 1", t.beta, declared.beta, 1.0, tol));
    const LimitResult a_lim = limit_of(t.alpha, declared.alpha, tol);
    d.conditions.push_back(converges_into("alpha_n -> alpha in [0, 1)", a_lim,
                                          [&](double a) { return a >= -tol && a < 1.0 - tol; },
                                          horizon));
    const LimitResult m_lim = limit_of(t.mu, declared.mu, tol);
    d.conditions.push_back(converges_into(
        "mu_n -> mu in [-1, -(1 + alpha) / 2)", m_lim,
        [&](double m) {
          return a_lim.value && m >= -1.0 - tol && m < -(1.0 + *a_lim.value) / 2.0 - tol;
        },
        horizon));
    finish(d);
    out.checks.push_back(std::move(d));
  }

  // Strict pseudocontractive: beta constant, alpha_n >= 1 -> 1, mu_n -> -1.
  {
    DefinitionCheck d;
    d.definition = Verdict::StrictPseudoIS;
    d.conditions.push_back(constant_beta_below_one());
    d.conditions.push_back(mu_below_ceiling());
    d.conditions.push_back(
        for_all_n("alpha_n >= 1", horizon, [&](std::size_t n) { return alpha(n) >= 1.0; }));
    d.conditions.push_back(converges_to("alpha_n -> 1", t.alpha, declared.alpha, 1.0, tol));
    d.conditions.push_back(converges_to("mu_n -> -1", t.mu, declared.mu, -1.0, tol));
    finish(d);
    out.checks.push_back(std::move(d));
  }

  // Pseudocontractive: as above with beta_n in [0, 1] and beta_n -> 1.
  {
    DefinitionCheck d;
    d.definition = Verdict::PseudoIS;
    d.conditions.push_back(
        for_all_n("beta_n in [0, 1]", horizon, [&](std::size_t n) { return beta(n) <= 1.0; }));
    d.conditions.push_back(mu_below_ceiling());
    d.conditions.push_back(
        for_all_n("alpha_n >= 1", horizon, [&](std::size_t n) { return alpha(n) >= 1.0; }));
    d.conditions.push_back(converges_to("alpha_n -> 1", t.alpha, declared.alpha, 1.0, tol));
    d.conditions.push_back(converges_to("beta_n -> 1", t.beta, declared.beta, 1.0, tol));
    d.conditions.push_back(converges_to("mu_n -> -1", t.mu, declared.mu, -1.0, tol));
    finish(d);
    out.checks.push_back(std::move(d));
  }

  for (const auto& d : out.checks) {
    if (d.passed) {
      out.verdict = d.definition;
      break;
    }
  }
  out.limit_condition = limit_condition(schedule, horizon, tol);
  return out;
}

}  // namespace proxiter
