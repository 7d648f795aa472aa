#include <doctest.h>

#include <cmath>
#include <limits>

#include "proxiter/contraction.hpp"
#include "proxiter/errors.hpp"
#include "support.hpp"

using namespace proxiter;
using testing_support::random_point;
using testing_support::rng_for;
using testing_support::grid_mu_bisect;
using testing_support::uniform;

namespace {

constexpr InequalityVariant kVariants[] = {InequalityVariant::Cross, InequalityVariant::Squared,
                                           InequalityVariant::CyclicCross,
                                           InequalityVariant::CyclicSquared};

ParamPointd random_param(std::mt19937_64& rng) {
  return {uniform(rng, 0.0, 3.0), uniform(rng, 0.0, 2.0), uniform(rng, -1.0, 2.0),
          uniform(rng, 0.0, 2.0)};
}

double grid_mu_scan(double dxy, double dT, double ddiff, double h) {
  const auto steps = static_cast<long>(std::llround(2.0 / h));
  for (long i = 0; i <= steps; ++i) {
    const double rho = -1.0 + static_cast<double>(i) * h;
    if (ddiff * ddiff <= dxy * dxy + dT * dT + 2.0 * rho * dxy * dT) return rho;
  }
  return 1.0;
}

}  // namespace

TEST_CASE("ParamPoint bounds") {
  CHECK(ParamPointd{0, 0, -1, 0}.valid());
  CHECK_FALSE(ParamPointd{-0.1, 0, 0, 0}.valid());
  CHECK_FALSE(ParamPointd{0, -0.1, 0, 0}.valid());
  CHECK_FALSE(ParamPointd{0, 0, -1.5, 0}.valid());
  CHECK_FALSE(ParamPointd{0, 0, 0, -1}.valid());
  CHECK_FALSE(ParamPointd{std::nan(""), 0, 0, 0}.valid());
  CHECK_THROWS_AS(require_valid(ParamPointd{0, -1, 0, 0}), InvariantViolation);
}

TEST_CASE("variant names round-trip") {
  for (auto v : kVariants) CHECK(parse_variant(to_string(v)) == v);
  CHECK_FALSE(parse_variant("bogus").has_value());
}

TEST_CASE("empirical mu on identity, antipodal and orthogonal differences") {
  CHECK(empirical_mu(1.0, 1.0, 0.0) == doctest::Approx(-1.0));
  CHECK(empirical_mu(1.0, 1.0, 2.0) == doctest::Approx(1.0));
  CHECK(empirical_mu(1.0, 1.0, std::sqrt(2.0)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(empirical_mu(0.0, 3.0, 3.0) == -1.0);  // degenerate: every rho feasible
  CHECK_THROWS_AS(empirical_mu(1.0, 1.0, 3.0), InconsistentDistances);
}

TEST_CASE("slack on hand cases") {
  const ParamPointd p{1.0, 0.5, -1.0, 0.0};
  CHECK(xi_slack(InequalityVariant::Cross, p, 1.0, 2.0) == doctest::Approx(2.5));
  CHECK(xi_slack(InequalityVariant::Squared, p, 1.0, 2.0) == doctest::Approx(4.5));
  CHECK(xi_slack(InequalityVariant::Cross, ParamPointd{1.0, 0.5, 0.0, 0.0}, 1.0, 1.0) == 0.0);
}

TEST_CASE("inequality residual on hand cases") {
  const auto r = inequality_residual(InequalityVariant::Cross, ParamPointd{1, 0, 0, 0}, 1.0, 2.0,
                                     0.0);
  CHECK(r.residual == doctest::Approx(-3.0));
  CHECK_FALSE(r.holds);
  const auto c = inequality_residual(InequalityVariant::CyclicCross, ParamPointd{1, 0, 0, 1}, 1.0,
                                     2.0, 0.0, 2.0);
  CHECK(c.residual == doctest::Approx(1.0));
  CHECK(c.holds);
}

TEST_CASE("step constants on hand cases") {
  CHECK(k_a(ParamPointd{0.5, 0.2, -0.5, 0}) == doctest::Approx(0.625));
  CHECK(k_a(ParamPointd{0.75, 0.25, -0.5, 0}) == doctest::Approx(1.0));
  CHECK(k_a(ParamPointd{1.0, 0.0, 0.3, 0}) == 1.0);
  CHECK(k_b(ParamPointd{0.5, 0.2, 0.5, 0}) == doctest::Approx(7.0 / 6.0));
  CHECK(k_b(ParamPointd{0.75, 0.25, -0.5, 0}) == doctest::Approx(1.0));
  CHECK(k_b(ParamPointd{1.0, 0.0, -0.7, 0}) == 1.0);
  CHECK_THROWS_AS(k_a(ParamPointd{0.5, 1.0, 0, 0}), DivisionRegime);
  CHECK_THROWS_AS(k_b(ParamPointd{0.5, 0.5, 0.5, 0}), DivisionRegime);
}

TEST_CASE("zero-slack region on hand cases") {
  CHECK(region_xi_zero(ParamPointd{0.5, 0.25, -1.0, 0}) == XiZeroRegion::LowBeta);
  CHECK(region_xi_zero(ParamPointd{0.1, 2.0, -1.0, 0}) == XiZeroRegion::HighBeta);
  CHECK(region_xi_zero(ParamPointd{0.5, 0.25, 1.0, 0}) == XiZeroRegion::MuBand);
  CHECK(region_xi_zero(ParamPointd{0.5, 0.25, 2.0, 0}) == XiZeroRegion::None);
  CHECK(region_xi_zero(ParamPointd{0.5, 0.0, 0.0, 0}) == XiZeroRegion::LowBeta);
  CHECK(region_xi_zero(ParamPointd{1.5, 0.0, 0.0, 0}) == XiZeroRegion::None);
}

TEST_CASE("distance-carrying band narrows the low-beta disjunct") {
  // Band [-0.9, 0.6]; dividing the upper end by d = 2 gives [-0.9, 0.3].
  const ParamPointd p{0.2, 0.25, 0.5, 0};
  CHECK(region_xi_zero(p) == XiZeroRegion::LowBeta);
  CHECK(region_xi_zero(p, std::optional<double>(2.0)) == XiZeroRegion::None);
}

TEST_CASE("bound check on hand cases") {
  CHECK(bound_check(StepBranch::Nonexpansive, ParamPointd{0.5, 0.2, -0.5, 0}, 1.0, 0.7, 0.0));
  CHECK(bound_check(StepBranch::Expansive, ParamPointd{0.5, 0.2, 0.5, 0}, 1.0, 1.05, 0.0));
  CHECK(bound_check(StepBranch::Nonexpansive, ParamPointd{0.5, 0.2, -0.5, 0}, 0.0, 0.0, 0.0));
  CHECK_THROWS_AS(
      bound_check(StepBranch::Nonexpansive, ParamPointd{0.5, 0.2, 0, 0}, 1.0, 2.0, 0.0),
      BranchMismatch);
  CHECK_THROWS_AS(bound_check(StepBranch::Expansive, ParamPointd{0.5, 0.2, 0, 0}, 2.0, 1.0, 0.0),
                  BranchMismatch);
}

TEST_CASE("bound check does not follow from the inequality when mu < 0") {
  // With negative mu the cross term pushes the wrong way on the nonexpansive
  // branch: the inequality holds with zero slack, yet 0.81^2 > 0.625.
  const ParamPointd p{0.5, 0.2, -0.5, 0};
  const double dxy = 1.0;
  const double dT = 0.81;
  CHECK(xi_slack(InequalityVariant::Cross, p, dxy, dT) == 0.0);
  CHECK(inequality_residual(InequalityVariant::Cross, p, dxy, dT, 0.0).holds);
  CHECK_FALSE(bound_check(StepBranch::Nonexpansive, p, dxy, dT, 0.0));
}

TEST_CASE("contraction report picks the branch and its constant") {
  const ParamPointd p{0.5, 0.2, 0.5, 0.1};
  const auto shrink = contraction_report(InequalityVariant::Cross, p, 1.0, 0.5);
  CHECK(shrink.branch == StepBranch::Nonexpansive);
  CHECK(shrink.k == doctest::Approx(k_a(p)));
  const auto grow = contraction_report(InequalityVariant::Cross, p, 1.0, 1.5);
  CHECK(grow.branch == StepBranch::Expansive);
  CHECK(grow.k == doctest::Approx(k_b(p)));
  // Equal distances: nonexpansive for the plain forms, expansive for cyclic.
  CHECK(contraction_report(InequalityVariant::Cross, p, 1.0, 1.0).branch ==
        StepBranch::Nonexpansive);
  CHECK(contraction_report(InequalityVariant::CyclicCross, p, 1.0, 1.0, 2.0).branch ==
        StepBranch::Expansive);
  CHECK(contraction_report(InequalityVariant::CyclicSquared, p, 1.0, 0.5, 2.0).k ==
        doctest::Approx(k_b(p)));
  CHECK(std::isnan(contraction_report(InequalityVariant::Cross, ParamPointd{0.5, 0.6, 0.5, 0},
                                      1.0, 2.0)
                       .k));
}

TEST_CASE("property: slack is nonnegative, zero exactly when the raw excess is not positive, "
          "and closes the inequality") {
  auto rng = rng_for(0x78695f736c61636bULL);
  for (int i = 0; i < 100000; ++i) {
    const auto v = kVariants[i % 4];
    const ParamPointd p = random_param(rng);
    const double dxy = uniform(rng, 0.0, 5.0);
    const double dT = uniform(rng, 0.0, 5.0);
    const double D = uniform(rng, 0.0, 3.0);
    const double xi = xi_slack(v, p, dxy, dT, D);
    const double raw = raw_excess(v, p, dxy, dT);
    REQUIRE(xi >= 0.0);
    REQUIRE((xi == 0.0) == (raw <= 0.0));
    const auto r = inequality_residual(v, p, dxy, dT, xi, D);
    REQUIRE(r.holds);
    REQUIRE((std::abs(r.residual) <= 1e-12 || r.residual > 0.0));
  }
}

TEST_CASE("property: k_a = 1 iff k_b = 1 iff the limit gap vanishes") {
  auto rng = rng_for(0x6b5f6964656e74ULL);
  const double q = std::ldexp(1.0, -20);
  for (int i = 0; i < 100000; ++i) {
    ParamPointd p;
    if (i % 2 == 0) {
      // Dyadic beta and mu with alpha = 1 - 2 beta (1 + mu): every step of
      // both formulas is exact, so the identity point is hit exactly.
      p.beta = q * std::floor(uniform(rng, 1.0, 1.0 / q));
      const double mu_max = std::min(1.0, 1.0 / (2.0 * p.beta) - 1.0);
      p.mu = q * std::floor(uniform(rng, -1.0, mu_max) / q);
      p.alpha = 1.0 - 2.0 * p.beta * (1.0 + p.mu);
      if (p.alpha < 0.0) continue;
    } else {
      p.beta = uniform(rng, 0.0, 1.0);
      if (p.beta == 0.0) continue;
      const double mu_hi = std::min(3.0, (1.0 / p.beta - 1.0) / 2.0);
      p.mu = uniform(rng, -1.0, mu_hi);
      p.alpha = uniform(rng, 0.0, 3.0);
    }
    REQUIRE(p.beta * (1.0 + 2.0 * p.mu) < 1.0);
    const bool a_one = std::abs(k_a(p) - 1.0) <= 1e-12;
    const bool b_one = std::abs(k_b(p) - 1.0) <= 1e-12;
    const bool gap_zero = std::abs(limit_gap(p)) <= 1e-12;
    REQUIRE(a_one == gap_zero);
    REQUIRE(b_one == gap_zero);
    REQUIRE(k_a_at_most_one(p) == (k_a(p) <= 1.0));
  }
}

TEST_CASE("property: low-beta band is nonempty exactly when beta <= 1") {
  auto rng = rng_for(0x62616e64ULL);
  for (int i = 0; i < 20000; ++i) {
    const double alpha = uniform(rng, 0.0, 3.0);
    const double beta = uniform(rng, 1e-3, 3.0);
    const double lo = -(alpha + beta) / (2.0 * beta);
    const double hi = (1.0 - alpha - 2.0 * beta) / (2.0 * beta);
    REQUIRE((lo <= hi) == (beta <= 1.0));
    const ParamPointd at_lo{alpha, beta, std::max(lo, -1.0), 0};
    if (beta < 1.0 && lo >= -1.0) {
      REQUIRE(region_xi_zero(at_lo) == XiZeroRegion::LowBeta);
    }
    if (beta > 1.0) {
      const ParamPointd p{alpha, beta, uniform(rng, -1.0, 2.0), 0};
      REQUIRE(region_xi_zero(p) != XiZeroRegion::LowBeta);
    }
  }
}

TEST_CASE("property: in the zero-slack region the raw excess is not positive "
          "for the cross form with equal distances") {
  // At d_xy = d_T = d the cross excess is -d^2 limit_gap, and limit_gap >= 0
  // on the mu band.
  auto rng = rng_for(0x6d7562616e64ULL);
  for (int i = 0; i < 20000; ++i) {
    const ParamPointd p{uniform(rng, 0.0, 1.0), uniform(rng, 0.01, 0.99), 0.0, 0.0};
    const auto band = k_b_unit_band(p);
    ParamPointd q = p;
    q.mu = uniform(rng, std::max(-1.0, band.lo), band.hi);
    if (region_xi_zero(q) != XiZeroRegion::MuBand) continue;
    const double d = uniform(rng, 0.1, 4.0);
    REQUIRE(raw_excess(InequalityVariant::Cross, q, d, d) <= 1e-12);
  }
}

TEST_CASE("property: branch bounds follow from the cross inequality for mu >= 0") {
  auto rng = rng_for(0x626f756e64ULL);
  for (int i = 0; i < 50000; ++i) {
    const double beta = uniform(rng, 0.0, 0.99);
    const double mu_hi = std::min(2.0, (1.0 / beta - 1.0) / 2.0) * 0.999;
    const ParamPointd p{uniform(rng, 0.0, 2.0), beta, uniform(rng, 0.0, mu_hi), 0.0};
    const double dxy = uniform(rng, 0.0, 4.0);
    const double dT = uniform(rng, 0.0, 4.0);
    const double xi = xi_slack(InequalityVariant::Cross, p, dxy, dT);
    const auto branch = dT <= dxy ? StepBranch::Nonexpansive : StepBranch::Expansive;
    REQUIRE(bound_check(branch, p, dxy, dT, xi));
  }
}

TEST_CASE("property: empirical mu matches the grid oracle and the envelope holds") {
  auto rng = rng_for(0x6d755f6f7261636cULL);
  const auto m = Metricd::euclidean();
  for (int i = 0; i < 10000; ++i) {
    const Vectord x = random_point(rng, 3);
    const Vectord y = random_point(rng, 3);
    const Vectord u = random_point(rng, 3);
    const Vectord v = random_point(rng, 3);
    const double dxy = m(x, y);
    const double dT = m(u, v);
    const double ddiff = m.norm((x - y) - (u - v));
    const auto env = envelope_residuals(m, x, y, u, v);
    REQUIRE(env.lower >= -1e-12);
    REQUIRE(env.upper >= -1e-12);
    const double mu = empirical_mu(dxy, dT, ddiff);
    REQUIRE(std::abs(mu - grid_mu_bisect(dxy, dT, ddiff, 1e-6)) <= 1e-5);
    if (i < 5) REQUIRE(std::abs(mu - grid_mu_scan(dxy, dT, ddiff, 1e-6)) <= 1e-5);
  }
}
