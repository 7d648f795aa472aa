// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "proxiter/contraction.hpp"
#include "proxiter/cyclic.hpp"
#include "proxiter/orbit.hpp"
#include "proxiter/report.hpp"
#include "proxiter/scenario.hpp"
#include "proxiter/schedule.hpp"
#include "support.hpp"

using namespace proxiter;
using testing_support::grid_mu_bisect;
using testing_support::random_point;
using testing_support::rng_for;
using testing_support::uniform;
using testing_support::vec;

namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records the first failure only; later ones are usually consequences.
  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::string num(double x) { return format_real(x); }

Outcome formula_identities() {
  Outcome o;
  auto rng = rng_for(0x616363312dULL);
  const double q = std::ldexp(1.0, -20);
  int on_identity = 0;
  for (int i = 0; i < 100000; ++i) {
    ParamPointd p;
    if (i % 2 == 0) {
      // Dyadic beta, mu and alpha = 1 - 2 beta (1 + mu) keep every operation
      // exact, so half the samples sit on the identity surface itself.
      p.beta = q * std::floor(uniform(rng, 1.0, 1.0 / q));
      const double mu_max = std::min(1.0, 1.0 / (2.0 * p.beta) - 1.0);
      p.mu = q * std::floor(uniform(rng, -1.0, mu_max) / q);
      p.alpha = 1.0 - 2.0 * p.beta * (1.0 + p.mu);
      if (p.alpha < 0.0) p.alpha = uniform(rng, 0.0, 2.0);
    } else {
      p.beta = uniform(rng, 0.0, 1.0);
      if (p.beta == 0.0) p.beta = 0.5;
      p.mu = uniform(rng, -1.0, std::min(3.0, (1.0 / p.beta - 1.0) / 2.0));
      p.alpha = uniform(rng, 0.0, 3.0);
    }
    if (!(p.beta > 0.0 && p.beta < 1.0 && p.beta * (1.0 + 2.0 * p.mu) < 1.0)) {
      o.require(false, "sampler produced a point outside the domain");
      continue;
    }
    const bool a_one = std::abs(k_a(p) - 1.0) <= 1e-12;
    const bool b_one = std::abs(k_b(p) - 1.0) <= 1e-12;
    const bool gap_zero = std::abs(p.alpha + 2.0 * p.beta * (1.0 + p.mu) - 1.0) <= 1e-12;
    on_identity += gap_zero;
    o.require(a_one == gap_zero && b_one == gap_zero,
              "mismatch at alpha=" + num(p.alpha) + " beta=" + num(p.beta) + " mu=" + num(p.mu));
  }
  o.require(on_identity >= 40000, "too few samples on the identity surface");
  if (o.pass) o.detail = "1e5 points, " + std::to_string(on_identity) + " on the identity";
  return o;
}

Outcome slack_correctness() {
  Outcome o;
  const InequalityVariant variants[] = {InequalityVariant::Cross, InequalityVariant::Squared,
                                        InequalityVariant::CyclicCross,
                                        InequalityVariant::CyclicSquared};
  auto rng = rng_for(0x616363322dULL);
  for (int i = 0; i < 100000; ++i) {
    const auto v = variants[i % 4];
    const ParamPointd p{uniform(rng, 0.0, 3.0), uniform(rng, 0.0, 2.0), uniform(rng, -1.0, 2.0),
                        uniform(rng, 0.0, 2.0)};
    const double dxy = uniform(rng, 0.0, 5.0);
    const double dT = uniform(rng, 0.0, 5.0);
    const double D = uniform(rng, 0.0, 3.0);
    const double xi = xi_slack(v, p, dxy, dT, D);
    // Raw residual recomputed from the inequality's two sides.
    const double mu_base = (v == InequalityVariant::Cross || v == InequalityVariant::CyclicCross)
                               ? dxy * dT
                               : dT * dT;
    const double raw = dT * dT - (p.alpha * dxy * dxy + p.beta * (dxy * dxy + dT * dT) +
                                  2.0 * p.mu * p.beta * mu_base);
    const double r = inequality_residual(v, p, dxy, dT, xi, D).residual;
    o.require(xi >= 0.0, "negative slack");
    o.require(std::abs(r) <= 1e-12 || r > 0.0, "residual " + num(r) + " below -1e-12");
    const bool zero_expected = raw <= 0.0 || std::abs(raw) <= 1e-12;
    if (xi == 0.0) o.require(zero_expected, "xi = 0 with raw residual " + num(raw));
    if (raw <= -1e-12) o.require(xi == 0.0, "xi > 0 with raw residual " + num(raw));
  }
  if (o.pass) o.detail = "1e5 samples over all four variants";
  return o;
}

Outcome mu_oracle() {
  Outcome o;
  const std::vector<Metricd> metrics = {Metricd::euclidean(), Metricd::p_norm(1.0),
                                        Metricd::p_norm(3.0),
                                        Metricd::p_norm(std::numeric_limits<double>::infinity()),
                                        Metricd::weighted(vec({0.5, 2.0, 1.0}))};
  auto rng = rng_for(0x616363332dULL);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto& m = metrics[static_cast<std::size_t>(i) % metrics.size()];
    const Vectord x = random_point(rng, 3);
    const Vectord y = random_point(rng, 3);
    const Vectord u = random_point(rng, 3);
    const Vectord v = random_point(rng, 3);
    const auto env = envelope_residuals(m, x, y, u, v);
    o.require(env.lower >= -1e-12 && env.upper >= -1e-12, "envelope residual below -1e-12");
    const double dxy = m(x, y);
    const double dT = m(u, v);
    const double ddiff = m.norm((x - y) - (u - v));
    const double err = std::abs(empirical_mu(dxy, dT, ddiff) - grid_mu_bisect(dxy, dT, ddiff, 1e-6));
    worst = std::max(worst, err);
  }
  o.require(worst <= 1e-5, "oracle gap " + num(worst));
  if (o.pass) o.detail = "1e4 triples, max gap " + num(worst);
  return o;
}

Outcome fixed_point_reproduction() {
  Outcome o;
  RunOptions opts;
  opts.iters = 60;
  const auto r = run_scenario(*find_builtin("s1"), opts);
  o.require(r.fixed_point.has_value(), "no fixed point within 60 iterations");
  if (!o.pass) return o;
  const double err = std::abs((*r.fixed_point)[0] - 2.0);
  o.require(err < 1e-9, "fixed point error " + num(err));
  o.require(r.fixed_point_iterations <= 60, "took " + std::to_string(r.fixed_point_iterations));
  for (std::size_t m = 1; m <= 3; ++m) {
    const double tail = tail_residuals(r.trace, m).back();
    o.require(tail < 1e-8, "tail residual m=" + std::to_string(m) + " is " + num(tail));
  }
  const double delta = std::abs(squared_gap_deltas(r.trace).back());
  o.require(delta < 1e-8, "squared gap delta " + num(delta));
  if (o.pass) {
    o.detail = "error " + num(err) + " after " + std::to_string(r.fixed_point_iterations) +
               " iterations";
  }
  return o;
}

Outcome best_proximity_reproduction() {
  Outcome o;
  const auto s3 = *find_builtin("s3");
  const auto r = run_scenario(s3, RunOptions{});  // 100 iterations
  o.require(r.proximity.has_value(), "no proximity run");
  if (!o.pass) return o;
  const auto& p = *r.proximity;
  o.require(std::abs(p.D_hat - 2.0) <= 1e-8, "D_hat " + num(p.D_hat));
  o.require((p.z - vec({0, 1})).lpNorm<Eigen::Infinity>() <= 1e-6, "z off (0, 1)");
  o.require((p.Tz - vec({0, -1})).lpNorm<Eigen::Infinity>() <= 1e-6, "Tz off (0, -1)");
  o.require(p.iterations <= 100, "used " + std::to_string(p.iterations) + " iterations");
  o.require(p.even_limit_gap < 1e-8 && p.odd_limit_gap < 1e-8, "even/odd gaps too large");

  const CyclicPaird pair(s3.sets->first, s3.sets->second, s3.map);
  const auto d = proximity_distance_trace(pair, s3.start, 100);
  for (std::size_t n = 0; n + 1 < d.size(); ++n) {
    o.require(d[n + 1] <= d[n], "distance trace rises at n=" + std::to_string(n));
  }
  o.require(std::abs(d.back() - 2.0) <= 1e-6, "distance trace ends at " + num(d.back()));

  ProximityOptions popts;
  popts.starts = 10;
  const auto rep = proximity_report(s3, popts);
  o.require(rep.agreement.has_value() && rep.agreement->runs.size() == 10, "no multi-start run");
  if (!o.pass) return o;
  o.require(rep.agreement->spread <= 1e-5, "z spread " + num(rep.agreement->spread));
  if (o.pass) {
    o.detail = "D_hat " + num(p.D_hat) + ", z spread over 10 starts " + num(rep.agreement->spread);
  }
  return o;
}

Outcome intersecting_sets() {
  Outcome o;
  const auto r = run_scenario(*find_builtin("s4"), RunOptions{});
  o.require(r.D.has_value() && r.fixed_point.has_value(), "missing D or fixed point");
  if (!o.pass) return o;
  o.require(std::abs(*r.D) <= 1e-12, "D_hat " + num(*r.D));
  const double err = std::abs((*r.fixed_point)[0] - 1.5);
  o.require(err <= 1e-9, "fixed point error " + num(err));
  if (o.pass) o.detail = "D_hat " + num(*r.D) + ", fixed point error " + num(err);
  return o;
}

ParamSchedule schedule(Sequence a, Sequence b, Sequence m) {
  ParamSchedule s;
  s.alpha = std::move(a);
  s.beta = std::move(b);
  s.mu = std::move(m);
  return s;
}

Outcome classifier_regimes() {
  Outcome o;
  struct Case {
    ParamSchedule s;
    Verdict want;
  };
  const std::vector<Case> cases = {
      {schedule(Sequence::one_plus_c_over_n(1.0), Sequence::constant(0.3),
                Sequence::one_plus_c_over_n(0.5, -1.0)),
       Verdict::StrictPseudoIS},
      {schedule(Sequence::one_plus_c_over_n(1.0, 0.5), Sequence::one_plus_c_over_n(-1.0),
                Sequence::constant(-0.8)),
       Verdict::ContractiveIS},
      {schedule(Sequence::constant(2.0), Sequence::constant(0.0), Sequence::constant(0.0)),
       Verdict::Unclassified},
  };
  std::string got;
  for (const auto& c : cases) {
    const Verdict v = classify_schedule(c.s, 1000, 1e-6).verdict;
    got += (got.empty() ? "" : ", ") + std::string(to_string(v));
    o.require(v == c.want, "expected " + std::string(to_string(c.want)) + ", got " +
                               std::string(to_string(v)));
  }
  if (o.pass) o.detail = got;
  return o;
}

Outcome isometry_sanity() {
  Outcome o;
  std::string detail;
  for (const char* name : {"s2", "s5"}) {
    const auto r = run_scenario(*find_builtin(name), RunOptions{});
    o.require(r.pair_distance_variation.has_value(), std::string(name) + ": no pair trace");
    if (!o.pass) return o;
    o.require(*r.pair_distance_variation < 1e-12,
              std::string(name) + ": variation " + num(*r.pair_distance_variation));
    detail += std::string(detail.empty() ? "" : ", ") + name + " variation " +
              num(*r.pair_distance_variation);
    if (std::string(name) == "s2") {
      o.require(r.proximity.has_value() && r.D.has_value(), "s2: no proximity run");
      if (!o.pass) return o;
      const double d = (r.proximity->z - r.proximity->Tz).norm();
      o.require(std::abs(*r.D - 2.0) <= 1e-12, "s2: D " + num(*r.D));
      o.require(std::abs(d - *r.D) <= 1e-12, "s2: d(z, Tz) " + num(d));
    }
  }
  if (o.pass) o.detail = detail;
  return o;
}

// ---------------------------------------------------------------- CLI

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string shell_quoted(const fs::path& p) { return "'" + p.string() + "'"; }

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd =
      shell_quoted(PROXITER_CLI) + " " + args + " > " + shell_quoted(out) + " 2>" + shell_quoted(out.string() + ".err");
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

Outcome cli_determinism() {
  Outcome o;
  const fs::path dir = fs::path(PROXITER_WORKDIR) / "acceptance_cli";
  fs::create_directories(dir);
  const fs::path trace = dir / "trace.csv";

  const std::vector<std::string> invocations = {
      "run --scenario s3 --iters 100 --seed 7 --format json --out " + shell_quoted(trace),
      "run --scenario s6 --iters 100 --seed 7",
      "sweep --alpha 0:2 --beta 0:0.9 --mu -1:1 --steps 6",
  };
  for (std::size_t i = 0; i < invocations.size(); ++i) {
    std::string first_trace;
    std::string outputs[2];
    for (int k = 0; k < 2; ++k) {
      const fs::path out = dir / ("out" + std::to_string(i) + "_" + std::to_string(k));
      const int code = run_cli(invocations[i], out);
      o.require(code == 0, "'" + invocations[i] + "' exited " + std::to_string(code));
      outputs[k] = read(out);
      if (i == 0) {
        const std::string t = read(trace);
        if (k == 0) first_trace = t;
        else o.require(t == first_trace && !t.empty(), "trace files differ");
      }
    }
    o.require(!outputs[0].empty() && outputs[0] == outputs[1],
              "outputs of '" + invocations[i] + "' differ");
  }

  // A deliberately wrong expected fixed point must exit 1, a malformed file 2.
  auto wrong = to_json(*find_builtin("s1"));
  wrong["expected"]["fixed_point"]["value"] = {3.0};
  const fs::path wrong_path = dir / "wrong_fixed_point.json";
  std::ofstream(wrong_path) << wrong.dump(2);
  const int fail_code = run_cli("run --scenario " + shell_quoted(wrong_path), dir / "wrong_out");
  o.require(fail_code == 1, "failing expected value exited " + std::to_string(fail_code));

  const fs::path bad_path = dir / "malformed.json";
  std::ofstream(bad_path) << "{\"name\": ";
  const int bad_code = run_cli("run --scenario " + shell_quoted(bad_path), dir / "bad_out");
  o.require(bad_code == 2, "malformed scenario exited " + std::to_string(bad_code));

  if (o.pass) o.detail = "3 commands byte-identical twice; exit codes 1 and 2 as contracted";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"formula identities", formula_identities},
      {"slack correctness", slack_correctness},
      {"mu oracle equivalence", mu_oracle},
      {"fixed-point reproduction", fixed_point_reproduction},
      {"best-proximity reproduction", best_proximity_reproduction},
      {"intersecting-sets reduction", intersecting_sets},
      {"classifier regimes", classifier_regimes},
      {"isometry sanity", isometry_sanity},
      {"CLI determinism", cli_determinism},
  };
  int failed = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%zu/%zu criteria passed in %.1f s\n", criteria.size() - failed, criteria.size(),
              secs);
  return failed == 0 ? 0 : 1;
}
