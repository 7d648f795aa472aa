#include "proxiter/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "proxiter/errors.hpp"

namespace proxiter {

using ojson = nlohmann::ordered_json;

std::optional<Format> parse_format(std::string_view s) {
  if (s == "text") return Format::Text;
  if (s == "json") return Format::Json;
  return std::nullopt;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Pass: return "pass";
    case RunStatus::Fail: return "fail";
    case RunStatus::Informational: return "informational";
  }
  return "?";
}

namespace {

std::string format_point(const Vectord& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_real(v[i]);
  }
  return s + ")";
}

ojson point_json(const Vectord& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// NaN and infinities have no JSON spelling.
ojson real_json(double x) {
  if (std::isfinite(x)) return x == 0.0 ? ojson(0.0) : ojson(x);
  if (std::isnan(x)) return nullptr;
  return x > 0 ? "inf" : "-inf";
}

Check within(const std::string& name, double err, double tol, const std::string& what) {
  return {name, err <= tol, what + ", error " + format_real(err) + ", tol " + format_real(tol)};
}

}  // namespace

// ---------------------------------------------------------------- run

RunReport run_scenario(const Scenario& s, const RunOptions& opts) {
  if (opts.iters < 1) throw InvalidInput("--iters must be at least 1");
  if (!(opts.tol > 0.0)) throw InvalidInput("--tol must be positive");
  RunReport r;
  r.scenario = s.name;
  r.hypotheses_met = s.metric.uniformly_convex();
  if (!r.hypotheses_met) {
    r.diagnostics.push_back({"uniformly convex metric", false,
                             "existence of limits needs a uniformly convex norm; "
                             "p = 1 and p = inf are not"});
  }

  if (s.schedule) r.classification = classify_schedule(*s.schedule, opts.horizon, opts.classify_tol);

  std::optional<CyclicPaird> pair;
  if (s.sets) {
    pair.emplace(s.sets->first, s.sets->second, s.map);
    r.D = pair->D();
    const auto cyc = verify_cyclicity(*pair, opts.cyclicity_samples, opts.seed);
    std::string detail = "T(A) in B and T(B) in A on anchors and samples";
    if (!cyc.ok) {
      detail = "image " + format_point(cyc.counterexample->image) + " of " +
               format_point(cyc.counterexample->point) + " leaves the target set";
    }
    r.diagnostics.push_back({"cyclic map", cyc.ok, detail});
  }

  const ParamSchedule* sched = s.schedule ? &*s.schedule : nullptr;
  const double D = r.D.value_or(0.0);
  if (s.pair_start) {
    r.trace = pair_trace(s.map, s.start, *s.pair_start, opts.iters, sched, s.variant, s.metric, D);
    const auto [lo, hi] = std::minmax_element(r.trace.pair_distances.begin(),
                                              r.trace.pair_distances.end());
    r.pair_distance_variation = *hi - *lo;
  } else {
    r.trace = orbit(s.map, s.start, opts.iters, s.metric);
  }
  if (!r.trace.reports.empty()) {
    const bool all_hold = std::all_of(r.trace.reports.begin(), r.trace.reports.end(),
                                      [](const auto& c) { return c.holds; });
    r.diagnostics.push_back({"inequality with slack", all_hold,
                             std::string(to_string(s.variant)) + " residual >= 0 at every step"});
  }

  if (pair) {
    try {
      r.proximity = best_proximity_run(*pair, s.start, std::max<std::size_t>(opts.iters, 4),
                                       opts.tol);
      r.diagnostics.push_back({"best proximity run converged", r.proximity->converged,
                               "even gap " + format_real(r.proximity->even_limit_gap) +
                                   ", odd gap " + format_real(r.proximity->odd_limit_gap)});
      // With intersecting sets the best proximity point is a fixed point.
      if (r.proximity->converged && (r.proximity->z - r.proximity->Tz).norm() < opts.tol) {
        r.fixed_point = r.proximity->z;
        r.fixed_point_iterations = r.proximity->iterations;
      }
    } catch (const CyclicityViolation& e) {
      r.diagnostics.push_back({"best proximity run", false, e.what()});
    }
  } else {
    const auto run = iterate_to_fixed_point(s.map, s.start, opts.tol, opts.iters, s.metric);
    r.fixed_point = run.fixed_point;
    r.fixed_point_iterations = run.iterations;
  }

  const Expected& e = s.expected;
  if (e.fixed_point) {
    const Vectord* z = r.proximity ? &r.proximity->z : (r.fixed_point ? &*r.fixed_point : nullptr);
    if (!z) {
      r.expected.push_back({"fixed point", false, "no fixed point within " +
                                                       std::to_string(opts.iters) + " iterations"});
    } else {
      r.expected.push_back(within("fixed point", s.metric(*z, e.fixed_point->value), opts.tol,
                                  "found " + format_point(*z) + ", expected " +
                                      format_point(e.fixed_point->value)));
    }
  }
  if (e.D) {
    r.expected.push_back(within("D", std::abs(D - e.D->value), opts.tol,
                                "found " + format_real(D) + ", expected " +
                                    format_real(e.D->value)));
  }
  if (e.best_proximity_pair) {
    const auto& want = e.best_proximity_pair->value;
    if (!r.proximity) {
      r.expected.push_back({"best proximity pair", false, "no best proximity run"});
    } else {
      const double err = std::max((r.proximity->z - want.z).norm(), (r.proximity->Tz - want.Tz).norm());
      Check c = within("best proximity pair", err, opts.tol,
                       "found z = " + format_point(r.proximity->z) + ", Tz = " +
                           format_point(r.proximity->Tz));
      c.passed = c.passed && r.proximity->converged;
      r.expected.push_back(std::move(c));
    }
  }
  if (e.verdict) {
    const Verdict got = r.classification ? r.classification->verdict : Verdict::Unclassified;
    r.expected.push_back({"verdict", got == e.verdict->value,
                          "found " + std::string(to_string(got)) + ", expected " +
                              std::string(to_string(e.verdict->value))});
  }

  if (r.expected.empty()) {
    r.status = RunStatus::Informational;
  } else {
    const bool ok = std::all_of(r.expected.begin(), r.expected.end(),
                                [](const Check& c) { return c.passed; });
    r.status = ok ? RunStatus::Pass : RunStatus::Fail;
  }
  return r;
}

void write_trace_csv(std::ostream& out, const IterationTraced& trace) {
  const Eigen::Index dim = trace.points.front().size();
  out << "n";
  for (Eigen::Index i = 0; i < dim; ++i) out << ",x" << i;
  out << ",step_distance,pair_distance,xi,k,residual\n";
  for (std::size_t n = 0; n < trace.points.size(); ++n) {
    out << n;
    for (Eigen::Index i = 0; i < dim; ++i) out << ',' << format_real(trace.points[n][i]);
    out << ',';
    if (n < trace.step_distances.size()) out << format_real(trace.step_distances[n]);
    out << ',';
    if (n < trace.pair_distances.size()) out << format_real(trace.pair_distances[n]);
    if (n >= 1 && n <= trace.reports.size()) {
      const auto& c = trace.reports[n - 1];
      out << ',' << format_real(c.xi) << ',' << format_real(c.k) << ',' << format_real(c.residual);
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

namespace {

ojson checks_json(const std::vector<Check>& checks) {
  ojson a = ojson::array();
  for (const auto& c : checks) {
    a.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return a;
}

void write_checks(std::ostream& out, const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    out << "  [" << (c.passed ? "ok" : "FAIL") << "] " << c.name << ": " << c.detail << '\n';
  }
}

}  // namespace

void write_run_report(std::ostream& out, const RunReport& r, Format f) {
  if (f == Format::Json) {
    ojson j;
    j["scenario"] = r.scenario;
    j["status"] = std::string(to_string(r.status));
    j["hypotheses_met"] = r.hypotheses_met;
    if (r.classification) j["verdict"] = std::string(to_string(r.classification->verdict));
    if (r.fixed_point) {
      j["fixed_point"] = point_json(*r.fixed_point);
      j["iterations"] = r.fixed_point_iterations;
    }
    if (r.D) j["D_hat"] = real_json(*r.D);
    if (r.proximity) {
      j["proximity"] = {{"z", point_json(r.proximity->z)},
                        {"Tz", point_json(r.proximity->Tz)},
                        {"even_limit_gap", real_json(r.proximity->even_limit_gap)},
                        {"odd_limit_gap", real_json(r.proximity->odd_limit_gap)},
                        {"converged", r.proximity->converged},
                        {"iterations", r.proximity->iterations}};
    }
    if (r.pair_distance_variation) {
      j["pair_distance_variation"] = real_json(*r.pair_distance_variation);
    }
    if (!r.trace_path.empty()) j["trace"] = r.trace_path;
    j["diagnostics"] = checks_json(r.diagnostics);
    j["expected"] = checks_json(r.expected);
    out << j.dump(2) << '\n';
    return;
  }
  out << "scenario: " << r.scenario << '\n';
  out << "status: " << to_string(r.status) << '\n';
  if (r.classification) out << "verdict: " << to_string(r.classification->verdict) << '\n';
  if (r.fixed_point) {
    out << "fixed point: " << format_point(*r.fixed_point) << " after "
        << r.fixed_point_iterations << " iterations\n";
  } else if (!r.proximity) {
    out << "fixed point: none within " << r.fixed_point_iterations << " iterations\n";
  }
  if (r.D) out << "D_hat: " << format_real(*r.D) << '\n';
  if (r.proximity) {
    out << "z: " << format_point(r.proximity->z) << '\n';
    out << "Tz: " << format_point(r.proximity->Tz) << '\n';
    out << "converged: " << (r.proximity->converged ? "yes" : "no") << '\n';
  }
  if (r.pair_distance_variation) {
    out << "pair distance variation: " << format_real(*r.pair_distance_variation) << '\n';
  }
  if (!r.trace_path.empty()) out << "trace: " << r.trace_path << '\n';
  if (!r.diagnostics.empty()) {
    out << "diagnostics:\n";
    write_checks(out, r.diagnostics);
  }
  if (!r.expected.empty()) {
    out << "expected values:\n";
    write_checks(out, r.expected);
  }
}

// ---------------------------------------------------------------- classify

ojson classification_json(const Classification& c) {
  ojson j;
  j["verdict"] = std::string(to_string(c.verdict));
  j["limit_condition"] = c.limit_condition;
  ojson defs = ojson::array();
  for (const auto& d : c.checks) {
    ojson dj;
    dj["definition"] = std::string(to_string(d.definition));
    dj["passed"] = d.passed;
    ojson conds = ojson::array();
    for (const auto& cond : d.conditions) {
      ojson cj = {{"name", cond.name}, {"passed", cond.passed}};
      cj["failed_at"] = cond.failed_at ? ojson(*cond.failed_at) : ojson(nullptr);
      if (!cond.detail.empty()) cj["detail"] = cond.detail;
      conds.push_back(std::move(cj));
    }
    dj["conditions"] = std::move(conds);
    defs.push_back(std::move(dj));
  }
  j["definitions"] = std::move(defs);
  return j;
}

void write_classification(std::ostream& out, const Classification& c, Format f) {
  if (f == Format::Json) {
    out << classification_json(c).dump(2) << '\n';
    return;
  }
  out << "verdict: " << to_string(c.verdict) << '\n';
  out << "limit condition: " << (c.limit_condition ? "holds" : "fails") << '\n';
  for (const auto& d : c.checks) {
    out << to_string(d.definition) << ": " << (d.passed ? "pass" : "fail") << '\n';
    for (const auto& cond : d.conditions) {
      out << "  [" << (cond.passed ? "ok" : "FAIL") << "] " << cond.name;
      if (cond.failed_at) out << " (n = " << *cond.failed_at << ')';
      if (!cond.detail.empty()) out << ": " << cond.detail;
      out << '\n';
    }
  }
}

// ---------------------------------------------------------------- sweep

Range parse_range(std::string_view s) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidInput("range '" + std::string(s) + "' is not of the form LO:HI");
  }
  auto num = [&](std::string_view t) {
    double x = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), x);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(x)) {
      throw InvalidInput("range '" + std::string(s) + "' has a bad endpoint '" +
                         std::string(t) + "'");
    }
    return x;
  };
  Range r{num(s.substr(0, colon)), num(s.substr(colon + 1))};
  if (r.lo > r.hi) throw InvalidInput("range '" + std::string(s) + "' has LO > HI");
  return r;
}

std::vector<SweepRow> sweep(Range alpha, Range beta, Range mu, std::size_t steps,
                            StrictMuBand band) {
  if (steps < 2) throw InvalidInput("sweep needs at least 2 steps per axis");
  auto grid = [&](Range r) {
    std::vector<double> v(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      v[i] = i + 1 == steps ? r.hi : r.lo + (r.hi - r.lo) * double(i) / double(steps - 1);
    }
    return v;
  };
  const auto as = grid(alpha);
  const auto bs = grid(beta);
  const auto ms = grid(mu);
  std::vector<SweepRow> rows;
  rows.reserve(steps * steps * steps);
  for (double a : as) {
    for (double b : bs) {
      for (double m : ms) {
        SweepRow row;
        row.point = {a, b, m, 0.0};
        row.region = region_xi_zero(row.point);
        row.limit_gap = limit_gap(row.point);
        try {
          row.k_a = k_a(row.point);
          row.gamma_floor = proxiter::gamma_floor(*row.k_a);
        } catch (const DivisionRegime&) {
        }
        try {
          row.k_b = k_b(row.point);
        } catch (const DivisionRegime&) {
        }
        int i = 0;
        for (auto v : {Verdict::StrictContractiveIS, Verdict::ContractiveIS,
                       Verdict::StrictPseudoIS, Verdict::PseudoIS}) {
          row.in_class[i++] = limit_in_class(v, row.point, band);
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "alpha,beta,mu,region,limit_gap,k_a,k_b,gamma_floor,"
         "strict_contractive,contractive,strict_pseudo,pseudo\n";
  auto opt = [](const std::optional<double>& x) { return x ? format_real(*x) : std::string(); };
  for (const auto& r : rows) {
    out << format_real(r.point.alpha) << ',' << format_real(r.point.beta) << ','
        << format_real(r.point.mu) << ',' << to_string(r.region) << ','
        << format_real(r.limit_gap) << ',' << opt(r.k_a) << ',' << opt(r.k_b) << ','
        << opt(r.gamma_floor);
    for (bool b : r.in_class) out << ',' << (b ? 1 : 0);
    out << '\n';
  }
}

// ---------------------------------------------------------------- proximity

ProximityReport proximity_report(const Scenario& s, const ProximityOptions& opts) {
  if (!s.sets) throw InvalidInput("scenario '" + s.name + "' has no sets A and B");
  const CyclicPaird pair(s.sets->first, s.sets->second, s.map);
  ProximityReport r;
  r.scenario = s.name;
  r.D = pair.D();
  r.proximal_a = pair.proximal_a();
  r.proximal_b = pair.proximal_b();
  r.cyclicity = verify_cyclicity(pair, opts.cyclicity_samples, opts.seed);
  if (!r.cyclicity.ok) return r;
  const std::size_t N = std::max<std::size_t>(opts.iters, 4);
  r.run = best_proximity_run(pair, s.start, N, opts.tol);
  r.distance_trace = proximity_distance_trace(pair, s.start, N);
  if (opts.starts > 0) {
    const auto starts = random_starts(pair.set(r.run->z_set), opts.starts, opts.seed);
    r.agreement = multi_start_agreement(pair, starts, N, opts.tol);
  }
  return r;
}

void write_proximity_report(std::ostream& out, const ProximityReport& r, Format f) {
  if (f == Format::Json) {
    ojson j;
    j["scenario"] = r.scenario;
    j["D_hat"] = real_json(r.D);
    j["proximal_pair"] = {point_json(r.proximal_a), point_json(r.proximal_b)};
    j["cyclic"] = r.cyclicity.ok;
    if (r.cyclicity.counterexample) {
      j["counterexample"] = {{"point", point_json(r.cyclicity.counterexample->point)},
                             {"image", point_json(r.cyclicity.counterexample->image)}};
    }
    if (r.run) {
      j["z"] = point_json(r.run->z);
      j["Tz"] = point_json(r.run->Tz);
      j["z_set"] = r.run->z_set == SetRole::A ? "A" : "B";
      j["even_limit_gap"] = real_json(r.run->even_limit_gap);
      j["odd_limit_gap"] = real_json(r.run->odd_limit_gap);
      j["converged"] = r.run->converged;
    }
    if (r.agreement) {
      j["starts"] = r.agreement->runs.size();
      j["all_converged"] = r.agreement->all_converged;
      j["spread"] = real_json(r.agreement->spread);
    }
    out << j.dump(2) << '\n';
    return;
  }
  out << "scenario: " << r.scenario << '\n';
  out << "D_hat: " << format_real(r.D) << '\n';
  out << "proximal pair: " << format_point(r.proximal_a) << ", " << format_point(r.proximal_b)
      << '\n';
  if (!r.cyclicity.ok) {
    const auto& c = *r.cyclicity.counterexample;
    out << "cyclic: no, " << format_point(c.point) << " maps to " << format_point(c.image)
        << '\n';
    return;
  }
  out << "cyclic: yes\n";
  if (r.run) {
    out << "z: " << format_point(r.run->z) << " in " << (r.run->z_set == SetRole::A ? "A" : "B")
        << '\n';
    out << "Tz: " << format_point(r.run->Tz) << '\n';
    out << "even gap: " << format_real(r.run->even_limit_gap) << '\n';
    out << "odd gap: " << format_real(r.run->odd_limit_gap) << '\n';
    out << "converged: " << (r.run->converged ? "yes" : "no") << '\n';
  }
  if (r.agreement) {
    out << "random starts: " << r.agreement->runs.size() << ", all converged: "
        << (r.agreement->all_converged ? "yes" : "no")
        << ", spread of z: " << format_real(r.agreement->spread) << '\n';
  }
}

}  // namespace proxiter
