#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "proxiter/cyclic.hpp"
#include "proxiter/orbit.hpp"
#include "proxiter/scenario.hpp"
#include "proxiter/schedule.hpp"

namespace proxiter {

enum class Format { Text, Json };

std::optional<Format> parse_format(std::string_view s);

/// Shortest round-trip decimal form; empty for NaN.
std::string format_real(double x);

enum class RunStatus { Pass, Fail, Informational };

std::string_view to_string(RunStatus s);

struct Check {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct RunOptions {
  std::size_t iters = 100;
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::size_t horizon = 1000;
  double classify_tol = 1e-6;
  std::size_t cyclicity_samples = 64;
};

struct RunReport {
  std::string scenario;
  bool hypotheses_met = true;  // uniformly convex metric
  std::optional<Classification> classification;
  std::optional<Vectord> fixed_point;
  std::size_t fixed_point_iterations = 0;
  std::optional<ProximityResult<double>> proximity;
  std::optional<double> D;
  std::optional<double> pair_distance_variation;  // max - min over the pair trace
  std::vector<Check> diagnostics;  // informative, do not decide the status
  std::vector<Check> expected;     // one per expected value
  RunStatus status = RunStatus::Informational;
  IterationTraced trace;
  std::string trace_path;
};

/// Runs a scenario end to end: Picard orbit (and pair orbit), fixed point or
/// best proximity run, schedule classification, expected-value checks.
RunReport run_scenario(const Scenario& s, const RunOptions& opts);

/// Columns n, x0.., step_distance, pair_distance, xi, k, residual. Entries
/// that do not apply to a row are left blank.
void write_trace_csv(std::ostream& out, const IterationTraced& trace);

void write_run_report(std::ostream& out, const RunReport& r, Format f);

nlohmann::ordered_json classification_json(const Classification& c);
void write_classification(std::ostream& out, const Classification& c, Format f);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Parses "LO:HI".
Range parse_range(std::string_view s);

struct SweepRow {
  ParamPointd point;
  XiZeroRegion region = XiZeroRegion::None;
  double limit_gap = 0.0;
  std::optional<double> k_a;
  std::optional<double> k_b;
  std::optional<double> gamma_floor;
  bool in_class[4] = {false, false, false, false};  // precedence order of Verdict
};

/// steps points per axis, rows ordered alpha-major, then beta, then mu.
std::vector<SweepRow> sweep(Range alpha, Range beta, Range mu, std::size_t steps,
                            StrictMuBand band = StrictMuBand::LimitCondition);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct ProximityReport {
  std::string scenario;
  double D = 0.0;
  Vectord proximal_a;
  Vectord proximal_b;
  CyclicityCheck<double> cyclicity;
  std::optional<ProximityResult<double>> run;
  std::optional<MultiStartAgreement<double>> agreement;
  std::vector<double> distance_trace;
};

struct ProximityOptions {
  std::size_t iters = 100;
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::size_t starts = 10;
  std::size_t cyclicity_samples = 64;
};

/// Best proximity run from the scenario start plus `starts` seeded random
/// starts in the start set. Throws InvalidInput for non-cyclic scenarios.
ProximityReport proximity_report(const Scenario& s, const ProximityOptions& opts);

void write_proximity_report(std::ostream& out, const ProximityReport& r, Format f);

}  // namespace proxiter
