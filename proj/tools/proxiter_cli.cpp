// proxiter: run scenarios, classify schedules, sweep parameter regions.
//
// Exit status: 0 pass or informational, 1 expected-value failure, 2 input error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "proxiter/errors.hpp"
#include "proxiter/report.hpp"
#include "proxiter/scenario.hpp"

namespace {

using namespace proxiter;

constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

Scenario resolve_scenario(const std::string& ref) {
  if (auto s = find_builtin(ref)) return *s;
  if (!std::filesystem::exists(ref)) {
    throw InvalidInput("'" + ref + "' is neither a builtin scenario nor a file");
  }
  return load_scenario(ref);
}

ParamSchedule resolve_schedule(const std::string& ref) {
  const auto first = ref.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && ref[first] == '{') return parse_schedule(ref);
  std::ifstream in(ref, std::ios::binary);
  if (!in) throw InvalidInput("cannot open schedule file '" + ref + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_schedule(ss.str());
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  return out;
}

Format format_of(const std::string& s) {
  if (auto f = parse_format(s)) return *f;
  throw InvalidInput("--format must be text or json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intermediate-sense contraction toolkit: orbits, best proximity points, "
               "schedule classification"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  std::string scenario_ref;
  std::size_t iters = 100;
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string format = "text";
  std::size_t horizon = 1000;

  auto* run = app.add_subcommand("run", "Run a scenario and check its expected values");
  run->add_option("--scenario", scenario_ref, "Builtin name (s1..s6) or scenario file")
      ->required();
  run->add_option("--iters", iters, "Iterations")->check(CLI::PositiveNumber);
  run->add_option("--tol", tol, "Convergence and comparison tolerance");
  run->add_option("--seed", seed, "Seed for cyclicity sampling");
  run->add_option("--out", out_path, "Trace CSV path");
  run->add_option("--horizon", horizon, "Horizon for schedule classification");
  run->add_option("--format", format, "text or json");

  std::string schedule_ref;
  double classify_tol = 1e-6;
  std::string band = "limit";
  auto* classify = app.add_subcommand("classify", "Classify a parameter schedule");
  auto* sched_opt =
      classify->add_option("--schedule", schedule_ref, "Schedule file or inline JSON");
  classify->add_option("--scenario", scenario_ref, "Use the schedule of a scenario")
      ->excludes(sched_opt);
  classify->add_option("--horizon", horizon, "Number of terms examined");
  classify->add_option("--tol", classify_tol, "Limit tolerance");
  classify->add_option("--band", band, "Strict contractive mu band: limit or definition")
      ->check(CLI::IsMember({"limit", "definition"}));
  classify->add_option("--format", format, "text or json");

  std::string alpha = "0:2";
  std::string beta = "0:0.9";
  std::string mu = "-1:1";
  std::size_t steps = 3;
  auto* sweep_cmd = app.add_subcommand("sweep", "Tabulate regimes over a parameter grid");
  sweep_cmd->add_option("--alpha", alpha, "LO:HI");
  sweep_cmd->add_option("--beta", beta, "LO:HI");
  sweep_cmd->add_option("--mu", mu, "LO:HI");
  sweep_cmd->add_option("--steps", steps, "Grid points per axis (>= 2)");
  sweep_cmd->add_option("--band", band, "Strict contractive mu band: limit or definition")
      ->check(CLI::IsMember({"limit", "definition"}));
  sweep_cmd->add_option("--out", out_path, "CSV path (default stdout)");

  std::size_t starts = 10;
  auto* prox = app.add_subcommand("proximity", "Best proximity run with random restarts");
  prox->add_option("--scenario", scenario_ref, "Cyclic builtin or scenario file")->required();
  prox->add_option("--iters", iters, "Iterations per run");
  prox->add_option("--tol", tol, "Convergence tolerance");
  prox->add_option("--seed", seed, "Seed for starts and cyclicity sampling");
  prox->add_option("--starts", starts, "Number of random starts");
  prox->add_option("--format", format, "text or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    const StrictMuBand mu_band =
        band == "definition" ? StrictMuBand::Definition : StrictMuBand::LimitCondition;

    if (*run) {
      const Format f = format_of(format);
      const Scenario s = resolve_scenario(scenario_ref);
      RunOptions opts;
      opts.iters = iters;
      opts.tol = tol;
      opts.seed = seed;
      opts.horizon = horizon;
      RunReport r = run_scenario(s, opts);
      if (!out_path.empty()) {
        auto out = open_out(out_path);
        write_trace_csv(out, r.trace);
        r.trace_path = out_path;
      }
      write_run_report(std::cout, r, f);
      return r.status == RunStatus::Fail ? kExitFail : 0;
    }
    if (*classify) {
      const Format f = format_of(format);
      ParamSchedule schedule;
      if (!scenario_ref.empty()) {
        const Scenario s = resolve_scenario(scenario_ref);
        if (!s.schedule) throw InvalidInput("scenario '" + s.name + "' has no schedule");
        schedule = *s.schedule;
      } else if (!schedule_ref.empty()) {
        schedule = resolve_schedule(schedule_ref);
      } else {
        throw InvalidInput("classify needs --schedule or --scenario");
      }
      write_classification(std::cout, classify_schedule(schedule, horizon, classify_tol, mu_band),
                           f);
      return 0;
    }
    if (*sweep_cmd) {
      const auto rows =
          sweep(parse_range(alpha), parse_range(beta), parse_range(mu), steps, mu_band);
      if (out_path.empty()) {
        write_sweep_csv(std::cout, rows);
      } else {
        auto out = open_out(out_path);
        write_sweep_csv(out, rows);
      }
      return 0;
    }
    if (*prox) {
      const Format f = format_of(format);
      const Scenario s = resolve_scenario(scenario_ref);
      ProximityOptions opts;
      opts.iters = iters;
      opts.tol = tol;
      opts.seed = seed;
      opts.starts = starts;
      write_proximity_report(std::cout, proximity_report(s, opts), f);
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InvariantViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return 0;
}
