#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "proxiter/contraction.hpp"
#include "proxiter/convex_set.hpp"
#include "proxiter/metric.hpp"
#include "proxiter/orbit.hpp"
#include "proxiter/schedule.hpp"

namespace proxiter {

/// An expected value together with a note on how it was obtained.
template <typename T>
struct Noted {
  T value;
  std::string note;
};

struct ProximalPair {
  Vectord z;
  Vectord Tz;
};

struct Expected {
  std::optional<Noted<Vectord>> fixed_point;
  std::optional<Noted<ProximalPair>> best_proximity_pair;
  std::optional<Noted<double>> D;
  std::optional<Noted<Verdict>> verdict;

  bool empty() const { return !fixed_point && !best_proximity_pair && !D && !verdict; }
};

struct Scenario {
  std::string name;
  std::string description;
  Eigen::Index dim = 1;
  Metricd metric = Metricd::euclidean();
  PiecewiseAffineMapd map = PiecewiseAffineMapd::scalar(1.0, 0.0);
  std::optional<std::pair<ConvexSetd, ConvexSetd>> sets;
  std::optional<ParamSchedule> schedule;
  InequalityVariant variant = InequalityVariant::Cross;
  Vectord start;
  std::optional<Vectord> pair_start;
  Expected expected;

  bool cyclic() const { return sets.has_value(); }
};

bool operator==(const Scenario& a, const Scenario& b);

/// Throws InvariantViolation naming the first broken invariant.
void validate(const Scenario& s);

/// s1 .. s6, each with closed-form expected values.
const std::vector<Scenario>& builtin_scenarios();

std::optional<Scenario> find_builtin(std::string_view name);

nlohmann::ordered_json to_json(const Scenario& s);
nlohmann::ordered_json to_json(const ParamSchedule& s);

/// Parses and validates a scenario. ParseError carries "line L, column C" for
/// syntax errors and a JSON pointer for field errors.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

ParamSchedule parse_schedule(std::string_view text);
ParamSchedule schedule_from_json(const nlohmann::json& j, const std::string& path = "");

}  // namespace proxiter
