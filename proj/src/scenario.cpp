#include "proxiter/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "proxiter/errors.hpp"

namespace proxiter {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------- equality

namespace {

bool same(const Vectord& a, const Vectord& b) { return a.size() == b.size() && a == b; }

template <typename T, typename Eq>
bool same_opt(const std::optional<T>& a, const std::optional<T>& b, Eq eq) {
  if (a.has_value() != b.has_value()) return false;
  return !a || eq(*a, *b);
}

bool same_expected(const Expected& a, const Expected& b) {
  return same_opt(a.fixed_point, b.fixed_point,
                  [](const auto& x, const auto& y) {
                    return same(x.value, y.value) && x.note == y.note;
                  }) &&
         same_opt(a.best_proximity_pair, b.best_proximity_pair,
                  [](const auto& x, const auto& y) {
                    return same(x.value.z, y.value.z) && same(x.value.Tz, y.value.Tz) &&
                           x.note == y.note;
                  }) &&
         same_opt(a.D, b.D,
                  [](const auto& x, const auto& y) {
                    return x.value == y.value && x.note == y.note;
                  }) &&
         same_opt(a.verdict, b.verdict, [](const auto& x, const auto& y) {
           return x.value == y.value && x.note == y.note;
         });
}

}  // namespace

bool operator==(const Scenario& a, const Scenario& b) {
  return a.name == b.name && a.description == b.description && a.dim == b.dim &&
         a.metric == b.metric && a.map == b.map && a.sets == b.sets && a.schedule == b.schedule &&
         a.variant == b.variant && same(a.start, b.start) &&
         same_opt(a.pair_start, b.pair_start, same) && same_expected(a.expected, b.expected);
}

// ---------------------------------------------------------------- validation

void validate(const Scenario& s) {
  auto fail = [](const char* inv, const std::string& what) { throw InvariantViolation(inv, what); };
  if (s.name.empty()) fail("Scenario.name", "scenario needs a name");
  if (s.dim < 1) fail("Scenario.dim", "dimension must be positive");
  if (s.map.dim() != s.dim) {
    fail("Scenario.map_dimension", "map has dimension " + std::to_string(s.map.dim()) +
                                       ", scenario has " + std::to_string(s.dim));
  }
  if (s.metric.kind() == MetricKind::WeightedEuclidean && s.metric.weights().size() != s.dim) {
    fail("Scenario.metric_dimension", "metric has " + std::to_string(s.metric.weights().size()) +
                                          " weights for dimension " + std::to_string(s.dim));
  }
  if (s.start.size() != s.dim) fail("Point.dim", "start has the wrong dimension");
  if (!s.start.allFinite()) fail("Point.finite", "start has a non-finite coordinate");
  if (s.pair_start) {
    if (s.pair_start->size() != s.dim) fail("Point.dim", "pair_start has the wrong dimension");
    if (!s.pair_start->allFinite()) fail("Point.finite", "pair_start has a non-finite coordinate");
  }
  if (s.sets) {
    if (s.sets->first.dim() != s.dim || s.sets->second.dim() != s.dim) {
      fail("Scenario.set_dimension", "sets must match the scenario dimension");
    }
    if (s.metric.kind() != MetricKind::Euclidean) {
      fail("Scenario.cyclic_metric", "cyclic scenarios use the Euclidean metric");
    }
  }
  if (is_cyclic(s.variant) && !s.sets) {
    fail("Scenario.variant", "cyclic inequality variant without sets A and B");
  }
  if (s.expected.fixed_point) {
    if (s.expected.fixed_point->value.size() != s.dim) {
      fail("Expected.fixed_point", "expected fixed point has the wrong dimension");
    }
  }
  if (s.expected.best_proximity_pair) {
    const auto& p = s.expected.best_proximity_pair->value;
    if (p.z.size() != s.dim || p.Tz.size() != s.dim) {
      fail("Expected.best_proximity_pair", "expected pair has the wrong dimension");
    }
    if (!s.sets) fail("Expected.best_proximity_pair", "needs sets A and B");
  }
  if (s.expected.D && !s.sets) fail("Expected.D", "needs sets A and B");
  if (s.expected.verdict && !s.schedule) fail("Expected.verdict", "needs a schedule");
  auto noted = [&](bool present, const std::string& note, const char* inv) {
    if (present && note.empty()) fail(inv, "expected value carries no note on its origin");
  };
  noted(s.expected.fixed_point.has_value(),
        s.expected.fixed_point ? s.expected.fixed_point->note : "", "Expected.note");
  noted(s.expected.best_proximity_pair.has_value(),
        s.expected.best_proximity_pair ? s.expected.best_proximity_pair->note : "",
        "Expected.note");
  noted(s.expected.D.has_value(), s.expected.D ? s.expected.D->note : "", "Expected.note");
  noted(s.expected.verdict.has_value(), s.expected.verdict ? s.expected.verdict->note : "",
        "Expected.note");
  if (s.schedule) (void)s.schedule->at(1);
}

// ---------------------------------------------------------------- builtins

namespace {

Vectord vec(std::initializer_list<double> xs) {
  Vectord v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ParamSchedule constant_schedule(double alpha, double beta, double mu, double gamma) {
  ParamSchedule s;
  s.alpha = Sequence::constant(alpha);
  s.beta = Sequence::constant(beta);
  s.mu = Sequence::constant(mu);
  s.gamma = Sequence::constant(gamma);
  return s;
}

std::vector<Scenario> make_builtins() {
  std::vector<Scenario> out;

  {
    Scenario s;
    s.name = "s1";
    s.description = "halving contraction x -> x/2 + 1 on the real line";
    s.dim = 1;
    s.map = PiecewiseAffineMapd::scalar(0.5, 1.0);
    s.schedule = constant_schedule(0.25, 0.0, -1.0, 0.0);
    s.start = vec({0.0});
    s.pair_start = vec({8.0});
    s.expected.fixed_point = Noted<Vectord>{vec({2.0}), "solve x = x/2 + 1"};
    s.expected.verdict = Noted<Verdict>{
        Verdict::StrictContractiveIS,
        "d(T^n x, T^n y)^2 = 4^-n d(x, y)^2 <= d(x, y)^2 / 4, so alpha = 1/4, beta = 0"};
    out.push_back(std::move(s));
  }
  {
    Scenario s;
    s.name = "s2";
    s.description = "cyclic isometry x -> -x between [1, 2] and [-2, -1]";
    s.dim = 1;
    s.map = PiecewiseAffineMapd::scalar(-1.0, 0.0);
    s.sets.emplace(ConvexSetd::interval(1.0, 2.0), ConvexSetd::interval(-2.0, -1.0));
    s.start = vec({1.0});
    s.pair_start = vec({-1.0});
    s.expected.D = Noted<double>{2.0, "interval gap 1 - (-1)"};
    s.expected.best_proximity_pair =
        Noted<ProximalPair>{{vec({1.0}), vec({-1.0})}, "T swaps the nearest endpoints 1 and -1"};
    out.push_back(std::move(s));
  }
  {
    Scenario s;
    s.name = "s3";
    s.description =
        "parallel segments {(t, 1)} and {(t, -1)}, t in [0, 1], with (t, y) -> (t/2, -y)";
    s.dim = 2;
    Matrixd m(2, 2);
    m << 0.5, 0.0, 0.0, -1.0;
    s.map = PiecewiseAffineMapd::affine(m, Vectord::Zero(2));
    s.sets.emplace(ConvexSetd::segment(vec({0.0, 1.0}), vec({1.0, 1.0})),
                   ConvexSetd::segment(vec({0.0, -1.0}), vec({1.0, -1.0})));
    s.schedule = constant_schedule(0.25, 0.0, -1.0, 0.75);
    s.variant = InequalityVariant::CyclicCross;
    s.start = vec({1.0, 1.0});
    s.pair_start = vec({0.5, -1.0});
    s.expected.D = Noted<double>{2.0, "vertical gap between the parallel segments"};
    s.expected.best_proximity_pair = Noted<ProximalPair>{
        {vec({0.0, 1.0}), vec({0.0, -1.0})}, "T^2n (t, 1) = (t / 4^n, 1) -> (0, 1)"};
    s.expected.verdict = Noted<Verdict>{
        Verdict::StrictContractiveIS,
        "horizontal offsets shrink by 1/2 per step: alpha = 1/4, gamma = 1 - k = 3/4"};
    out.push_back(std::move(s));
  }
  {
    Scenario s;
    s.name = "s4";
    s.description = "intersecting intervals [0, 2] and [1, 3] with x -> x/4 + 9/8";
    s.dim = 1;
    s.map = PiecewiseAffineMapd::scalar(0.25, 1.125);
    s.sets.emplace(ConvexSetd::interval(0.0, 2.0), ConvexSetd::interval(1.0, 3.0));
    s.start = vec({0.0});
    s.pair_start = vec({3.0});
    s.expected.fixed_point = Noted<Vectord>{vec({1.5}), "solve x = x/4 + 9/8"};
    s.expected.D = Noted<double>{0.0, "the intervals overlap on [1, 2]"};
    s.expected.best_proximity_pair =
        Noted<ProximalPair>{{vec({1.5}), vec({1.5})}, "the fixed point is its own image"};
    out.push_back(std::move(s));
  }
  {
    Scenario s;
    s.name = "s5";
    s.description = "planar rotation by pi/6, an isometry with no attracting point";
    s.dim = 2;
    const double c = std::cos(std::numbers::pi / 6.0);
    const double sn = std::sin(std::numbers::pi / 6.0);
    Matrixd m(2, 2);
    m << c, -sn, sn, c;
    s.map = PiecewiseAffineMapd::affine(m, Vectord::Zero(2));
    s.start = vec({1.0, 0.0});
    s.pair_start = vec({0.0, 2.0});
    out.push_back(std::move(s));
  }
  {
    Scenario s;
    s.name = "s6";
    s.description =
        "unit discs at (-2, 0) and (2, 0); each is folded onto the other towards the "
        "facing points (-1, 0) and (1, 0)";
    s.dim = 2;
    const ConvexSetd A = ConvexSetd::ball(vec({-2.0, 0.0}), 1.0);
    const ConvexSetd B = ConvexSetd::ball(vec({2.0, 0.0}), 1.0);
    const Matrixd half = -0.5 * Matrixd::Identity(2, 2);
    // On A: x -> -(x - a*)/2 + b*, on B: x -> -(x - b*)/2 + a*.
    std::vector<PiecewiseAffineMapd::Piece> pieces;
    pieces.push_back({A, half, vec({0.5, 0.0})});
    pieces.push_back({B, half, vec({-0.5, 0.0})});
    s.map = PiecewiseAffineMapd(std::move(pieces));
    s.sets.emplace(A, B);
    s.start = vec({-2.5, 0.5});
    s.pair_start = vec({2.0, -0.5});
    s.expected.D = Noted<double>{2.0, "center distance 4 minus both radii"};
    s.expected.best_proximity_pair =
        Noted<ProximalPair>{{vec({-1.0, 0.0}), vec({1.0, 0.0})},
                            "T^2 x = (x - a*)/4 + a* on A with a* = (-1, 0)"};
    out.push_back(std::move(s));
  }
  for (const auto& s : out) validate(s);
  return out;
}

}  // namespace

const std::vector<Scenario>& builtin_scenarios() {
  static const std::vector<Scenario> all = make_builtins();
  return all;
}

std::optional<Scenario> find_builtin(std::string_view name) {
  for (const auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- writing

namespace {

ojson vec_json(const Vectord& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ojson mat_json(const Matrixd& m) {
  ojson rows = ojson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec_json(m.row(r).transpose()));
  return rows;
}

ojson set_json(const ConvexSetd& s) {
  ojson j;
  switch (s.kind()) {
    case SetKind::Box:
      j["kind"] = "box";
      j["lower"] = vec_json(s.as<ConvexSetd::Box>().lower);
      j["upper"] = vec_json(s.as<ConvexSetd::Box>().upper);
      break;
    case SetKind::Ball:
      j["kind"] = "ball";
      j["center"] = vec_json(s.as<ConvexSetd::Ball>().center);
      j["radius"] = s.as<ConvexSetd::Ball>().radius;
      break;
    case SetKind::Segment:
      j["kind"] = "segment";
      j["from"] = vec_json(s.as<ConvexSetd::Segment>().from);
      j["to"] = vec_json(s.as<ConvexSetd::Segment>().to);
      break;
    case SetKind::HalfspaceIntersection:
      j["kind"] = "halfspace_intersection";
      j["normals"] = mat_json(s.as<ConvexSetd::Halfspaces>().normals);
      j["offsets"] = vec_json(s.as<ConvexSetd::Halfspaces>().offsets);
      break;
  }
  return j;
}

ojson sequence_json(const Sequence& s) {
  ojson j;
  j["family"] = std::string(to_string(s.family()));
  ojson p;
  switch (s.family()) {
    case SequenceFamily::Constant:
      p["value"] = s.base();
      break;
    case SequenceFamily::OnePlusCOverN:
      p["base"] = s.base();
      p["c"] = s.c();
      break;
    case SequenceFamily::GeometricDecayToLimit:
      p["limit"] = s.limit();
      p["start"] = s.start();
      p["ratio"] = s.ratio();
      break;
    case SequenceFamily::ExplicitTable:
      p["values"] = s.values();
      break;
  }
  j["params"] = std::move(p);
  return j;
}

}  // namespace

ojson to_json(const ParamSchedule& s) {
  ojson j;
  j["alpha"] = sequence_json(s.alpha);
  j["beta"] = sequence_json(s.beta);
  j["mu"] = sequence_json(s.mu);
  j["gamma"] = sequence_json(s.gamma);
  if (s.limits) {
    ojson l = ojson::object();
    if (s.limits->alpha) l["alpha"] = *s.limits->alpha;
    if (s.limits->beta) l["beta"] = *s.limits->beta;
    if (s.limits->mu) l["mu"] = *s.limits->mu;
    j["limits"] = std::move(l);
  }
  return j;
}

ojson to_json(const Scenario& s) {
  ojson j;
  j["name"] = s.name;
  if (!s.description.empty()) j["description"] = s.description;
  j["dim"] = s.dim;
  ojson m;
  switch (s.metric.kind()) {
    case MetricKind::Euclidean:
      m["kind"] = "euclidean";
      break;
    case MetricKind::PNorm:
      m["kind"] = "p_norm";
      if (std::isinf(s.metric.p())) {
        m["p"] = "inf";
      } else {
        m["p"] = s.metric.p();
      }
      break;
    case MetricKind::WeightedEuclidean:
      m["kind"] = "weighted_euclidean";
      m["weights"] = vec_json(s.metric.weights());
      break;
  }
  j["metric"] = std::move(m);
  ojson pieces = ojson::array();
  for (const auto& p : s.map.pieces()) {
    ojson pj;
    if (p.region) pj["region"] = set_json(*p.region);
    pj["matrix"] = mat_json(p.matrix);
    pj["offset"] = vec_json(p.offset);
    pieces.push_back(std::move(pj));
  }
  j["map"]["pieces"] = std::move(pieces);
  if (s.sets) {
    j["sets"]["A"] = set_json(s.sets->first);
    j["sets"]["B"] = set_json(s.sets->second);
  }
  if (s.schedule) j["schedule"] = to_json(*s.schedule);
  j["variant"] = std::string(to_string(s.variant));
  j["start"] = vec_json(s.start);
  if (s.pair_start) j["pair_start"] = vec_json(*s.pair_start);
  if (!s.expected.empty()) {
    ojson e;
    if (const auto& f = s.expected.fixed_point) {
      e["fixed_point"] = {{"value", vec_json(f->value)}, {"note", f->note}};
    }
    if (const auto& b = s.expected.best_proximity_pair) {
      e["best_proximity_pair"] = {
          {"z", vec_json(b->value.z)}, {"Tz", vec_json(b->value.Tz)}, {"note", b->note}};
    }
    if (const auto& d = s.expected.D) e["D"] = {{"value", d->value}, {"note", d->note}};
    if (const auto& v = s.expected.verdict) {
      e["verdict"] = {{"value", std::string(to_string(v->value))}, {"note", v->note}};
    }
    j["expected"] = std::move(e);
  }
  return j;
}

// ---------------------------------------------------------------- reading

namespace {

// A json node together with its JSON pointer, for error messages.
class Node {
public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }
  std::string where() const { return path_.empty() ? "/" : path_; }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(where(), what); }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }

  Node at(const char* key) const {
    if (!j_.is_object()) fail("expected an object");
    if (!j_.contains(key)) fail(std::string("missing field '") + key + "'");
    return Node(j_.at(key), path_ + "/" + key);
  }

  std::optional<Node> opt(const char* key) const {
    if (!has(key)) return std::nullopt;
    return at(key);
  }

  Node at(std::size_t i) const { return Node(j_.at(i), path_ + "/" + std::to_string(i)); }

  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

  double real() const {
    if (!j_.is_number()) fail("expected a number");
    const double x = j_.get<double>();
    if (!std::isfinite(x)) fail("expected a finite number");
    return x;
  }

  std::string str() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  Eigen::Index index() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<Eigen::Index>();
  }

  Vectord vector() const {
    const std::size_t n = size();
    Vectord v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = at(i).real();
    return v;
  }

  Matrixd matrix() const {
    const std::size_t rows = size();
    if (rows == 0) fail("matrix has no rows");
    const std::size_t cols = at(std::size_t{0}).size();
    Matrixd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      const Node row = at(r);
      if (row.size() != cols) row.fail("ragged matrix row");
      for (std::size_t c = 0; c < cols; ++c) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row.at(c).real();
      }
    }
    return m;
  }

private:
  const json& j_;
  std::string path_;
};

// Library errors raised while building a value are re-tagged with the field.
template <typename F>
auto at_field(const Node& n, F&& build) -> decltype(build()) {
  try {
    return build();
  } catch (const ParseError&) {
    throw;
  } catch (const InvariantViolation&) {
    throw;
  } catch (const Error& e) {
    n.fail(e.what());
  }
}

ConvexSetd parse_set(const Node& n) {
  const std::string kind = n.at("kind").str();
  return at_field(n, [&]() -> ConvexSetd {
    if (kind == "box") return ConvexSetd::box(n.at("lower").vector(), n.at("upper").vector());
    if (kind == "ball") return ConvexSetd::ball(n.at("center").vector(), n.at("radius").real());
    if (kind == "segment") return ConvexSetd::segment(n.at("from").vector(), n.at("to").vector());
    if (kind == "halfspace_intersection") {
      return ConvexSetd::halfspaces(n.at("normals").matrix(), n.at("offsets").vector());
    }
    n.at("kind").fail("unknown set kind '" + kind + "'");
  });
}

Sequence parse_sequence(const Node& n) {
  if (n.raw().is_number()) return at_field(n, [&] { return Sequence::constant(n.real()); });
  const Node fam = n.at("family");
  const auto family = parse_family(fam.str());
  if (!family) fam.fail("unknown sequence family '" + fam.str() + "'");
  const Node p = n.at("params");
  return at_field(n, [&]() -> Sequence {
    switch (*family) {
      case SequenceFamily::Constant:
        return Sequence::constant(p.at("value").real());
      case SequenceFamily::OnePlusCOverN:
        return Sequence::one_plus_c_over_n(p.at("c").real(),
                                           p.has("base") ? p.at("base").real() : 1.0);
      case SequenceFamily::GeometricDecayToLimit:
        return Sequence::geometric(p.at("limit").real(), p.at("start").real(),
                                   p.at("ratio").real());
      case SequenceFamily::ExplicitTable: {
        const Node values = p.at("values");
        std::vector<double> v;
        for (std::size_t i = 0; i < values.size(); ++i) v.push_back(values.at(i).real());
        return Sequence::table(std::move(v));
      }
    }
    n.fail("unreachable");
  });
}

ParamSchedule parse_schedule_node(const Node& n) {
  ParamSchedule s;
  s.alpha = parse_sequence(n.at("alpha"));
  s.beta = parse_sequence(n.at("beta"));
  s.mu = parse_sequence(n.at("mu"));
  if (auto g = n.opt("gamma")) s.gamma = parse_sequence(*g);
  if (auto l = n.opt("limits")) {
    DeclaredLimits d;
    if (auto a = l->opt("alpha")) d.alpha = a->real();
    if (auto b = l->opt("beta")) d.beta = b->real();
    if (auto m = l->opt("mu")) d.mu = m->real();
    s.limits = d;
  }
  (void)s.at(1);  // first term must satisfy the ParamPoint bounds
  return s;
}

Metricd parse_metric(const Node& n) {
  const std::string kind = n.at("kind").str();
  return at_field(n, [&]() -> Metricd {
    if (kind == "euclidean") return Metricd::euclidean();
    if (kind == "p_norm") {
      const Node p = n.at("p");
      if (p.raw().is_string()) {
        if (p.str() != "inf") p.fail("p must be a number >= 1 or \"inf\"");
        return Metricd::p_norm(std::numeric_limits<double>::infinity());
      }
      return Metricd::p_norm(p.real());
    }
    if (kind == "weighted_euclidean") return Metricd::weighted(n.at("weights").vector());
    n.at("kind").fail("unknown metric kind '" + kind + "'");
  });
}

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col),
                     e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ParamSchedule schedule_from_json(const json& j, const std::string& path) {
  return parse_schedule_node(Node(j, path));
}

ParamSchedule parse_schedule(std::string_view text) {
  const json j = parse_text(text);
  return schedule_from_json(j);
}

Scenario parse_scenario(std::string_view text) {
  const json j = parse_text(text);
  const Node root(j, "");
  Scenario s;
  s.name = root.at("name").str();
  if (auto d = root.opt("description")) s.description = d->str();
  s.dim = root.at("dim").index();
  if (s.dim < 1) root.at("dim").fail("dimension must be positive");
  s.metric = parse_metric(root.at("metric"));

  const Node pieces = root.at("map").at("pieces");
  std::vector<PiecewiseAffineMapd::Piece> ps;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const Node p = pieces.at(i);
    PiecewiseAffineMapd::Piece piece;
    if (auto r = p.opt("region")) piece.region = parse_set(*r);
    piece.matrix = p.at("matrix").matrix();
    piece.offset = p.at("offset").vector();
    ps.push_back(std::move(piece));
  }
  s.map = PiecewiseAffineMapd(std::move(ps));

  if (auto sets = root.opt("sets")) {
    s.sets.emplace(parse_set(sets->at("A")), parse_set(sets->at("B")));
  }
  if (auto sch = root.opt("schedule")) s.schedule = parse_schedule_node(*sch);
  if (auto v = root.opt("variant")) {
    const auto parsed = parse_variant(v->str());
    if (!parsed) v->fail("unknown inequality variant '" + v->str() + "'");
    s.variant = *parsed;
  } else if (s.sets) {
    s.variant = InequalityVariant::CyclicCross;
  }
  s.start = root.at("start").vector();
  if (auto ps0 = root.opt("pair_start")) s.pair_start = ps0->vector();

  if (auto e = root.opt("expected")) {
    auto note = [](const Node& n) { return n.has("note") ? n.at("note").str() : std::string(); };
    if (auto f = e->opt("fixed_point")) {
      s.expected.fixed_point = Noted<Vectord>{f->at("value").vector(), note(*f)};
    }
    if (auto b = e->opt("best_proximity_pair")) {
      s.expected.best_proximity_pair =
          Noted<ProximalPair>{{b->at("z").vector(), b->at("Tz").vector()}, note(*b)};
    }
    if (auto d = e->opt("D")) s.expected.D = Noted<double>{d->at("value").real(), note(*d)};
    if (auto v = e->opt("verdict")) {
      const Node val = v->at("value");
      const auto parsed = parse_verdict(val.str());
      if (!parsed) val.fail("unknown verdict '" + val.str() + "'");
      s.expected.verdict = Noted<Verdict>{*parsed, note(*v)};
    }
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(read_file(path)); }

}  // namespace proxiter
