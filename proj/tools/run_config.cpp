#include "run_config.hpp"

#include "tvnpn/error.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace tvnpn::cli {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::invalid_argument, msg); }

double to_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    bad(what + ": '" + std::string(s) + "' is not a number");
  return v;
}

long long to_integer(std::string_view s, const std::string& what) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    bad(what + ": '" + std::string(s) + "' is not an integer");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

}  // namespace

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::estimate: return "estimate";
    case Command::test_edge: return "test-edge";
    case Command::test_graph: return "test-graph";
    case Command::test_uniform: return "test-uniform";
    case Command::simulate: return "simulate";
    case Command::roc_study: return "roc-study";
    case Command::power_study: return "power-study";
  }
  return "?";
}

std::string_view to_string(StudyTest t) noexcept {
  switch (t) {
    case StudyTest::edge: return "edge";
    case StudyTest::supergraph: return "supergraph";
    case StudyTest::uniform: return "uniform";
  }
  return "?";
}

EvalGrid GridSpec::make() const {
  return interior ? EvalGrid::interior(m) : EvalGrid::evenly(lo, hi, m);
}

BandwidthRule parse_h_rule(const std::string& text) {
  BandwidthRule r;
  if (text == "estimate") {
    r.kind = BandwidthRule::Kind::estimate;
  } else if (text == "test") {
    r.kind = BandwidthRule::Kind::test;
  } else {
    r.kind = BandwidthRule::Kind::value;
    r.value = to_double(text, "--h-rule");
    if (!(r.value > 0.0)) bad("--h-rule: bandwidth must be positive");
  }
  return r;
}

LambdaRule parse_lambda_rule(const std::string& text) {
  LambdaRule r;
  if (text == "paper") return r;
  if (text.rfind("paper:", 0) == 0) {
    r.value = to_double(std::string_view(text).substr(6), "--lambda-rule");
  } else {
    r.fixed = true;
    r.value = to_double(text, "--lambda-rule");
  }
  if (!(r.value > 0.0)) bad("--lambda-rule: value must be positive");
  return r;
}

GridSpec parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  GridSpec g;
  if (parts.size() == 2 && parts[0] == "interior") {
    const auto m = to_integer(parts[1], "--grid");
    if (m < 1) bad("--grid: need at least one point");
    g.m = static_cast<std::size_t>(m);
    return g;
  }
  if (parts.size() != 3) bad("--grid: expected lo:hi:m or interior:m, got '" + text + "'");
  const auto [lo, hi, m] = parse_path(text, "--grid");
  if (!(0.0 <= lo && hi <= 1.0)) bad("--grid: need 0 <= lo <= hi <= 1");
  g.interior = false;
  g.lo = lo;
  g.hi = hi;
  g.m = m;
  return g;
}

std::tuple<double, double, std::size_t> parse_path(const std::string& text,
                                                   const std::string& flag) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) bad(flag + ": expected lo:hi:count, got '" + text + "'");
  const double lo = to_double(parts[0], flag);
  const double hi = to_double(parts[1], flag);
  const auto m = to_integer(parts[2], flag);
  if (m < 1) bad(flag + ": need at least one point");
  if (lo > hi) bad(flag + ": need lo <= hi");
  if (m > 1 && lo == hi) bad(flag + ": several points need lo < hi");
  return {lo, hi, static_cast<std::size_t>(m)};
}

std::pair<Index, Index> parse_edge(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) bad("--edge: expected j,k, got '" + text + "'");
  const auto j = to_integer(parts[0], "--edge");
  const auto k = to_integer(parts[1], "--edge");
  if (j < 1 || k < 1 || j == k) bad("--edge: need distinct 1-based indices");
  return {static_cast<Index>(j - 1), static_cast<Index>(k - 1)};
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) bad("expected lo:hi, got '" + text + "'");
  return {to_double(parts[0], "range"), to_double(parts[1], "range")};
}

void RunConfig::validate() const {
  const bool needs_input = command == Command::estimate || command == Command::test_edge ||
                           command == Command::test_graph || command == Command::test_uniform;
  if (needs_input && input.empty()) bad(std::string(to_string(command)) + ": --input is required");
  if (!(alpha > 0.0 && alpha < 1.0)) bad("--alpha must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma < 1.0)) bad("--gamma must lie in (0, 1)");
  if (bootstrap < 1) bad("--B must be positive");
  if (reps < 1) bad("--reps must be positive");
  if (!(z0 > 0.0 && z0 < 1.0)) bad("--z0 must lie in (0, 1)");

  const bool graph_test = command == Command::test_graph || command == Command::test_uniform ||
                          (command == Command::power_study && study_test != StudyTest::edge);
  if (graph_test && !graph_path && !knn_hypothesis)
    bad(std::string(to_string(command)) + ": --graph or --knn-graph is required");
  if (command == Command::roc_study) {
    if (roc_methods.empty()) bad("roc-study: --method lists no methods");
    if (!(lambda_lo > 0.0 && lambda_lo <= lambda_hi) || lambda_count < 1)
      bad("roc-study: --lambda-path needs 0 < lo <= hi and a positive count");
    if (eval_points < 1) bad("roc-study: --eval-points must be positive");
  }
  if (command == Command::power_study && study_test == StudyTest::uniform && !grid.interior)
    bad("power-study: the uniform test takes --grid interior:m");
  if (command == Command::simulate || command == Command::roc_study ||
      command == Command::power_study)
    sim.validate();
}

TuningConfig RunConfig::tuning() const {
  TuningConfig t;
  t.kernel = kernel;
  switch (h_rule.kind) {
    case BandwidthRule::Kind::estimate: t.h_constant = kEstimateBandwidthConstant; break;
    case BandwidthRule::Kind::test: t.h_constant = kTestBandwidthConstant; break;
    case BandwidthRule::Kind::value: t.bandwidth = h_rule.value; break;
  }
  if (lambda_rule.fixed)
    t.lambda = lambda_rule.value;
  else
    t.lambda_constant = lambda_rule.value;
  t.gamma = gamma;
  t.method = method;
  return t;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["command"] = to_string(command);
  if (!input.empty()) j["input"] = input.string();
  j["kernel"] = to_string(kernel);
  switch (h_rule.kind) {
    case BandwidthRule::Kind::estimate:
      j["h_rule"] = {{"rule", "estimate"}, {"constant", kEstimateBandwidthConstant}};
      break;
    case BandwidthRule::Kind::test:
      j["h_rule"] = {{"rule", "test"}, {"constant", kTestBandwidthConstant}};
      break;
    case BandwidthRule::Kind::value: j["h_rule"] = {{"rule", "value"}, {"h", h_rule.value}}; break;
  }
  j["lambda_rule"] = lambda_rule.fixed
                         ? nlohmann::json{{"rule", "value"}, {"lambda", lambda_rule.value}}
                         : nlohmann::json{{"rule", "paper"}, {"constant", lambda_rule.value}};
  j["gamma"] = gamma;
  j["method"] = to_string(method);
  j["alpha"] = alpha;
  j["seed"] = seed;

  const auto grid_json = [&] {
    return grid.interior ? nlohmann::json{{"interior", grid.m}}
                         : nlohmann::json{{"lo", grid.lo}, {"hi", grid.hi}, {"m", grid.m}};
  };
  const auto bootstrap_json = [&] {
    return nlohmann::json{
        {"B", bootstrap}, {"mode", to_string(bootstrap_mode)}, {"two_sided", two_sided}};
  };
  const auto hypothesis_json = [&] {
    return graph_path ? nlohmann::json{{"graph", graph_path->string()}}
                      : nlohmann::json{{"knn_graph", *knn_hypothesis}};
  };
  const auto sim_json = [&] {
    nlohmann::json s;
    s["scheme"] = to_string(sim.scheme);
    s["n"] = sim.n;
    s["d"] = sim.d;
    s["e"] = sim.e;
    s["knn_k"] = sim.knn_k;
    s["anchors"] = sim.anchors;
    s["churn"] = sim.churn;
    s["mu"] = {sim.mu_min, sim.mu_max};
    s["contamination_variance"] = sim.contamination_variance;
    s["fixed_edge"] = sim.fixed_edge ? nlohmann::json(*sim.fixed_edge) : nlohmann::json(nullptr);
    s["identity_truth"] = sim.identity_truth;
    return s;
  };

  switch (command) {
    case Command::estimate: j["grid"] = grid_json(); break;
    case Command::test_edge:
      j["z0"] = z0;
      j["edge"] = {edge.first + 1, edge.second + 1};
      break;
    case Command::test_graph:
      j["z0"] = z0;
      j["bootstrap"] = bootstrap_json();
      j["hypothesis"] = hypothesis_json();
      break;
    case Command::test_uniform:
      j["grid"] = grid_json();
      j["bootstrap"] = bootstrap_json();
      j["hypothesis"] = hypothesis_json();
      break;
    case Command::simulate:
      j["sim"] = sim_json();
      j["grid"] = grid_json();
      break;
    case Command::roc_study: {
      auto methods = nlohmann::json::array();
      for (auto m : roc_methods) methods.push_back(to_string(m));
      j["roc_methods"] = methods;
      j["lambda_path"] = {{"lo", lambda_lo}, {"hi", lambda_hi}, {"count", lambda_count}};
      j["eval_points"] = eval_points;
      j["target_fpr"] = target_fpr;
      j["runs"] = reps;
      j["sim"] = sim_json();
      break;
    }
    case Command::power_study:
      j["test"] = to_string(study_test);
      j["reps"] = reps;
      j["sim"] = sim_json();
      if (study_test == StudyTest::edge) {
        j["z0"] = z0;
        j["edge"] = {edge.first + 1, edge.second + 1};
      } else {
        j["bootstrap"] = bootstrap_json();
        j["hypothesis"] = hypothesis_json();
        if (study_test == StudyTest::supergraph)
          j["z0"] = z0;
        else
          j["grid"] = grid_json();
      }
      break;
  }
  return j;
}

}  // namespace tvnpn::cli
