// tvnpn: estimation, tests, simulation and studies from the command line.
//
// Exit status: 0 success, 2 bad arguments or input, 3 file system errors,
// 4 numerical failures (degenerate windows, infeasible programs, ...),
// 1 anything else. Argument syntax errors use CLI11's own codes.

#include "commands.hpp"
#include "run_config.hpp"

#include "tvnpn/error.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

using namespace tvnpn;
using namespace tvnpn::cli;

namespace {

struct RawOptions {
  std::string input;
  std::string output = ".";
  std::string kernel = "epanechnikov";
  std::optional<std::string> h_rule;
  std::string lambda_rule = "paper";
  double gamma = 0.5;
  std::optional<std::string> method;
  double alpha = 0.05;
  long long bootstrap = 1000;
  std::string bootstrap_mode = "linearized";
  bool one_sided = false;
  std::optional<std::string> grid;
  double z0 = 0.5;
  std::uint64_t seed = 0;
  std::optional<std::string> graph;
  std::optional<long long> knn_graph;
  std::string edge = "1,2";
  std::string test = "edge";
  long long reps = 200;

  std::string scheme = "gaussian";
  long long n = 500;
  long long d = 50;
  long long e = 25;
  long long churn = 10;
  long long knn = 4;
  std::string mu = "0.5:0.9";
  std::optional<double> fixed_edge;
  bool identity_truth = false;

  std::string lambda_path = "0.005:2:30";
  long long eval_points = 10;
  double target_fpr = 0.2;
};

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::invalid_argument, msg); }

void add_tuning(CLI::App* sub, RawOptions& o) {
  sub->add_option("--output", o.output, "Output directory")->capture_default_str();
  sub->add_option("--kernel", o.kernel, "epanechnikov, uniform or triangular")
      ->capture_default_str();
  sub->add_option("--h-rule", o.h_rule, "estimate, test or a fixed bandwidth");
  sub->add_option("--lambda-rule", o.lambda_rule, "paper, paper:C or a fixed lambda")
      ->capture_default_str();
  sub->add_option("--gamma", o.gamma, "Calibrated CLIME weight")->capture_default_str();
  sub->add_option("--seed", o.seed)->capture_default_str();
}

void add_input(CLI::App* sub, RawOptions& o) {
  sub->add_option("--input", o.input, "CSV with header z,x1,...,xd")->required();
  sub->add_option("--method", o.method, "calibrated-clime or clime");
}

void add_bootstrap(CLI::App* sub, RawOptions& o) {
  sub->add_option("--graph", o.graph, "Hypothesized graph JSON");
  sub->add_option("--knn-graph", o.knn_graph, "Use the ring k-nearest-neighbour graph");
  sub->add_option("--B", o.bootstrap, "Bootstrap replicates")->capture_default_str();
  sub->add_option("--bootstrap-mode", o.bootstrap_mode, "linearized or literal")
      ->capture_default_str();
  sub->add_flag("--one-sided,!--two-sided", o.one_sided, "Signed max instead of max |score|");
}

void add_sim(CLI::App* sub, RawOptions& o) {
  sub->add_option("--sim-scheme", o.scheme,
                  "gaussian, gaussian_copula, contaminated_2pct or contaminated_5pct")
      ->capture_default_str();
  sub->add_option("--n", o.n)->capture_default_str();
  sub->add_option("--d", o.d)->capture_default_str();
  sub->add_option("--e", o.e, "Edges per anchor graph")->capture_default_str();
  sub->add_option("--churn", o.churn, "Edges swapped between anchor graphs")
      ->capture_default_str();
  sub->add_option("--knn", o.knn, "Scaffold neighbourhood size")->capture_default_str();
  sub->add_option("--mu", o.mu, "lo:hi range of off-diagonal magnitudes")->capture_default_str();
  sub->add_option("--fixed-edge", o.fixed_edge, "Hold Omega_12 at this value");
  sub->add_flag("--identity-truth", o.identity_truth, "Omega(z) = I");
}

RunConfig resolve(Command command, const RawOptions& o) {
  RunConfig c;
  c.command = command;
  c.input = o.input;
  c.output = o.output;
  const auto kernel = parse_kernel(o.kernel);
  if (!kernel) bad("--kernel: unknown kernel '" + o.kernel + "'");
  c.kernel = *kernel;

  const bool estimation = command == Command::estimate || command == Command::roc_study ||
                          command == Command::simulate;
  c.h_rule = parse_h_rule(o.h_rule.value_or(estimation ? "estimate" : "test"));
  c.lambda_rule = parse_lambda_rule(o.lambda_rule);
  c.gamma = o.gamma;
  c.alpha = o.alpha;
  c.seed = o.seed;

  if (command == Command::roc_study) {
    if (o.method) {
      c.roc_methods.clear();
      std::string_view rest = *o.method;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto name = rest.substr(0, comma);
        const auto m = parse_roc_method(name);
        if (!m) bad("--method: unknown roc method '" + std::string(name) + "'");
        c.roc_methods.push_back(*m);
        rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
      }
    }
  } else if (o.method) {
    const auto m = parse_clime_method(*o.method);
    if (!m) bad("--method: unknown method '" + *o.method + "'");
    c.method = *m;
  }

  if (o.bootstrap < 1) bad("--B must be positive");
  c.bootstrap = static_cast<Index>(o.bootstrap);
  const auto mode = parse_bootstrap_mode(o.bootstrap_mode);
  if (!mode) bad("--bootstrap-mode: unknown mode '" + o.bootstrap_mode + "'");
  c.bootstrap_mode = *mode;
  c.two_sided = !o.one_sided;

  if (o.grid) {
    c.grid = parse_grid(*o.grid);
  } else if (command == Command::power_study) {
    c.grid.m = 20;
  }
  c.z0 = o.z0;
  if (o.graph) c.graph_path = *o.graph;
  if (o.knn_graph) c.knn_hypothesis = static_cast<Index>(*o.knn_graph);
  if (o.graph && o.knn_graph) bad("--graph and --knn-graph are exclusive");
  c.edge = parse_edge(o.edge);

  if (o.test == "edge")
    c.study_test = StudyTest::edge;
  else if (o.test == "supergraph")
    c.study_test = StudyTest::supergraph;
  else if (o.test == "uniform")
    c.study_test = StudyTest::uniform;
  else
    bad("--test: expected edge, supergraph or uniform");
  c.reps = static_cast<Index>(o.reps);

  const auto scheme = parse_scheme(o.scheme);
  if (!scheme) bad("--sim-scheme: unknown scheme '" + o.scheme + "'");
  c.sim.scheme = *scheme;
  c.sim.n = static_cast<Index>(o.n);
  c.sim.d = static_cast<Index>(o.d);
  c.sim.e = static_cast<Index>(o.e);
  c.sim.churn = static_cast<Index>(o.churn);
  c.sim.knn_k = static_cast<Index>(o.knn);
  const auto [mu_lo, mu_hi] = parse_range(o.mu);
  c.sim.mu_min = mu_lo;
  c.sim.mu_max = mu_hi;
  c.sim.fixed_edge = o.fixed_edge;
  c.sim.identity_truth = o.identity_truth;

  std::tie(c.lambda_lo, c.lambda_hi, c.lambda_count) = parse_path(o.lambda_path, "--lambda-path");
  c.eval_points = static_cast<Index>(o.eval_points);
  c.target_fpr = o.target_fpr;
  return c;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse:
    case ErrorCode::domain:
    case ErrorCode::dimension:
    case ErrorCode::invalid_argument: return 2;
    case ErrorCode::io: return 3;
    default: return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-varying nonparanormal graphical models: estimation and inference"};
  app.require_subcommand(1);
  RawOptions o;
  std::vector<std::pair<CLI::App*, Command>> subs;

  auto* est = app.add_subcommand("estimate", "Correlation and inverse-correlation path");
  add_input(est, o);
  add_tuning(est, o);
  est->add_option("--grid", o.grid, "lo:hi:m or interior:m (default interior:100)");
  subs.emplace_back(est, Command::estimate);

  auto* edge = app.add_subcommand("test-edge", "Edge test at one index value");
  add_input(edge, o);
  add_tuning(edge, o);
  edge->add_option("--alpha", o.alpha)->capture_default_str();
  edge->add_option("--z0", o.z0)->capture_default_str();
  edge->add_option("--edge", o.edge, "j,k (1-based)")->capture_default_str();
  subs.emplace_back(edge, Command::test_edge);

  auto* graph = app.add_subcommand("test-graph", "Supergraph test at one index value");
  add_input(graph, o);
  add_tuning(graph, o);
  add_bootstrap(graph, o);
  graph->add_option("--alpha", o.alpha)->capture_default_str();
  graph->add_option("--z0", o.z0)->capture_default_str();
  subs.emplace_back(graph, Command::test_graph);

  auto* uni = app.add_subcommand("test-uniform", "Supergraph test over a grid");
  add_input(uni, o);
  add_tuning(uni, o);
  add_bootstrap(uni, o);
  uni->add_option("--alpha", o.alpha)->capture_default_str();
  uni->add_option("--grid", o.grid, "lo:hi:m or interior:m (default interior:100)");
  subs.emplace_back(uni, Command::test_uniform);

  auto* sim = app.add_subcommand("simulate", "Draw a dataset and its true graph path");
  sim->add_option("--output", o.output, "Output directory")->capture_default_str();
  sim->add_option("--seed", o.seed)->capture_default_str();
  sim->add_option("--grid", o.grid, "Grid for the support sidecar (default interior:100)");
  add_sim(sim, o);
  subs.emplace_back(sim, Command::simulate);

  auto* roc = app.add_subcommand("roc-study", "Kendall versus Pearson CLIME ROC curves");
  add_tuning(roc, o);
  add_sim(roc, o);
  roc->add_option("--method", o.method, "Comma list of kendall-clime, pearson-clime");
  roc->add_option("--reps", o.reps, "Simulation runs")->capture_default_str();
  roc->add_option("--lambda-path", o.lambda_path, "lo:hi:count, log spaced")
      ->capture_default_str();
  roc->add_option("--eval-points", o.eval_points)->capture_default_str();
  roc->add_option("--target-fpr", o.target_fpr)->capture_default_str();
  subs.emplace_back(roc, Command::roc_study);

  auto* power = app.add_subcommand("power-study", "Monte-Carlo rejection rate of one test");
  add_tuning(power, o);
  add_sim(power, o);
  add_bootstrap(power, o);
  power->add_option("--method", o.method, "calibrated-clime or clime");
  power->add_option("--test", o.test, "edge, supergraph or uniform")->capture_default_str();
  power->add_option("--reps", o.reps)->capture_default_str();
  power->add_option("--alpha", o.alpha)->capture_default_str();
  power->add_option("--z0", o.z0)->capture_default_str();
  power->add_option("--edge", o.edge, "j,k (1-based)")->capture_default_str();
  power->add_option("--grid", o.grid, "interior:m for the uniform test (default interior:20)");
  subs.emplace_back(power, Command::power_study);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (const auto& [sub, command] : subs)
      if (sub->parsed()) run(resolve(command, o));
  } catch (const Error& e) {
    std::fprintf(stderr, "tvnpn: %s: %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "tvnpn: %s\n", e.what());
    return 1;
  }
  return 0;
}
