#include "commands.hpp"

#include "tvnpn/error.hpp"
#include "tvnpn/kendall.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <type_traits>
#include <vector>

namespace tvnpn::cli {

namespace fs = std::filesystem;

namespace {

class CsvFile {
 public:
  CsvFile(const fs::path& path, const nlohmann::json& config, const std::string& header)
      : path_(path), out_(path) {
    if (!out_) throw Error(ErrorCode::io, "cannot write " + path.string());
    out_ << "# config " << config.dump() << '\n' << header << '\n';
  }

  template <typename... Cells>
  void row(const Cells&... cells) {
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << cell(cells)), ...);
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw Error(ErrorCode::io, "write failed for " + path_.string());
  }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(std::string_view s) { return std::string(s); }
  static std::string cell(const char* s) { return s; }
  template <typename I>
    requires std::is_integral_v<I>
  static std::string cell(I v) {
    return std::to_string(v);
  }

  fs::path path_;
  std::ofstream out_;
};

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

nlohmann::json matrix_json(const Matrix& m) {
  auto rows = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json edges_json(const Graph& g) {
  auto edges = nlohmann::json::array();
  for (const auto& e : g.edges()) edges.push_back({e.j + 1, e.k + 1});
  return edges;
}

Graph hypothesis(const RunConfig& cfg, Index d) {
  Graph g = cfg.graph_path ? load_graph_json(*cfg.graph_path) : knn_graph(d, *cfg.knn_hypothesis);
  if (g.d() != d)
    throw Error(ErrorCode::dimension, "hypothesis graph has d = " + std::to_string(g.d()) +
                                          ", data has d = " + std::to_string(d));
  return g;
}

void check_edge(const RunConfig& cfg, Index d) {
  if (cfg.edge.first >= d || cfg.edge.second >= d)
    throw Error(ErrorCode::dimension, "--edge: index out of range for d = " + std::to_string(d));
}

BootstrapOptions bootstrap_options(const RunConfig& cfg) {
  BootstrapOptions o;
  o.replicates = cfg.bootstrap;
  o.seed = cfg.seed;
  o.mode = cfg.bootstrap_mode;
  o.two_sided = cfg.two_sided;
  return o;
}

nlohmann::json tuning_json(const KernelSpec& spec, const ClimeConfig& clime) {
  return {{"h", spec.bandwidth}, {"lambda", clime.lambda}, {"gamma", clime.gamma}};
}

void estimate(const RunConfig& cfg, const nlohmann::json& config) {
  const auto data = load_dataset(cfg.input);
  const auto t = cfg.tuning();
  const auto spec = t.kernel_spec(data.n());
  auto clime = t.clime_config(data.n(), data.d());
  clime.symmetrize = Symmetrize::min_magnitude;
  const auto grid = cfg.grid.make();
  const auto path = correlation_path(data, spec, grid);

  CsvFile est(cfg.output / "estimate.csv", config, "z,j,k,sigma,omega,edge");
  CsvFile pts(cfg.output / "points.csv", config, "z,status,un_omega,edges");
  auto skipped = nlohmann::json::array();
  for (const auto& p : path) {
    if (p.degenerate()) {
      pts.row(p.z, "degenerate", p.un_omega, 0);
      skipped.push_back({{"z", p.z}, {"error", p.error}});
      continue;
    }
    const auto inv = inverse_correlation(*p.sigma, clime, p.z);
    const auto g = support_graph(inv);
    for (Index j = 0; j < data.d(); ++j)
      for (Index k = j; k < data.d(); ++k)
        est.row(p.z, j + 1, k + 1, (*p.sigma)(j, k), inv.omega(j, k),
                j != k && g.has_edge(j, k) ? 1 : 0);
    pts.row(p.z, "ok", p.un_omega, g.size());
  }
  est.close();
  pts.close();

  nlohmann::json m;
  m["config"] = config;
  m["n"] = data.n();
  m["d"] = data.d();
  m["tuning"] = tuning_json(spec, clime);
  m["degenerate_points"] = skipped;
  m["files"] = {"estimate.csv", "points.csv"};
  write_json(cfg.output / "manifest.json", m);
}

nlohmann::json test_header(const RunConfig& cfg, const nlohmann::json& config, const Dataset& data,
                           const KernelSpec& spec, const ClimeConfig& clime) {
  nlohmann::json j;
  j["config"] = config;
  j["n"] = data.n();
  j["d"] = data.d();
  j["tuning"] = tuning_json(spec, clime);
  j["seed"] = cfg.seed;
  return j;
}

void write_replicates(const fs::path& path, const nlohmann::json& config, const TestReport& r) {
  CsvFile out(path, config, "replicate,value");
  for (std::size_t b = 0; b < r.replicates.size(); ++b) out.row(b + 1, r.replicates[b]);
  out.close();
}

void test_edge(const RunConfig& cfg, const nlohmann::json& config) {
  const auto data = load_dataset(cfg.input);
  check_edge(cfg, data.d());
  const auto t = cfg.tuning();
  const auto spec = t.kernel_spec(data.n());
  const auto clime = t.clime_config(data.n(), data.d());
  const auto ctx = make_score_context(data, spec, cfg.z0, clime);
  const auto rep = edge_test(ctx, cfg.edge.first, cfg.edge.second, cfg.alpha);
  auto j = test_header(cfg, config, data, spec, clime);
  j["score"] = score(ctx, cfg.edge.first, cfg.edge.second);
  j["report"] = to_json(rep);
  write_json(cfg.output / "report.json", j);
}

void test_graph(const RunConfig& cfg, const nlohmann::json& config) {
  const auto data = load_dataset(cfg.input);
  const auto graph = hypothesis(cfg, data.d());
  const auto t = cfg.tuning();
  const auto spec = t.kernel_spec(data.n());
  const auto clime = t.clime_config(data.n(), data.d());
  const auto ctx = make_score_context(data, spec, cfg.z0, clime);
  const auto rep = supergraph_test(ctx, graph, cfg.alpha, bootstrap_options(cfg));
  auto j = test_header(cfg, config, data, spec, clime);
  j["hypothesis_edges"] = graph.size();
  j["report"] = to_json(rep);
  write_json(cfg.output / "report.json", j);
  write_replicates(cfg.output / "replicates.csv", config, rep);
}

void test_uniform(const RunConfig& cfg, const nlohmann::json& config) {
  const auto data = load_dataset(cfg.input);
  const auto graph = hypothesis(cfg, data.d());
  const auto t = cfg.tuning();
  const auto spec = t.kernel_spec(data.n());
  const auto clime = t.clime_config(data.n(), data.d());
  const auto path = path_contexts(data, spec, cfg.grid.make(), clime);
  const auto rep = uniform_test(path, graph, cfg.alpha, bootstrap_options(cfg));
  auto j = test_header(cfg, config, data, spec, clime);
  j["hypothesis_edges"] = graph.size();
  j["report"] = to_json(rep);
  write_json(cfg.output / "report.json", j);
  write_replicates(cfg.output / "replicates.csv", config, rep);
}

void simulate_cmd(const RunConfig& cfg, const nlohmann::json& config) {
  SimConfig sc = cfg.sim;
  sc.seed = cfg.seed;
  const auto sim = simulate(sc);
  const std::vector<std::string> comments{"config " + config.dump()};
  save_dataset(cfg.output / "data.csv", sim.data, comments);

  nlohmann::json truth;
  truth["config"] = config;
  truth["seed"] = cfg.seed;
  truth["d"] = sim.truth.d();
  truth["breaks"] = sc.anchors;
  auto graphs = nlohmann::json::array();
  for (const auto& g : sim.truth.anchor_graphs()) graphs.push_back(edges_json(g));
  truth["anchor_graphs"] = graphs;
  truth["knots"] = sim.truth.knots();
  auto omegas = nlohmann::json::array();
  for (const auto& om : sim.truth.anchor_omegas()) omegas.push_back(matrix_json(om));
  truth["knot_omegas"] = omegas;
  auto support = nlohmann::json::array();
  const auto grid = cfg.grid.make();
  for (double z : grid.points())
    support.push_back({{"z", z}, {"edges", edges_json(sim.truth.support(z))}});
  truth["support"] = support;
  write_json(cfg.output / "truth.json", truth);
}

void roc_study_cmd(const RunConfig& cfg, const nlohmann::json& config) {
  RocStudyConfig rc;
  rc.sim = cfg.sim;
  rc.tuning = cfg.tuning();
  rc.lambdas = log_spaced(cfg.lambda_lo, cfg.lambda_hi, cfg.lambda_count);
  rc.eval_points = cfg.eval_points;
  rc.runs = cfg.reps;
  rc.methods = cfg.roc_methods;
  rc.target_fpr = cfg.target_fpr;
  rc.seed = cfg.seed;
  const auto curves = roc_study(rc);

  CsvFile roc(cfg.output / "roc.csv", config, "method,lambda,fpr,tpr");
  CsvFile runs(cfg.output / "roc_runs.csv", config, "method,run,tpr_at_target_fpr");
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& c : curves) {
    for (std::size_t l = 0; l < c.mean_points.size(); ++l)
      roc.row(to_string(c.method), rc.lambdas[l], c.mean_points[l].fpr, c.mean_points[l].tpr);
    for (std::size_t r = 0; r < c.tpr_at_target.size(); ++r)
      runs.row(to_string(c.method), r + 1, c.tpr_at_target[r]);
    summary[std::string(to_string(c.method))] = c.mean_tpr_at_target;
  }
  roc.close();
  runs.close();

  nlohmann::json m;
  m["config"] = config;
  m["mean_tpr_at_target_fpr"] = summary;
  m["files"] = {"roc.csv", "roc_runs.csv"};
  write_json(cfg.output / "manifest.json", m);
}

void power_study_cmd(const RunConfig& cfg, const nlohmann::json& config) {
  RateSummary s;
  std::vector<std::string> files{"power.csv"};
  if (cfg.study_test == StudyTest::edge) {
    check_edge(cfg, cfg.sim.d);
    EdgeStudyConfig ec;
    ec.sim = cfg.sim;
    ec.tuning = cfg.tuning();
    ec.z0 = cfg.z0;
    ec.j = cfg.edge.first;
    ec.k = cfg.edge.second;
    ec.alpha = cfg.alpha;
    ec.reps = cfg.reps;
    ec.seed = cfg.seed;
    const auto r = edge_power_study(ec);
    s = r.summary;
    CsvFile stats(cfg.output / "statistics.csv", config, "statistic");
    for (double v : r.standardized) stats.row(v);
    stats.close();
    files.push_back("statistics.csv");
  } else {
    GraphStudyConfig gc;
    gc.sim = cfg.sim;
    gc.tuning = cfg.tuning();
    gc.hypothesis = hypothesis(cfg, cfg.sim.d);
    if (cfg.study_test == StudyTest::supergraph) gc.z0 = cfg.z0;
    gc.grid_points = static_cast<Index>(cfg.grid.m);
    gc.alpha = cfg.alpha;
    gc.reps = cfg.reps;
    gc.bootstrap = cfg.bootstrap;
    gc.mode = cfg.bootstrap_mode;
    gc.two_sided = cfg.two_sided;
    gc.seed = cfg.seed;
    s = graph_power_study(gc);
  }

  CsvFile table(cfg.output / "power.csv", config,
                "test,scheme,n,d,alpha,replicates,completed,rejections,failures,rate,wilson_lo,"
                "wilson_hi");
  table.row(to_string(cfg.study_test), to_string(cfg.sim.scheme), cfg.sim.n, cfg.sim.d, cfg.alpha,
            s.replicates, s.replicates - s.failures, s.rejections, s.failures, s.rate, s.wilson.lo,
            s.wilson.hi);
  table.close();

  nlohmann::json m;
  m["config"] = config;
  m["rate"] = s.rate;
  m["wilson"] = {s.wilson.lo, s.wilson.hi};
  m["failures"] = s.failure_messages;
  m["files"] = files;
  write_json(cfg.output / "manifest.json", m);
}

}  // namespace

void run(const RunConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(cfg.output, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create " + cfg.output.string() + ": " + ec.message());
  const auto config = cfg.to_json();
  switch (cfg.command) {
    case Command::estimate: estimate(cfg, config); break;
    case Command::test_edge: test_edge(cfg, config); break;
    case Command::test_graph: test_graph(cfg, config); break;
    case Command::test_uniform: test_uniform(cfg, config); break;
    case Command::simulate: simulate_cmd(cfg, config); break;
    case Command::roc_study: roc_study_cmd(cfg, config); break;
    case Command::power_study: power_study_cmd(cfg, config); break;
  }
}

}  // namespace tvnpn::cli
