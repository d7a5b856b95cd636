#include <doctest.h>

#include "tvnpn/datamodel.hpp"

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path root;
  Scratch() {
    root = fs::temp_directory_path() / ("tvnpn_cli_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }
};

const Scratch& scratch() {
  static const Scratch s;
  return s;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + TVNPN_CLI_PATH + "\" " + args + " >" +
                          (scratch().root / "stdout.txt").string() + " 2>" +
                          (scratch().root / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

std::string dir(const std::string& name) { return (scratch().root / name).string(); }

// Small dataset shared by the estimate and test cases.
const std::string& small_data() {
  static const std::string path = [] {
    REQUIRE(run_cli("simulate --seed 11 --n 400 --d 6 --e 3 --churn 1 --output " + dir("small")) ==
            0);
    return dir("small") + "/data.csv";
  }();
  return path;
}

}  // namespace

TEST_CASE("simulate is deterministic in the seed") {
  const std::string common = " --n 200 --d 8 --e 4 --churn 2 --sim-scheme contaminated_5pct";
  REQUIRE(run_cli("simulate --seed 7 --output " + dir("sim_a") + common) == 0);
  REQUIRE(run_cli("simulate --seed 7 --output " + dir("sim_b") + common) == 0);
  REQUIRE(run_cli("simulate --seed 8 --output " + dir("sim_c") + common) == 0);
  for (const char* f : {"data.csv", "truth.json"})
    CHECK(slurp(dir("sim_a") + "/" + f) == slurp(dir("sim_b") + "/" + f));
  CHECK(slurp(dir("sim_a") + "/data.csv") != slurp(dir("sim_c") + "/data.csv"));

  const auto data = tvnpn::load_dataset(dir("sim_a") + "/data.csv");
  CHECK(data.n() == 200);
  CHECK(data.d() == 8);
  const auto truth = read_json(dir("sim_a") + "/truth.json");
  CHECK(truth["seed"] == 7);
  CHECK(truth["config"]["sim"]["scheme"] == "contaminated_5pct");
  CHECK(truth["anchor_graphs"].size() == 5);
  CHECK(truth["anchor_graphs"][0].size() == 4);
  CHECK(truth["support"].size() == 100);
  CHECK(slurp(dir("sim_a") + "/data.csv").rfind("# config {", 0) == 0);
}

TEST_CASE("argument errors exit nonzero") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") != 0);
  CHECK(run_cli("frobnicate") != 0);
  CHECK(run_cli("estimate --output " + dir("x")) != 0);
  CHECK(run_cli("simulate --bogus 3") != 0);
  CHECK(run_cli("simulate --n lots") != 0);
  CHECK(run_cli("simulate --d 10 --e 40 --output " + dir("x")) == 2);
  CHECK(run_cli("estimate --input " + small_data() + " --kernel gauss --output " + dir("x")) == 2);
  CHECK(run_cli("estimate --input " + small_data() + " --grid 0:1 --output " + dir("x")) == 2);
  CHECK(run_cli("test-edge --input " + small_data() + " --alpha 1.5 --output " + dir("x")) == 2);
  CHECK(run_cli("test-edge --input " + small_data() + " --edge 1,9 --output " + dir("x")) == 2);
  CHECK(run_cli("test-graph --input " + small_data() + " --output " + dir("x")) == 2);
  CHECK(run_cli("test-edge --input " + dir("missing.csv") + " --output " + dir("x")) == 3);
  CHECK(slurp(scratch().root / "stderr.txt").find("missing.csv") != std::string::npos);
}

TEST_CASE("estimate writes the path and a manifest") {
  const auto out = dir("est");
  REQUIRE(run_cli("estimate --input " + small_data() + " --grid 0.2:0.8:4 --seed 3 --output " +
                out) == 0);
  std::ifstream in(out + "/estimate.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# config ", 0) == 0);
  const auto config = nlohmann::json::parse(line.substr(9));
  CHECK(config["seed"] == 3);
  CHECK(config["h_rule"]["rule"] == "estimate");
  std::getline(in, line);
  CHECK(line == "z,j,k,sigma,omega,edge");
  int rows = 0;
  int unit_diag = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string z, j, k, sigma;
    std::getline(ss, z, ',');
    std::getline(ss, j, ',');
    std::getline(ss, k, ',');
    std::getline(ss, sigma, ',');
    if (j == k && std::stod(sigma) == 1.0) ++unit_diag;
  }
  CHECK(rows == 4 * 21);
  CHECK(unit_diag == 4 * 6);

  const auto m = read_json(out + "/manifest.json");
  CHECK(m["n"] == 400);
  CHECK(m["d"] == 6);
  CHECK(m["tuning"]["h"].get<double>() == doctest::Approx(0.35 * std::pow(400.0, -0.2)));
  CHECK(m["config"]["grid"]["m"] == 4);
}

TEST_CASE("test-edge writes a report") {
  const auto out = dir("edge");
  REQUIRE(run_cli("test-edge --input " + small_data() + " --edge 2,5 --z0 0.4 --output " + out) ==
          0);
  const auto r = read_json(out + "/report.json");
  CHECK(r["config"]["edge"] == nlohmann::json::array({2, 5}));
  CHECK(r["report"]["kind"] == "edge");
  CHECK(r["report"]["statistic"].get<double>() >= 0.0);
  CHECK(r["report"]["threshold"].get<double>() == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(r["report"]["variance"].get<double>() > 0.0);
  CHECK(r["tuning"]["h"].get<double>() == doctest::Approx(0.9 * std::pow(400.0, -0.2)));
}

TEST_CASE("graph tests are reproducible and write replicates") {
  const std::string args = "test-uniform --input " + small_data() +
                           " --knn-graph 2 --grid interior:3 --B 50 --seed 5 --output ";
  REQUIRE(run_cli(args + dir("uni_a")) == 0);
  REQUIRE(run_cli(args + dir("uni_b")) == 0);
  CHECK(slurp(dir("uni_a") + "/report.json") == slurp(dir("uni_b") + "/report.json"));
  const auto r = read_json(dir("uni_a") + "/report.json");
  CHECK(r["report"]["kind"] == "uniform");
  CHECK(r["report"]["n_replicates"] == 50);
  CHECK(r["config"]["bootstrap"]["two_sided"] == true);

  tvnpn::Graph g(6);
  g.add_edge(0, 1);
  tvnpn::save_graph_json(dir("g.json"), g);
  REQUIRE(run_cli("test-graph --input " + small_data() + " --graph " + dir("g.json") +
                " --B 40 --one-sided --bootstrap-mode literal --output " + dir("sg")) == 0);
  const auto s = read_json(dir("sg") + "/report.json");
  CHECK(s["report"]["kind"] == "supergraph");
  CHECK(s["config"]["bootstrap"]["two_sided"] == false);
  CHECK(s["config"]["bootstrap"]["mode"] == "literal");
  std::ifstream in(dir("sg") + "/replicates.csv");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) rows += line.front() != '#';
  CHECK(rows == 41);
}

TEST_CASE("power-study reports a wilson interval") {
  const auto out = dir("power");
  REQUIRE(run_cli("power-study --test edge --reps 6 --n 300 --d 8 --e 4 --churn 2 --fixed-edge 0 "
                "--seed 2 --output " +
                out) == 0);
  std::ifstream in(out + "/power.csv");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "test,scheme,n,d,alpha,replicates,completed,rejections,failures,rate,wilson_lo,"
                "wilson_hi");
  std::getline(in, line);
  CHECK(line.rfind("edge,gaussian,300,8,0.05,6,", 0) == 0);
  const auto m = read_json(out + "/manifest.json");
  CHECK(m["wilson"][0].get<double>() <= m["rate"].get<double>());
  CHECK(m["config"]["sim"]["fixed_edge"] == 0.0);
}

TEST_CASE("roc-study writes curves per method") {
  const auto out = dir("roc");
  REQUIRE(run_cli("roc-study --reps 2 --n 200 --d 8 --e 4 --churn 2 --lambda-path 0.05:1:4 "
                "--eval-points 2 --method kendall-clime --output " +
                out) == 0);
  std::ifstream in(out + "/roc.csv");
  std::string line;
  int rows = 0;
  while (std::getline(in, line))
    if (line.rfind("kendall-clime,", 0) == 0) ++rows;
  CHECK(rows == 4);
  const auto m = read_json(out + "/manifest.json");
  CHECK(m["mean_tpr_at_target_fpr"].contains("kendall-clime"));
  CHECK_FALSE(m["mean_tpr_at_target_fpr"].contains("pearson-clime"));
  CHECK(run_cli("roc-study --method glasso --output " + out) == 2);
}
