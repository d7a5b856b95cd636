#include <doctest.h>

#include "checks.hpp"
#include "oracles.hpp"

#include "tvnpn/datamodel.hpp"
#include "tvnpn/error.hpp"

#include <filesystem>
#include <sstream>

using namespace tvnpn;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::io;
}

}  // namespace

TEST_CASE("kernel values") {
  CHECK(kernel_eval(KernelName::epanechnikov, 0.0) == 0.75);
  CHECK(kernel_eval(KernelName::epanechnikov, 1.5) == 0.0);
  CHECK(kernel_eval(KernelName::uniform, 0.3) == 0.5);
  CHECK(kernel_eval(KernelName::triangular, 0.0) == 1.0);
  CHECK(kernel_eval(KernelName::triangular, -0.25) == doctest::Approx(0.75));
  for (auto k : all_kernels()) {
    CHECK(kernel_eval(k, 1.0001) == 0.0);
    CHECK(kernel_eval(k, -3.0) == 0.0);
  }
  const KernelSpec spec(KernelName::epanechnikov, 0.2);
  CHECK(spec.weight(0.1) == doctest::Approx(0.75 * (1 - 0.25) / 0.2));
}

TEST_CASE("kernel names round-trip") {
  for (auto k : all_kernels()) CHECK(parse_kernel(to_string(k)) == k);
  CHECK_FALSE(parse_kernel("gaussian").has_value());
}

TEST_CASE("kernels are even densities") {
  const auto r = check::kernel_normalization();
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("kernel spec rejects bandwidths outside (0,1)") {
  CHECK_THROWS_AS(KernelSpec(KernelName::uniform, 0.0), Error);
  CHECK_THROWS_AS(KernelSpec(KernelName::uniform, 1.0), Error);
}

TEST_CASE("evaluation grids") {
  const auto g = EvalGrid::evenly(0.1, 0.9, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.lo() == 0.1);
  CHECK(g.hi() == 0.9);
  CHECK(g.points()[2] == doctest::Approx(0.5));

  const auto s = EvalGrid::singleton(0.3);
  CHECK(s.size() == 1);
  CHECK(s.lo() == s.hi());

  const auto in = EvalGrid::interior(4);
  CHECK(in.points()[0] == doctest::Approx(0.2));
  CHECK(in.points()[3] == doctest::Approx(0.8));

  CHECK(code_of([] { EvalGrid::evenly(0.0, 0.5, 3); }) == ErrorCode::domain);
  CHECK(code_of([] { EvalGrid::evenly(0.2, 0.5, 1); }) == ErrorCode::invalid_argument);
}

TEST_CASE("graphs store canonical pairs") {
  Graph g(4);
  g.add_edge(3, 1);
  CHECK(g.has_edge(1, 3));
  CHECK(g.has_edge(3, 1));
  CHECK(g.edges().begin()->j == 1);
  CHECK_THROWS_AS(g.add_edge(2, 2), Error);
  CHECK_THROWS_AS(g.add_edge(0, 4), Error);
  CHECK(g.complement_edges().size() == 5);
  CHECK(Graph::complete(4).size() == 6);
  CHECK(Graph::complete(4).complement_edges().empty());
  CHECK(g.remove_edge(1, 3));
  CHECK_FALSE(g.remove_edge(1, 3));

  Matrix m = Matrix::Identity(3, 3);
  m(0, 2) = 0.2;
  m(1, 0) = 1e-9;
  CHECK(Graph::from_support(m).size() == 2);
  CHECK(Graph::from_support(m, 1e-6).size() == 1);
}

TEST_CASE("graph json is 1-indexed") {
  Graph g(5);
  g.add_edge(0, 4);
  g.add_edge(1, 2);
  const auto text = graph_to_json_string(g);
  CHECK(text.find("[1,5]") != std::string::npos);
  CHECK(graph_from_json_string(text) == g);
  CHECK(code_of([] { graph_from_json_string(R"({"d":3,"edges":[[0,1]]})"); }) ==
        ErrorCode::parse);
  CHECK(code_of([] { graph_from_json_string("{"); }) == ErrorCode::parse);
}

TEST_CASE("dataset invariants") {
  Matrix x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  CHECK_NOTHROW(Dataset(x, Vector::Constant(3, 0.5)));
  CHECK(code_of([&] { Dataset(x, Vector::Constant(2, 0.5)); }) == ErrorCode::dimension);
  CHECK(code_of([&] { Dataset(x, Vector::Constant(3, 1.0)); }) == ErrorCode::domain);
  Matrix bad = x;
  bad(1, 1) = std::numeric_limits<double>::infinity();
  CHECK(code_of([&] { Dataset(bad, Vector::Constant(3, 0.5)); }) == ErrorCode::domain);
  CHECK(code_of([&] { Dataset(Matrix::Zero(3, 1), Vector::Constant(3, 0.5)); }) ==
        ErrorCode::dimension);
}

TEST_CASE("csv loading") {
  SUBCASE("well formed") {
    std::istringstream in("z,x1,x2\n0.1,1,2\n0.5,-3.5,4e-2\n0.9,0,1\n");
    const auto data = read_dataset_csv(in);
    CHECK(data.n() == 3);
    CHECK(data.d() == 2);
    CHECK(data.x()(1, 1) == 4e-2);
    CHECK(data.z()[2] == 0.9);
  }
  SUBCASE("comments and blank lines are skipped") {
    std::istringstream in("# seed 3\n\nz,x1,x2\n0.1,1,2\n\n0.2,3,4\n");
    CHECK(read_dataset_csv(in).n() == 2);
  }
  SUBCASE("z on the boundary") {
    std::istringstream in("z,x1,x2\n0.1,1,2\n1.0,3,4\n");
    CHECK(code_of([&] { read_dataset_csv(in); }) == ErrorCode::domain);
  }
  SUBCASE("non-finite cell") {
    std::istringstream in("z,x1,x2\n0.1,NaN,2\n0.2,3,4\n");
    CHECK(code_of([&] { read_dataset_csv(in); }) == ErrorCode::parse);
  }
  SUBCASE("malformed number") {
    std::istringstream in("z,x1,x2\n0.1,1x,2\n0.2,3,4\n");
    CHECK(code_of([&] { read_dataset_csv(in); }) == ErrorCode::parse);
  }
  SUBCASE("ragged row") {
    std::istringstream in("z,x1,x2\n0.1,1,2\n0.2,3\n");
    CHECK(code_of([&] { read_dataset_csv(in); }) == ErrorCode::dimension);
  }
  SUBCASE("bad header") {
    std::istringstream in("t,x1,x2\n0.1,1,2\n");
    CHECK(code_of([&] { read_dataset_csv(in); }) == ErrorCode::parse);
  }
}

TEST_CASE("csv round-trips bit for bit") {
  const auto data = oracle::random_dataset(50, 4, 11);
  const auto path = std::filesystem::temp_directory_path() / "tvnpn_roundtrip.csv";
  const std::vector<std::string> notes{"generated for a round-trip check"};
  save_dataset(path, data, notes);
  const auto back = load_dataset(path);
  CHECK(back.x() == data.x());
  CHECK(back.z() == data.z());
  std::filesystem::remove(path);
  CHECK(code_of([&] { load_dataset(path); }) == ErrorCode::io);
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}
