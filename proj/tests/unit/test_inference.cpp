#include <doctest.h>

#include "checks.hpp"
#include "oracles.hpp"

#include "tvnpn/error.hpp"
#include "tvnpn/inference.hpp"
#include "tvnpn/normal.hpp"
#include "tvnpn/rng.hpp"

#include <cmath>

using namespace tvnpn;

namespace {

Matrix three_by_three_omega() {
  Matrix om(3, 3);
  om << 1.6, -0.5, 0.2,
        -0.5, 1.4, 0.3,
        0.2, 0.3, 1.2;
  return om;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::io;
}

ScoreContext sample_context(std::uint64_t seed, Index n = 150, Index d = 4, double z0 = 0.5) {
  const auto data = oracle::random_dataset(n, d, seed);
  ClimeConfig cc;
  cc.lambda = 0.1;
  return make_score_context(data, KernelSpec(KernelName::epanechnikov, 0.4), z0, cc);
}

}  // namespace

TEST_CASE("score of the identity plug-in is zero") {
  const Matrix eye = Matrix::Identity(4, 4);
  for (Index j = 0; j < 4; ++j)
    for (Index k = 0; k < 4; ++k)
      if (j != k) CHECK(score(eye, eye, j, k) == 0.0);
}

TEST_CASE("score at the population truth is minus Omega_jk") {
  const Matrix om = three_by_three_omega();
  const Matrix sigma = om.inverse();
  for (Index j = 0; j < 3; ++j) {
    for (Index k = 0; k < 3; ++k) {
      if (j == k) continue;
      CHECK(score(sigma, om, j, k) == doctest::Approx(oracle::score(sigma, om, j, k)));
      CHECK(score(sigma, om, j, k) == doctest::Approx(-om(j, k)));
    }
  }
}

TEST_CASE("score ignores Omega_jk") {
  const Matrix sigma = oracle::random_correlation(4, 1);
  Matrix om = sigma.inverse();
  const double before = score(sigma, om, 1, 3);
  om(1, 3) = 123.0;
  CHECK(score(sigma, om, 1, 3) == before);
  CHECK_THROWS_AS(score(sigma, om, 2, 2), Error);
}

TEST_CASE("jackknife equals the triple loop") {
  const auto data = oracle::random_dataset(6, 3, 8);
  const KernelSpec spec(KernelName::uniform, 0.6);
  const Matrix om = three_by_three_omega();
  const auto ctx = make_score_context(pair_summary(data, spec, 0.5), om);
  for (Index j = 0; j < 3; ++j) {
    for (Index k = 0; k < 3; ++k) {
      if (j == k) continue;
      const double want = oracle::jackknife(data, spec, 0.5, om, j, k);
      CHECK(std::abs(jackknife_variance(ctx, j, k) - want) <= 1e-12 * std::max(1.0, want));
    }
  }
}

TEST_CASE("jackknife vanishes when every leave-one-out ratio equals tau-hat") {
  const auto base = oracle::random_dataset(30, 3, 12);
  Matrix x = base.x();
  x.col(1) = x.col(0);
  x.col(2) = 2.0 * x.col(0);
  const auto ctx = make_score_context(pair_summary(Dataset(x, base.z()),
                                                   KernelSpec(KernelName::uniform, 0.6), 0.5),
                                      Matrix::Identity(3, 3));
  CHECK(jackknife_variance(ctx, 0, 1) == 0.0);
  CHECK(code_of([&] { edge_test(ctx, 0, 1, 0.05); }) == ErrorCode::zero_variance);
}

TEST_CASE("jackknife is rank invariant") {
  const auto data = oracle::random_dataset(100, 3, 15);
  const KernelSpec spec(KernelName::epanechnikov, 0.3);
  const Matrix om = three_by_three_omega();
  Matrix x = data.x();
  x.col(1) = x.col(1).array().exp().matrix();
  const auto a = make_score_context(pair_summary(data, spec, 0.5), om);
  const auto b = make_score_context(pair_summary(Dataset(x, data.z()), spec, 0.5), om);
  CHECK(jackknife_variance(a, 0, 1) == jackknife_variance(b, 0, 1));
}

TEST_CASE("edge decision threshold") {
  CHECK_FALSE(edge_decision(1.959, 0.05).reject);
  CHECK(edge_decision(1.961, 0.05).reject);
  CHECK(edge_decision(1.96, 0.05).threshold == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(*edge_decision(1.959963984540054, 0.05).p_value == doctest::Approx(0.05).epsilon(1e-9));
  CHECK_THROWS_AS(edge_decision(1.0, 0.0), Error);
}

TEST_CASE("edge test report") {
  const auto ctx = sample_context(3);
  const auto r = edge_test(ctx, 0, 1, 0.05);
  CHECK(r.kind == TestKind::edge);
  REQUIRE(r.variance);
  REQUIRE(r.signed_statistic);
  CHECK(r.statistic == std::abs(*r.signed_statistic));
  CHECK(*r.signed_statistic ==
        doctest::Approx(std::sqrt(150.0 * 0.4) * score(ctx, 0, 1) / std::sqrt(*r.variance)));
  CHECK(r.reject == (r.statistic > r.threshold));
}

TEST_CASE("normal quantile against a series oracle") {
  CHECK(std_normal_quantile(0.5) == 0.0);
  CHECK(std::abs(std_normal_quantile(0.975) - 1.9599640) <= 1e-7);
  CHECK(std::abs(std_normal_quantile(0.995) - 2.5758293) <= 1e-7);
  for (double p : {1e-10, 1e-6, 0.001, 0.01, 0.025, 0.1, 0.3, 0.5, 0.7, 0.9, 0.975, 0.995, 0.999999})
    CHECK(std::abs(std_normal_quantile(p) - oracle::normal_quantile(p)) <= 1e-8);
  CHECK(code_of([] { std_normal_quantile(0.0); }) == ErrorCode::domain);
  CHECK(code_of([] { std_normal_quantile(1.0); }) == ErrorCode::domain);
}

TEST_CASE("normal cdf and quantile are inverse") {
  for (double x = -6.0; x <= 6.0; x += 0.37)
    CHECK(std_normal_quantile(std_normal_cdf(x)) == doctest::Approx(x).epsilon(1e-9));
}

TEST_CASE("supergraph statistic") {
  const auto ctx = sample_context(4);
  const double root = std::sqrt(ctx.n() * ctx.h());
  const std::vector<Edge> one{{0, 2}};
  CHECK(supergraph_statistic(ctx, one) ==
        doctest::Approx(root * ctx.tau.un_omega * score(ctx, 0, 2)));

  const auto all = Graph(4).complement_edges();
  const double full = supergraph_statistic(ctx, all);
  Edge low = all.front();
  Edge high = all.front();
  for (const auto& e : all) {
    if (score(ctx, e.j, e.k) < score(ctx, low.j, low.k)) low = e;
    if (score(ctx, e.j, e.k) > score(ctx, high.j, high.k)) high = e;
  }
  const std::vector<Edge> top{high};
  const std::vector<Edge> top_low{high, low};
  CHECK(supergraph_statistic(ctx, top_low) == supergraph_statistic(ctx, top));
  CHECK(full == supergraph_statistic(ctx, top));
  CHECK(supergraph_statistic(ctx, all, true) >= full);
  CHECK_THROWS_AS(supergraph_statistic(ctx, std::vector<Edge>{}), Error);
}

TEST_CASE("exact truth with zero complement entries gives a zero statistic") {
  Matrix om = Matrix::Identity(3, 3);
  om(0, 1) = om(1, 0) = 0.4;
  const Matrix sigma = om.inverse();
  Graph g(3);
  g.add_edge(0, 1);
  for (const auto& e : g.complement_edges())
    CHECK(std::abs(score(sigma, om, e.j, e.k)) <= 1e-12);
}

TEST_CASE("bootstrap draw with constant multipliers") {
  const auto ctx = sample_context(5);
  const auto one = bootstrap_draw(ctx.summary, Vector::Ones(ctx.n()));
  REQUIRE_FALSE(one.degenerate);
  CHECK(one.tau_b == ctx.tau.tau);
  CHECK(one.un_omega_b == 2.0 * ctx.tau.un_omega);
  CHECK(one.sigma_b == ctx.sigma_hat);
  CHECK(bootstrap_draw(ctx.summary, Vector::Zero(ctx.n())).degenerate);
  CHECK_THROWS_AS(bootstrap_draw(ctx.summary, Vector::Ones(3)), Error);
}

TEST_CASE("bootstrap draw equals the double loop") {
  const auto data = oracle::random_dataset(6, 3, 19);
  const KernelSpec spec(KernelName::triangular, 0.7);
  const auto summary = pair_summary(data, spec, 0.45);
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    Vector xi(6);
    for (Index i = 0; i < 6; ++i) xi[i] = rng.normal();
    const auto got = bootstrap_draw(summary, xi);
    const auto want = oracle::bootstrap(data, spec, 0.45, xi);
    REQUIRE_FALSE(got.degenerate);
    CHECK((got.tau_b - want.tau_b).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(got.un_omega_b - want.un_omega_b) <=
          1e-12 * std::max(1.0, std::abs(want.un_omega_b)));
  }
}

TEST_CASE("u-statistic oracle sweep") {
  const auto r = check::ustat_oracles(100, 17);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("constant multipliers reproduce the observed statistic") {
  const auto r = check::constant_multiplier(23);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("bootstrap quantile") {
  std::vector<double> reps;
  for (int i = 1; i <= 100; ++i) reps.push_back(101 - i);
  CHECK(bootstrap_quantile(reps, 0.05) == 95.0);
  CHECK(bootstrap_quantile(reps, 0.5) == 50.0);
  CHECK(bootstrap_quantile(reps, 0.999) == 1.0);
  CHECK(bootstrap_quantile(std::vector<double>(7, 3.5), 0.1) == 3.5);
  const auto r = check::quantile_monotonicity(29);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("forced constant replicates set the critical value") {
  const auto ctx = sample_context(6);
  BootstrapOptions opt;
  opt.replicates = 100;
  opt.multipliers = [](Index, Index, std::span<double> xi) {
    std::fill(xi.begin(), xi.end(), 1.0);
  };
  opt.mode = BootstrapMode::literal;
  const auto r = supergraph_test(ctx, Graph(4), 0.05, opt);
  CHECK(r.threshold == r.replicates.front());
  CHECK(r.reject == (r.statistic > r.threshold));
  CHECK(r.degenerate_replicates == 0);
}

TEST_CASE("degenerate multipliers exhaust the redraw allowance") {
  const auto ctx = sample_context(7);
  BootstrapOptions opt;
  opt.replicates = 100;
  opt.multipliers = [](Index, Index, std::span<double> xi) {
    std::fill(xi.begin(), xi.end(), 0.0);
  };
  CHECK(code_of([&] { supergraph_test(ctx, Graph(4), 0.05, opt); }) ==
        ErrorCode::degenerate_bootstrap);
}

TEST_CASE("occasional degenerate draws are redrawn and counted") {
  const auto ctx = sample_context(8);
  BootstrapOptions opt;
  opt.replicates = 100;
  opt.multipliers = [](Index b, Index attempt, std::span<double> xi) {
    Rng rng = Rng::stream(99, {static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(attempt)});
    for (auto& v : xi) v = (b % 20 == 0 && attempt == 0) ? 0.0 : rng.normal();
  };
  const auto r = supergraph_test(ctx, Graph(4), 0.05, opt);
  CHECK(r.degenerate_replicates == 5);
  CHECK(r.replicates.size() == 100);
}

TEST_CASE("bootstrap tests are deterministic in the seed") {
  const auto ctx = sample_context(9);
  BootstrapOptions opt;
  opt.replicates = 200;
  opt.seed = 314;
  for (auto mode : {BootstrapMode::literal, BootstrapMode::linearized}) {
    opt.mode = mode;
    const auto a = supergraph_test(ctx, Graph(4), 0.05, opt);
    const auto b = supergraph_test(ctx, Graph(4), 0.05, opt);
    CHECK(a.replicates == b.replicates);
    CHECK(a.threshold == b.threshold);
  }
  auto other = opt;
  other.seed = 315;
  CHECK(supergraph_test(ctx, Graph(4), 0.05, opt).replicates !=
        supergraph_test(ctx, Graph(4), 0.05, other).replicates);
}

TEST_CASE("uniform test reductions") {
  const auto data = oracle::random_dataset(200, 4, 10);
  const KernelSpec spec(KernelName::epanechnikov, 0.35);
  ClimeConfig cc;
  cc.lambda = 0.1;
  Graph g(4);
  g.add_edge(0, 1);
  BootstrapOptions opt;
  opt.replicates = 200;
  opt.seed = 5;

  const auto single = path_contexts(data, spec, EvalGrid::singleton(0.4), cc);
  const auto uni = uniform_test(single, g, 0.05, opt);
  const auto sup = supergraph_test(single.front(), g, 0.05, opt);
  CHECK(uni.kind == TestKind::uniform);
  CHECK(sup.kind == TestKind::supergraph);
  CHECK(uni.statistic == sup.statistic);
  CHECK(uni.threshold == sup.threshold);
  CHECK(uni.reject == sup.reject);
  CHECK(uniform_statistic(single, g.complement_edges()) ==
        supergraph_statistic(single.front(), g.complement_edges()));

  const auto coarse = path_contexts(data, spec, EvalGrid::evenly(0.3, 0.7, 3), cc);
  auto fine = coarse;
  for (auto& c : path_contexts(data, spec, EvalGrid::evenly(0.35, 0.65, 4), cc))
    fine.push_back(std::move(c));
  const auto comp = g.complement_edges();
  for (bool two : {false, true})
    CHECK(uniform_statistic(fine, comp, two) >= uniform_statistic(coarse, comp, two));

  // Explicit enumeration over (z, j, k).
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : coarse)
    for (const auto& e : comp)
      best = std::max(best, c.tau.un_omega *
                                oracle::score(c.sigma_hat, c.omega_hat, e.j, e.k));
  CHECK(uniform_statistic(coarse, comp) ==
        doctest::Approx(std::sqrt(200.0 * 0.35) * best).epsilon(1e-12));

  std::vector<Matrix> omegas;
  for (const auto& c : coarse) omegas.push_back(c.omega_hat);
  const auto via_data =
      uniform_test(data, spec, EvalGrid::evenly(0.3, 0.7, 3), omegas, g, 0.05, opt);
  CHECK(via_data.statistic == uniform_test(coarse, g, 0.05, opt).statistic);
}

TEST_CASE("graph test input errors") {
  const auto ctx = sample_context(11);
  BootstrapOptions opt;
  opt.replicates = 100;
  CHECK(code_of([&] { supergraph_test(ctx, Graph::complete(4), 0.05, opt); }) ==
        ErrorCode::empty_complement);
  CHECK(code_of([&] { supergraph_test(ctx, Graph(5), 0.05, opt); }) == ErrorCode::dimension);
  CHECK(code_of([&] { supergraph_test(ctx, Graph(4), 1.5, opt); }) == ErrorCode::domain);
}

TEST_CASE("rank invariance of every statistic") {
  const auto r = check::rank_invariance(41);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("test report json") {
  const auto ctx = sample_context(12);
  BootstrapOptions opt;
  opt.replicates = 100;
  opt.seed = 77;
  const auto j = to_json(supergraph_test(ctx, Graph(4), 0.05, opt));
  for (const char* key : {"kind", "statistic", "threshold", "alpha", "reject", "p_value",
                          "n_replicates", "degenerate_replicates", "seed"})
    CHECK(j.contains(key));
  CHECK(j["n_replicates"] == 100);
  CHECK(j["seed"] == 77);
  CHECK(j["kind"] == "supergraph");

  const auto e = to_json(edge_test(ctx, 0, 1, 0.05));
  CHECK(e.contains("variance"));
  CHECK(e["kind"] == "edge");
}

TEST_CASE("bootstrap mode names") {
  for (auto m : {BootstrapMode::literal, BootstrapMode::linearized})
    CHECK(parse_bootstrap_mode(to_string(m)) == m);
  CHECK_FALSE(parse_bootstrap_mode("exact"));
}
