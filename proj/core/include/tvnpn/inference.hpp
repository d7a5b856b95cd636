#pragma once

// Score-based tests for the inverse latent correlation Omega(z):
//
//   edge       H0: Omega_jk(z0) = 0
//   supergraph H0: G*(z0) is a subgraph of G
//   uniform    H0: G*(z) is a subgraph of G for every z on a grid
//
// All three use the score  S_jk = Omega_j' (Sigma Omega_{k\j} - e_k), where
// Omega_{k\j} is column k with entry j zeroed. The edge test studentizes it
// with a leave-one-out jackknife variance; the graph tests calibrate a max
// statistic with a Gaussian multiplier bootstrap for U-statistics.

#include "tvnpn/clime.hpp"
#include "tvnpn/datamodel.hpp"
#include "tvnpn/kendall.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tvnpn {

struct ScoreContext {
  double z0 = 0.0;
  PairSummary summary;
  TauEstimate tau;
  SymMatrix sigma_hat;
  Matrix omega_hat;  ///< unsymmetrized CLIME columns

  Index n() const noexcept { return summary.n; }
  Index d() const noexcept { return summary.d; }
  double h() const noexcept { return summary.h; }
};

ScoreContext make_score_context(PairSummary summary, Matrix omega_hat);
/// Estimates Sigma-hat at z0 and Omega-hat from it with the given CLIME config.
ScoreContext make_score_context(const Dataset& data, const KernelSpec& spec, double z0,
                                const ClimeConfig& config);

double score(const SymMatrix& sigma, const Matrix& omega, Index j, Index k);
double score(const ScoreContext& ctx, Index j, Index k);

/// Leave-one-out jackknife estimate of the score's asymptotic variance.
double jackknife_variance(const ScoreContext& ctx, Index j, Index k);

enum class TestKind { edge, supergraph, uniform };
std::string_view to_string(TestKind k) noexcept;

struct TestReport {
  TestKind kind = TestKind::edge;
  double statistic = 0.0;
  double threshold = 0.0;
  double alpha = 0.05;
  bool reject = false;
  std::optional<double> p_value;
  std::optional<double> variance;
  /// Edge test: sqrt(nh) * score / sigma-hat before taking |.|.
  std::optional<double> signed_statistic;
  std::vector<double> replicates;
  Index degenerate_replicates = 0;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const TestReport& report);

/// Decision of the two-sided level-alpha edge test for a given |statistic|.
TestReport edge_decision(double statistic, double alpha);
TestReport edge_test(const ScoreContext& ctx, Index j, Index k, double alpha);

/// sqrt(nh) * U_n[omega] * max over pairs of the score.
double supergraph_statistic(const ScoreContext& ctx, std::span<const Edge> complement,
                            bool two_sided = false);

struct BootstrapDraw {
  Vector xi;
  double un_omega_b = 0.0;
  SymMatrix tau_b;
  SymMatrix sigma_b;
  bool degenerate = false;
};

/// One multiplier draw: tau^B_jk = sum_{i != i'} w sgn sgn (xi_i + xi_i')
/// / sum_{i != i'} w (xi_i + xi_i'), evaluated through the row-sum identity
/// sum_{i != i'} a_ii' (xi_i + xi_i') = 2 sum_i xi_i rowsum_i.
BootstrapDraw bootstrap_draw(const PairSummary& summary, const Vector& xi);

enum class BootstrapMode {
  /// Replicates follow the ratio/sine/product formulas exactly as written.
  literal,
  /// Replicates use the first-order term of the literal replicate around
  /// tau-hat: Omega_j' (Sigma-dot o U^B (tau^B - tau-hat)) Omega_{k\j}.
  linearized,
};
std::string_view to_string(BootstrapMode m) noexcept;
std::optional<BootstrapMode> parse_bootstrap_mode(std::string_view s) noexcept;

/// Fills `xi` (length n) for replicate `replicate`, attempt `attempt`.
/// Must be safe to call concurrently.
using MultiplierSource =
    std::function<void(Index replicate, Index attempt, std::span<double> xi)>;

struct BootstrapOptions {
  Index replicates = 1000;
  std::uint64_t seed = 0;
  BootstrapMode mode = BootstrapMode::linearized;
  /// Max of |score| instead of the signed score. The score tracks -Omega_jk,
  /// so the signed form only detects negative entries.
  bool two_sided = true;
  /// Standard normal draws from (seed, replicate, attempt) when empty.
  MultiplierSource multipliers;
};

/// Order statistic ceil((1 - alpha) B) of the replicates (1-based).
double bootstrap_quantile(std::vector<double> replicates, double alpha);

TestReport supergraph_test(const ScoreContext& ctx, const Graph& graph, double alpha,
                           const BootstrapOptions& options);
TestReport supergraph_test(const Dataset& data, const KernelSpec& spec, double z0,
                           const Matrix& omega_hat, const Graph& graph, double alpha,
                           const BootstrapOptions& options);

double uniform_statistic(std::span<const ScoreContext> path, std::span<const Edge> complement,
                         bool two_sided = false);
TestReport uniform_test(std::span<const ScoreContext> path, const Graph& graph, double alpha,
                        const BootstrapOptions& options);
TestReport uniform_test(const Dataset& data, const KernelSpec& spec, const EvalGrid& grid,
                        std::span<const Matrix> omega_path, const Graph& graph, double alpha,
                        const BootstrapOptions& options);

/// Score contexts along a grid, Omega-hat estimated at every point.
std::vector<ScoreContext> path_contexts(const Dataset& data, const KernelSpec& spec,
                                        const EvalGrid& grid, const ClimeConfig& config);

}  // namespace tvnpn
