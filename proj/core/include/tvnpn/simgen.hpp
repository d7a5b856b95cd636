#pragma once

// Synthetic time-varying graphical models.
//
// A ring scaffold (every vertex joined to its k nearest ring neighbours)
// hosts a sequence of anchor graphs that change at the configured anchor
// points. Off-diagonal inverse-correlation values are drawn at knots (0, 1,
// the anchors and the midpoints between them), interpolated linearly in z,
// shifted to minimum eigenvalue one, inverted and scaled to a correlation
// matrix.

#include "tvnpn/datamodel.hpp"
#include "tvnpn/rng.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace tvnpn {

enum class Scheme { gaussian, gaussian_copula, contaminated_2pct, contaminated_5pct };

std::string_view to_string(Scheme s) noexcept;
std::optional<Scheme> parse_scheme(std::string_view s) noexcept;
/// Fraction of contaminated cells (0 for the uncontaminated schemes).
double contamination_fraction(Scheme s) noexcept;

struct SimConfig {
  Index d = 50;
  Index e = 25;
  Index knn_k = 4;
  std::vector<double> anchors{0.2, 0.4, 0.6, 0.8};
  Index churn = 10;
  double mu_min = 0.5;
  double mu_max = 0.9;
  Scheme scheme = Scheme::gaussian;
  Index n = 500;
  std::uint64_t seed = 0;
  /// Variance of the N(3, v) draw that replaces contaminated cells.
  double contamination_variance = 3.0;
  /// When set, Omega_12(z) is held at this value for every z.
  std::optional<double> fixed_edge;
  /// Omega(z) = I for every z; graphs are empty.
  bool identity_truth = false;

  void validate() const;
};

/// Vertex i joined to i +- 1, ..., i +- k/2 on the ring 0..d-1.
Graph knn_graph(Index d, Index k);

/// anchors.size() + 1 graphs, each with e scaffold edges; consecutive graphs
/// differ by churn removals and churn fresh additions.
std::vector<Graph> anchor_graphs(const SimConfig& cfg, Rng& rng);

class TruthPath {
 public:
  TruthPath(std::vector<Graph> graphs, std::vector<double> graph_breaks,
            std::vector<double> knots, std::vector<Matrix> knot_omegas);

  Index d() const noexcept { return graphs_.front().d(); }
  const std::vector<Graph>& anchor_graphs() const noexcept { return graphs_; }
  /// Knot locations and the off-diagonal values drawn there (before shifting).
  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<Matrix>& anchor_omegas() const noexcept { return knot_omegas_; }

  /// Anchor graph in force on the interval containing z.
  const Graph& graph_of(double z) const;
  /// Interpolated and shifted Omega(z); minimum eigenvalue one.
  Matrix omega_of(double z) const;
  /// Omega(z)^{-1} scaled to unit diagonal.
  SymMatrix sigma_of(double z) const;
  /// Inverse of sigma_of(z): the precision the data actually follow.
  Matrix precision_of(double z) const;
  /// Off-diagonal support of Omega(z).
  Graph support(double z) const;

 private:
  Matrix interpolate(double z) const;

  std::vector<Graph> graphs_;
  std::vector<double> breaks_;
  std::vector<double> knots_;
  std::vector<Matrix> knot_omegas_;
};

TruthPath truth_path(const SimConfig& cfg, Rng& rng);

Dataset sample_dataset(const TruthPath& truth, const SimConfig& cfg, Rng& rng);

struct Simulation {
  TruthPath truth;
  Dataset data;
};

/// Truth and data from independent streams of cfg.seed.
Simulation simulate(const SimConfig& cfg);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

/// TPR and FPR of one estimated graph against a true edge set.
RocPoint edge_rates(const Graph& estimate, const Graph& truth);

/// One curve point per entry of `per_lambda`, each averaging the rates over
/// its (z, estimated graph) pairs; sorted by FPR.
std::vector<RocPoint> roc_points(
    std::span<const std::vector<std::pair<double, Graph>>> per_lambda, const TruthPath& truth);

}  // namespace tvnpn
