#include "tvnpn/simgen.hpp"

#include "tvnpn/error.hpp"
#include "tvnpn/normal.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace tvnpn {

std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::gaussian: return "gaussian";
    case Scheme::gaussian_copula: return "gaussian_copula";
    case Scheme::contaminated_2pct: return "contaminated_2pct";
    case Scheme::contaminated_5pct: return "contaminated_5pct";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view s) noexcept {
  for (auto v : {Scheme::gaussian, Scheme::gaussian_copula, Scheme::contaminated_2pct,
                 Scheme::contaminated_5pct})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

double contamination_fraction(Scheme s) noexcept {
  switch (s) {
    case Scheme::contaminated_2pct: return 0.02;
    case Scheme::contaminated_5pct: return 0.05;
    default: return 0.0;
  }
}

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::invalid_argument, "sim: " + msg); };
  if (d < 2) fail("d must be at least 2");
  if (n < 2) fail("n must be at least 2");
  if (knn_k < 0 || knn_k % 2 != 0 || knn_k >= d) fail("knn_k must be even and below d");
  const Index scaffold = d * knn_k / 2;
  if (e < 0 || e > scaffold)
    fail("e = " + std::to_string(e) + " exceeds the " + std::to_string(scaffold) +
         " scaffold edges");
  if (churn < 0 || churn > e) fail("churn must lie in [0, e]");
  if (!(mu_min > 0.0 && mu_min <= mu_max && mu_max <= 0.9))
    fail("need 0 < mu_min <= mu_max <= 0.9");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (!(anchors[i] > 0.0 && anchors[i] < 1.0)) fail("anchors must lie in (0,1)");
    if (i > 0 && !(anchors[i] > anchors[i - 1])) fail("anchors must increase");
  }
  if (!(contamination_variance >= 0.0)) fail("contamination variance must be nonnegative");
  if (fixed_edge && !std::isfinite(*fixed_edge)) fail("fixed edge value must be finite");
}

Graph knn_graph(Index d, Index k) {
  if (k < 0 || k % 2 != 0 || k >= d)
    throw Error(ErrorCode::invalid_argument, "knn_graph: need even k < d, got k = " +
                                                 std::to_string(k) + ", d = " + std::to_string(d));
  Graph g(d);
  for (Index i = 0; i < d; ++i)
    for (Index t = 1; t <= k / 2; ++t) g.add_edge(i, (i + t) % d);
  return g;
}

namespace {

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::vector<Edge> pick(std::vector<Edge> pool, Index count, Rng& rng) {
  shuffle(pool, rng);
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

}  // namespace

std::vector<Graph> anchor_graphs(const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  const Graph scaffold = knn_graph(cfg.d, cfg.knn_k);
  const std::vector<Edge> all(scaffold.edges().begin(), scaffold.edges().end());

  std::vector<Graph> out;
  Graph g(cfg.d);
  for (const auto& e : pick(all, cfg.e, rng)) g.add_edge(e.j, e.k);
  out.push_back(g);

  for (std::size_t l = 0; l < cfg.anchors.size(); ++l) {
    const Graph& prev = out.back();
    std::vector<Edge> fresh;
    for (const auto& e : all)
      if (!prev.has_edge(e.j, e.k)) fresh.push_back(e);
    if (static_cast<Index>(fresh.size()) < cfg.churn)
      throw Error(ErrorCode::scaffold_exhausted,
                  "sim: only " + std::to_string(fresh.size()) + " scaffold edges are free at anchor " +
                      std::to_string(l + 1) + ", need " + std::to_string(cfg.churn));
    Graph next = prev;
    const std::vector<Edge> current(prev.edges().begin(), prev.edges().end());
    for (const auto& e : pick(current, cfg.churn, rng)) next.remove_edge(e.j, e.k);
    for (const auto& e : pick(fresh, cfg.churn, rng)) next.add_edge(e.j, e.k);
    out.push_back(std::move(next));
  }
  return out;
}

TruthPath::TruthPath(std::vector<Graph> graphs, std::vector<double> graph_breaks,
                     std::vector<double> knots, std::vector<Matrix> knot_omegas)
    : graphs_(std::move(graphs)),
      breaks_(std::move(graph_breaks)),
      knots_(std::move(knots)),
      knot_omegas_(std::move(knot_omegas)) {
  if (graphs_.empty() || graphs_.size() != breaks_.size() + 1)
    throw Error(ErrorCode::dimension, "truth path: need one more graph than breaks");
  if (knots_.size() < 2 || knots_.size() != knot_omegas_.size())
    throw Error(ErrorCode::dimension, "truth path: need one omega per knot");
}

const Graph& TruthPath::graph_of(double z) const {
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), z);
  return graphs_[static_cast<std::size_t>(it - breaks_.begin())];
}

Matrix TruthPath::interpolate(double z) const {
  if (z <= knots_.front()) return knot_omegas_.front();
  if (z >= knots_.back()) return knot_omegas_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), z);
  const auto hi = static_cast<std::size_t>(it - knots_.begin());
  const auto lo = hi - 1;
  const double t = (z - knots_[lo]) / (knots_[hi] - knots_[lo]);
  return (1.0 - t) * knot_omegas_[lo] + t * knot_omegas_[hi];
}

Matrix TruthPath::omega_of(double z) const {
  Matrix om = interpolate(z);
  const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(om, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .minCoeff();
  om.diagonal().array() += 1.0 - lmin;
  return om;
}

SymMatrix TruthPath::sigma_of(double z) const {
  const Matrix om = omega_of(z);
  Matrix s = om.llt().solve(Matrix::Identity(om.rows(), om.cols()));
  const Vector inv_sd = s.diagonal().cwiseSqrt().cwiseInverse();
  s = inv_sd.asDiagonal() * s * inv_sd.asDiagonal();
  s = 0.5 * (s + s.transpose());
  s.diagonal().setOnes();
  return s;
}

Matrix TruthPath::precision_of(double z) const {
  const Matrix om = omega_of(z);
  const Vector var = om.llt().solve(Matrix::Identity(om.rows(), om.cols())).diagonal();
  const Vector sd = var.cwiseSqrt();
  return sd.asDiagonal() * om * sd.asDiagonal();
}

Graph TruthPath::support(double z) const { return Graph::from_support(interpolate(z), 0.0); }

TruthPath truth_path(const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  const Index d = cfg.d;
  std::vector<Graph> graphs;
  if (cfg.identity_truth) {
    graphs.assign(cfg.anchors.size() + 1, Graph(d));
  } else {
    graphs = anchor_graphs(cfg, rng);
  }

  std::vector<double> bounds{0.0};
  bounds.insert(bounds.end(), cfg.anchors.begin(), cfg.anchors.end());
  bounds.push_back(1.0);

  auto draw = [&](const std::vector<const Graph*>& need) {
    Matrix om = Matrix::Identity(d, d);
    if (cfg.identity_truth) return om;
    for (const auto& e : need.front()->edges()) {
      bool all = true;
      for (const Graph* g : need) all = all && g->has_edge(e.j, e.k);
      if (!all) continue;
      const double v = rng.uniform(cfg.mu_min, cfg.mu_max);
      om(e.j, e.k) = om(e.k, e.j) = v;
    }
    return om;
  };

  std::vector<double> knots;
  std::vector<Matrix> omegas;
  const std::size_t intervals = graphs.size();
  for (std::size_t l = 0; l <= intervals; ++l) {
    knots.push_back(bounds[l]);
    if (l == 0) {
      omegas.push_back(draw({&graphs.front()}));
    } else if (l == intervals) {
      omegas.push_back(draw({&graphs.back()}));
    } else {
      omegas.push_back(draw({&graphs[l - 1], &graphs[l]}));
    }
    if (l < intervals) {
      knots.push_back(0.5 * (bounds[l] + bounds[l + 1]));
      omegas.push_back(draw({&graphs[l]}));
    }
  }

  if (cfg.fixed_edge) {
    for (auto& om : omegas) om(0, 1) = om(1, 0) = *cfg.fixed_edge;
  }
  return TruthPath(std::move(graphs), cfg.anchors, std::move(knots), std::move(omegas));
}

Dataset sample_dataset(const TruthPath& truth, const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  const Index n = cfg.n;
  const Index d = cfg.d;
  if (truth.d() != d) throw Error(ErrorCode::dimension, "sim: truth and config disagree on d");

  Vector z(n);
  Matrix x(n, d);
  Vector g(d);
  for (Index i = 0; i < n; ++i) {
    double zi = 0.0;
    while (zi <= 0.0) zi = rng.uniform();
    z[i] = zi;
    const Eigen::LLT<Matrix> llt(truth.sigma_of(zi));
    for (Index j = 0; j < d; ++j) g[j] = rng.normal();
    x.row(i) = (llt.matrixL() * g).transpose();
  }

  if (cfg.scheme == Scheme::gaussian_copula) {
    x = x.unaryExpr([](double v) { return std_normal_cdf(v); });
  }

  const double frac = contamination_fraction(cfg.scheme);
  if (frac > 0.0) {
    const auto cells = static_cast<std::size_t>(n * d);
    const auto count = static_cast<std::size_t>(std::llround(frac * static_cast<double>(cells)));
    std::vector<std::size_t> idx(cells);
    for (std::size_t c = 0; c < cells; ++c) idx[c] = c;
    // Partial Fisher-Yates: the first `count` slots are a uniform sample.
    for (std::size_t c = 0; c < count; ++c) std::swap(idx[c], idx[c + rng.below(cells - c)]);
    const double sd = std::sqrt(cfg.contamination_variance);
    for (std::size_t c = 0; c < count; ++c) {
      const auto cell = idx[c];
      const double sign = rng.coin() ? 1.0 : -1.0;
      x(static_cast<Index>(cell) / d, static_cast<Index>(cell) % d) = sign * (3.0 + sd * rng.normal());
    }
  }
  return Dataset(std::move(x), std::move(z));
}

Simulation simulate(const SimConfig& cfg) {
  auto truth_rng = Rng::stream(cfg.seed, {1});
  auto data_rng = Rng::stream(cfg.seed, {2});
  auto truth = truth_path(cfg, truth_rng);
  auto data = sample_dataset(truth, cfg, data_rng);
  return {std::move(truth), std::move(data)};
}

RocPoint edge_rates(const Graph& estimate, const Graph& truth) {
  if (estimate.d() != truth.d()) throw Error(ErrorCode::dimension, "roc: graphs differ in d");
  if (truth.size() == 0) throw Error(ErrorCode::empty_truth, "roc: true edge set is empty");
  const Index d = truth.d();
  const auto total = static_cast<double>(d * (d - 1) / 2);
  std::size_t hit = 0;
  for (const auto& e : estimate.edges()) hit += truth.has_edge(e.j, e.k);
  const auto pos = static_cast<double>(truth.size());
  RocPoint p;
  p.tpr = static_cast<double>(hit) / pos;
  p.fpr = total > pos ? static_cast<double>(estimate.size() - hit) / (total - pos) : 0.0;
  return p;
}

std::vector<RocPoint> roc_points(
    std::span<const std::vector<std::pair<double, Graph>>> per_lambda, const TruthPath& truth) {
  std::vector<RocPoint> out;
  out.reserve(per_lambda.size());
  for (const auto& estimates : per_lambda) {
    if (estimates.empty()) throw Error(ErrorCode::invalid_argument, "roc: no evaluation points");
    RocPoint acc;
    for (const auto& [z, g] : estimates) {
      const auto r = edge_rates(g, truth.support(z));
      acc.fpr += r.fpr;
      acc.tpr += r.tpr;
    }
    const auto m = static_cast<double>(estimates.size());
    acc.fpr /= m;
    acc.tpr /= m;
    out.push_back(acc);
  }
  std::stable_sort(out.begin(), out.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.fpr < b.fpr || (a.fpr == b.fpr && a.tpr < b.tpr);
  });
  return out;
}

}  // namespace tvnpn
