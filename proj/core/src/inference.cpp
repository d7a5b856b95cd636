#include "tvnpn/inference.hpp"

#include "tvnpn/error.hpp"
#include "tvnpn/normal.hpp"
#include "tvnpn/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>

namespace tvnpn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// sum_{b != j} a(j,b) omega(b,k): the quadratic form with entry j of column k
// skipped rather than zeroed, so the value cannot depend on omega(j,k).
double quad_skip(const Matrix& a, const Matrix& omega, Index j, Index k) {
  double acc = 0.0;
  for (Index b = 0; b < omega.rows(); ++b)
    if (b != j) acc += a(j, b) * omega(b, k);
  return acc;
}

// Every observed and bootstrap score goes through this one routine.
double score_from_product(const Matrix& omega_t_sigma, const Matrix& omega, Index j, Index k) {
  return quad_skip(omega_t_sigma, omega, j, k) - omega(k, j);
}

void check_pair(Index d, Index j, Index k) {
  if (j < 0 || k < 0 || j >= d || k >= d || j == k)
    throw Error(ErrorCode::invalid_argument, "inference: need distinct vertices in range");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorCode::domain, "inference: alpha must lie in (0,1)");
}

double clamp_tau(double t) {
  if (std::abs(t) > 1.0 && std::abs(t) <= 1.0 + 1e-12) return std::copysign(1.0, t);
  return t;
}

double sqrt_nh(const ScoreContext& ctx) {
  return std::sqrt(static_cast<double>(ctx.n()) * ctx.h());
}

// Per-context data reused by every bootstrap replicate.
struct Prepared {
  const ScoreContext* ctx = nullptr;
  Matrix sigma_dot;  ///< (pi/2) cos(pi/2 tau-hat)
  double n_pairs = 0.0;
};

Prepared prepare(const ScoreContext& ctx) {
  Prepared p;
  p.ctx = &ctx;
  p.sigma_dot = ((ctx.tau.tau.array() * (std::numbers::pi / 2.0)).cos() * (std::numbers::pi / 2.0))
                    .matrix();
  const auto n = static_cast<double>(ctx.n());
  p.n_pairs = n * (n - 1.0);
  return p;
}

struct Weighted {
  double den_scaled = 0.0;
  Vector num_scaled;  ///< packed
  double xi_ref = 0.0;
  double abs_den = 0.0;
};

// Row-sum sums divided by the largest-magnitude window multiplier. A constant
// multiplier then reproduces w_total and s_total bit for bit.
Weighted weigh(const PairSummary& s, const double* xi) {
  Weighted w;
  const Index m = s.window_size();
  for (Index r = 0; r < m; ++r) {
    const double v = xi[s.window[static_cast<std::size_t>(r)]];
    if (std::abs(v) > std::abs(w.xi_ref)) w.xi_ref = v;
  }
  w.num_scaled = Vector::Zero(s.s_row.cols());
  if (w.xi_ref == 0.0) return w;
  for (Index r = 0; r < m; ++r) {
    const double ratio = xi[s.window[static_cast<std::size_t>(r)]] / w.xi_ref;
    w.den_scaled += ratio * s.w_row[r];
    w.abs_den += std::abs(ratio) * s.w_row[r];
    w.num_scaled += ratio * s.s_row.row(r).transpose();
  }
  return w;
}

bool is_degenerate(const Weighted& w) {
  return w.xi_ref == 0.0 || std::abs(w.den_scaled) <= 1e-12 * w.abs_den;
}

SymMatrix unpack(const Vector& packed, Index d) {
  SymMatrix out(d, d);
  for (Index j = 0, idx = 0; j < d; ++j)
    for (Index k = j; k < d; ++k, ++idx) out(j, k) = out(k, j) = packed[idx];
  return out;
}

double max_over_pairs(const Matrix& a, const Matrix& omega, double scale,
                      std::span<const Edge> complement, bool two_sided, bool with_identity) {
  double best = kNegInf;
  for (const auto& e : complement) {
    double v = with_identity ? score_from_product(a, omega, e.j, e.k) : quad_skip(a, omega, e.j, e.k);
    if (two_sided) v = std::abs(v);
    best = std::max(best, scale * v);
  }
  return best;
}

// Max over this context's complement of the replicate for multiplier xi, or
// nullopt when the draw is degenerate.
std::optional<double> replicate_max(const Prepared& p, const double* xi,
                                    std::span<const Edge> complement, BootstrapMode mode,
                                    bool two_sided) {
  const auto& ctx = *p.ctx;
  const auto& s = ctx.summary;
  const Index d = ctx.d();
  const Weighted w = weigh(s, xi);
  if (is_degenerate(w)) return std::nullopt;

  if (mode == BootstrapMode::literal) {
    Vector tau_packed = w.num_scaled / w.den_scaled;
    for (Index q = 0; q < tau_packed.size(); ++q) tau_packed[q] = clamp_tau(tau_packed[q]);
    const SymMatrix sigma_b = latent_correlation(unpack(tau_packed, d));
    const double un_omega_b = 2.0 * w.xi_ref * w.den_scaled / p.n_pairs;
    const Matrix a = ctx.omega_hat.transpose() * sigma_b;
    return max_over_pairs(a, ctx.omega_hat, un_omega_b, complement, two_sided, true);
  }

  // U^B (tau^B - tau-hat) = 2 xi_ref (num_scaled - tau-hat den_scaled) / (n(n-1)).
  const double scale = 2.0 * w.xi_ref / p.n_pairs;
  Matrix delta(d, d);
  for (Index j = 0, idx = 0; j < d; ++j) {
    for (Index k = j; k < d; ++k, ++idx) {
      const double l = scale * (w.num_scaled[idx] - ctx.tau.tau(j, k) * w.den_scaled);
      delta(j, k) = delta(k, j) = p.sigma_dot(j, k) * l;
    }
  }
  const Matrix a = ctx.omega_hat.transpose() * delta;
  return max_over_pairs(a, ctx.omega_hat, 1.0, complement, two_sided, false);
}

void validate_path(std::span<const ScoreContext> path) {
  if (path.empty()) throw Error(ErrorCode::invalid_argument, "inference: empty evaluation grid");
  const auto& first = path.front();
  for (const auto& c : path) {
    if (c.n() != first.n() || c.d() != first.d() || c.h() != first.h())
      throw Error(ErrorCode::dimension, "inference: contexts disagree on n, d or h");
    if (c.omega_hat.rows() != c.d() || c.omega_hat.cols() != c.d())
      throw Error(ErrorCode::dimension, "inference: omega-hat has the wrong shape");
  }
}

std::vector<Edge> checked_complement(const Graph& graph, Index d) {
  if (graph.d() != d)
    throw Error(ErrorCode::dimension, "inference: graph has " + std::to_string(graph.d()) +
                                          " vertices, data has " + std::to_string(d));
  auto comp = graph.complement_edges();
  if (comp.empty())
    throw Error(ErrorCode::empty_complement, "inference: hypothesized graph is complete");
  return comp;
}

TestReport run_bootstrap(TestKind kind, std::span<const ScoreContext> path,
                         std::span<const Edge> complement, double observed, double alpha,
                         const BootstrapOptions& opt) {
  check_alpha(alpha);
  if (opt.replicates < 1)
    throw Error(ErrorCode::invalid_argument, "bootstrap: need at least one replicate");

  std::vector<Prepared> prepared;
  prepared.reserve(path.size());
  for (const auto& c : path) prepared.push_back(prepare(c));

  const Index n = path.front().n();
  const Index budget = opt.replicates / 10;
  const double root = sqrt_nh(path.front());
  std::vector<double> reps(static_cast<std::size_t>(opt.replicates));
  std::atomic<Index> degenerate{0};

#pragma omp parallel for schedule(dynamic)
  for (Index b = 0; b < opt.replicates; ++b) {
    std::vector<double> xi(static_cast<std::size_t>(n));
    double value = std::numeric_limits<double>::quiet_NaN();
    for (Index attempt = 0; degenerate.load() <= budget; ++attempt) {
      if (opt.multipliers) {
        opt.multipliers(b, attempt, xi);
      } else {
        auto rng = Rng::stream(opt.seed, {static_cast<std::uint64_t>(b),
                                          static_cast<std::uint64_t>(attempt)});
        for (auto& v : xi) v = rng.normal();
      }
      double best = kNegInf;
      bool ok = true;
      for (const auto& p : prepared) {
        const auto r = replicate_max(p, xi.data(), complement, opt.mode, opt.two_sided);
        if (!r) {
          ok = false;
          break;
        }
        best = std::max(best, *r);
      }
      if (ok) {
        value = root * best;
        break;
      }
      ++degenerate;
    }
    reps[static_cast<std::size_t>(b)] = value;
  }

  TestReport rep;
  rep.kind = kind;
  rep.alpha = alpha;
  rep.seed = opt.seed;
  rep.degenerate_replicates = degenerate.load();
  if (rep.degenerate_replicates > budget)
    throw Error(ErrorCode::degenerate_bootstrap,
                "bootstrap: " + std::to_string(rep.degenerate_replicates) +
                    " degenerate multiplier draws exceed the allowance of " +
                    std::to_string(budget));
  rep.statistic = observed;
  rep.threshold = bootstrap_quantile(reps, alpha);
  rep.reject = observed > rep.threshold;
  const auto exceed = std::count_if(reps.begin(), reps.end(), [&](double v) { return v >= observed; });
  rep.p_value = static_cast<double>(exceed) / static_cast<double>(reps.size());
  rep.replicates = std::move(reps);
  return rep;
}

}  // namespace

ScoreContext make_score_context(PairSummary summary, Matrix omega_hat) {
  if (omega_hat.rows() != summary.d || omega_hat.cols() != summary.d)
    throw Error(ErrorCode::dimension, "inference: omega-hat must be d x d");
  ScoreContext ctx;
  ctx.z0 = summary.z0;
  ctx.tau = kendall_tau(summary);
  ctx.sigma_hat = latent_correlation(ctx.tau);
  ctx.summary = std::move(summary);
  ctx.omega_hat = std::move(omega_hat);
  return ctx;
}

ScoreContext make_score_context(const Dataset& data, const KernelSpec& spec, double z0,
                                const ClimeConfig& config) {
  auto summary = pair_summary(data, spec, z0);
  const auto tau = kendall_tau(summary);
  auto est = inverse_correlation(latent_correlation(tau), config, z0);
  return make_score_context(std::move(summary), std::move(est.omega));
}

double score(const SymMatrix& sigma, const Matrix& omega, Index j, Index k) {
  const Index d = sigma.rows();
  if (sigma.cols() != d || omega.rows() != d || omega.cols() != d)
    throw Error(ErrorCode::dimension, "score: sigma and omega must be d x d");
  check_pair(d, j, k);
  const Matrix a = omega.transpose() * sigma;
  return score_from_product(a, omega, j, k);
}

double score(const ScoreContext& ctx, Index j, Index k) {
  return score(ctx.sigma_hat, ctx.omega_hat, j, k);
}

double jackknife_variance(const ScoreContext& ctx, Index j, Index k) {
  const Index d = ctx.d();
  check_pair(d, j, k);
  const auto& s = ctx.summary;
  const auto& om = ctx.omega_hat;
  const auto& tau = ctx.tau.tau;

  // Omega_j' Theta Omega_k over a symmetric Theta, folded onto the packed
  // upper triangle: coef(a,b) = pi cos(pi/2 tau_ab) (w_aj w_bk + w_bj w_ak).
  const Index p = packed_size(d);
  Vector coef(p);
  Vector tau_p(p);
  for (Index a = 0, idx = 0; a < d; ++a) {
    for (Index b = a; b < d; ++b, ++idx) {
      const double pair = a == b ? om(a, j) * om(a, k) : om(a, j) * om(b, k) + om(b, j) * om(a, k);
      coef[idx] = std::numbers::pi * std::cos(std::numbers::pi / 2.0 * tau(a, b)) * pair;
      tau_p[idx] = tau(a, b);
    }
  }

  const auto n = static_cast<double>(s.n);
  const double q_scale = std::sqrt(s.h) / (n - 1.0);
  const double ct = coef.dot(tau_p);
  double acc = 0.0;
  for (Index r = 0; r < s.window_size(); ++r) {
    const double v = q_scale * (s.s_row.row(r).dot(coef) - ct * s.w_row[r]);
    acc += v * v;
  }
  const double u = ctx.tau.un_omega;
  return acc / n / (u * u);
}

std::string_view to_string(TestKind k) noexcept {
  switch (k) {
    case TestKind::edge: return "edge";
    case TestKind::supergraph: return "supergraph";
    case TestKind::uniform: return "uniform";
  }
  return "unknown";
}

std::string_view to_string(BootstrapMode m) noexcept {
  return m == BootstrapMode::literal ? "literal" : "linearized";
}

std::optional<BootstrapMode> parse_bootstrap_mode(std::string_view s) noexcept {
  if (s == "literal") return BootstrapMode::literal;
  if (s == "linearized") return BootstrapMode::linearized;
  return std::nullopt;
}

nlohmann::json to_json(const TestReport& r) {
  nlohmann::json j;
  j["kind"] = to_string(r.kind);
  j["statistic"] = r.statistic;
  j["threshold"] = r.threshold;
  j["alpha"] = r.alpha;
  j["reject"] = r.reject;
  j["p_value"] = r.p_value ? nlohmann::json(*r.p_value) : nlohmann::json(nullptr);
  if (r.variance) j["variance"] = *r.variance;
  if (r.signed_statistic) j["signed_statistic"] = *r.signed_statistic;
  j["n_replicates"] = r.replicates.size();
  j["degenerate_replicates"] = r.degenerate_replicates;
  j["seed"] = r.seed;
  return j;
}

TestReport edge_decision(double statistic, double alpha) {
  check_alpha(alpha);
  TestReport r;
  r.kind = TestKind::edge;
  r.alpha = alpha;
  r.statistic = statistic;
  r.threshold = std_normal_quantile(1.0 - alpha / 2.0);
  r.reject = statistic > r.threshold;
  r.p_value = std::erfc(statistic / std::numbers::sqrt2);
  return r;
}

TestReport edge_test(const ScoreContext& ctx, Index j, Index k, double alpha) {
  check_alpha(alpha);
  const double s = score(ctx, j, k);
  const double var = jackknife_variance(ctx, j, k);
  if (!(var > 0.0) || !std::isfinite(var))
    throw Error(ErrorCode::zero_variance, "edge test: jackknife variance is " + format_double(var) +
                                              " for pair (" + std::to_string(j + 1) + "," +
                                              std::to_string(k + 1) + ")");
  const double t = sqrt_nh(ctx) * s / std::sqrt(var);
  auto r = edge_decision(std::abs(t), alpha);
  r.variance = var;
  r.signed_statistic = t;
  return r;
}

double supergraph_statistic(const ScoreContext& ctx, std::span<const Edge> complement,
                            bool two_sided) {
  const ScoreContext* one = &ctx;
  return uniform_statistic(std::span<const ScoreContext>(one, 1), complement, two_sided);
}

BootstrapDraw bootstrap_draw(const PairSummary& summary, const Vector& xi) {
  if (xi.size() != summary.n)
    throw Error(ErrorCode::dimension, "bootstrap: multiplier length must equal n");
  const Weighted w = weigh(summary, xi.data());
  BootstrapDraw out;
  out.xi = xi;
  out.degenerate = is_degenerate(w);
  const auto n = static_cast<double>(summary.n);
  out.un_omega_b = 2.0 * w.xi_ref * w.den_scaled / (n * (n - 1.0));
  if (out.degenerate) return out;
  Vector tau_packed = w.num_scaled / w.den_scaled;
  for (Index q = 0; q < tau_packed.size(); ++q) tau_packed[q] = clamp_tau(tau_packed[q]);
  out.tau_b = unpack(tau_packed, summary.d);
  out.sigma_b = latent_correlation(out.tau_b);
  return out;
}

double bootstrap_quantile(std::vector<double> replicates, double alpha) {
  if (replicates.empty()) throw Error(ErrorCode::invalid_argument, "bootstrap: no replicates");
  check_alpha(alpha);
  std::sort(replicates.begin(), replicates.end());
  const auto b = static_cast<double>(replicates.size());
  auto idx = static_cast<Index>(std::ceil((1.0 - alpha) * b - 1e-9));
  idx = std::clamp<Index>(idx, 1, static_cast<Index>(replicates.size()));
  return replicates[static_cast<std::size_t>(idx - 1)];
}

TestReport supergraph_test(const ScoreContext& ctx, const Graph& graph, double alpha,
                           const BootstrapOptions& options) {
  const ScoreContext* one = &ctx;
  auto r = uniform_test(std::span<const ScoreContext>(one, 1), graph, alpha, options);
  r.kind = TestKind::supergraph;
  return r;
}

TestReport supergraph_test(const Dataset& data, const KernelSpec& spec, double z0,
                           const Matrix& omega_hat, const Graph& graph, double alpha,
                           const BootstrapOptions& options) {
  const auto ctx = make_score_context(pair_summary(data, spec, z0), omega_hat);
  return supergraph_test(ctx, graph, alpha, options);
}

double uniform_statistic(std::span<const ScoreContext> path, std::span<const Edge> complement,
                         bool two_sided) {
  validate_path(path);
  if (complement.empty())
    throw Error(ErrorCode::empty_complement, "inference: no pairs to test");
  double best = kNegInf;
  for (const auto& ctx : path) {
    const Matrix a = ctx.omega_hat.transpose() * ctx.sigma_hat;
    best = std::max(best, max_over_pairs(a, ctx.omega_hat, ctx.tau.un_omega, complement,
                                         two_sided, true));
  }
  return sqrt_nh(path.front()) * best;
}

TestReport uniform_test(std::span<const ScoreContext> path, const Graph& graph, double alpha,
                        const BootstrapOptions& options) {
  validate_path(path);
  const auto comp = checked_complement(graph, path.front().d());
  const double observed = uniform_statistic(path, comp, options.two_sided);
  return run_bootstrap(TestKind::uniform, path, comp, observed, alpha, options);
}

TestReport uniform_test(const Dataset& data, const KernelSpec& spec, const EvalGrid& grid,
                        std::span<const Matrix> omega_path, const Graph& graph, double alpha,
                        const BootstrapOptions& options) {
  if (omega_path.size() != grid.size())
    throw Error(ErrorCode::dimension, "uniform test: need one omega-hat per grid point");
  const ZOrder order(data);
  std::vector<ScoreContext> path;
  path.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    path.push_back(make_score_context(pair_summary(data, spec, grid.points()[i], order),
                                      omega_path[i]));
  return uniform_test(path, graph, alpha, options);
}

std::vector<ScoreContext> path_contexts(const Dataset& data, const KernelSpec& spec,
                                        const EvalGrid& grid, const ClimeConfig& config) {
  const ZOrder order(data);
  std::vector<ScoreContext> path;
  path.reserve(grid.size());
  for (double z : grid.points()) {
    auto summary = pair_summary(data, spec, z, order);
    const auto tau = kendall_tau(summary);
    auto est = inverse_correlation(latent_correlation(tau), config, z);
    path.push_back(make_score_context(std::move(summary), std::move(est.omega)));
  }
  return path;
}

}  // namespace tvnpn
