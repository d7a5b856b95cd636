#include "tvnpn/studies.hpp"

#include "tvnpn/baselines.hpp"
#include "tvnpn/error.hpp"
#include "tvnpn/kendall.hpp"
#include "tvnpn/normal.hpp"
#include "tvnpn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <string>

namespace tvnpn {

double bandwidth_rule(double c, Index n) {
  if (!(c > 0.0) || n < 1) throw Error(ErrorCode::invalid_argument, "bandwidth rule: need c > 0, n >= 1");
  return c * std::pow(static_cast<double>(n), -0.2);
}

double lambda_rule(double c, double h, Index n, Index d) {
  if (!(c > 0.0) || !(h > 0.0) || n < 1 || d < 1)
    throw Error(ErrorCode::invalid_argument, "lambda rule: need positive c, h, n, d");
  const double nh = static_cast<double>(n) * h;
  const double lg = std::log(static_cast<double>(d) / h);
  return c * (h * h + std::sqrt(std::max(lg, 0.0) / nh));
}

Interval wilson_interval(Index successes, Index trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const auto n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {successes == 0 ? 0.0 : std::max(0.0, centre - half),
          successes == trials ? 1.0 : std::min(1.0, centre + half)};
}

double ks_distance_normal(std::vector<double> sample) {
  if (sample.empty()) throw Error(ErrorCode::invalid_argument, "ks: empty sample");
  std::sort(sample.begin(), sample.end());
  const auto m = static_cast<double>(sample.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = std_normal_cdf(sample[i]);
    dist = std::max({dist, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return dist;
}

double tpr_at_fpr(std::span<const RocPoint> curve, double fpr) {
  std::vector<RocPoint> pts(curve.begin(), curve.end());
  pts.push_back({0.0, 0.0});
  pts.push_back({1.0, 1.0});
  std::sort(pts.begin(), pts.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.fpr < b.fpr || (a.fpr == b.fpr && a.tpr > b.tpr);
  });
  std::vector<RocPoint> env;
  for (const auto& p : pts)
    if (env.empty() || p.fpr > env.back().fpr) env.push_back(p);
  if (fpr <= env.front().fpr) return env.front().tpr;
  for (std::size_t i = 1; i < env.size(); ++i) {
    if (fpr <= env[i].fpr) {
      const auto& a = env[i - 1];
      const auto& b = env[i];
      const double t = (fpr - a.fpr) / (b.fpr - a.fpr);
      return a.tpr + t * (b.tpr - a.tpr);
    }
  }
  return env.back().tpr;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > lo) || count < 2)
    throw Error(ErrorCode::invalid_argument, "log_spaced: need 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(a + step * static_cast<double>(i));
  out.front() = lo;
  out.back() = hi;
  return out;
}

KernelSpec TuningConfig::kernel_spec(Index n) const {
  return KernelSpec(kernel, bandwidth ? *bandwidth : bandwidth_rule(h_constant, n));
}

ClimeConfig TuningConfig::clime_config(Index n, Index d) const {
  ClimeConfig c;
  c.lambda = lambda ? *lambda : lambda_rule(lambda_constant, kernel_spec(n).bandwidth, n, d);
  c.gamma = gamma;
  c.method = method;
  c.symmetrize = symmetrize;
  return c;
}

namespace {

void finish(RateSummary& s) {
  const Index done = s.replicates - s.failures;
  s.rate = done > 0 ? static_cast<double>(s.rejections) / static_cast<double>(done) : 0.0;
  s.wilson = wilson_interval(s.rejections, done);
}

SimConfig replicate_sim(const SimConfig& base, std::uint64_t seed, Index r) {
  SimConfig sim = base;
  sim.seed = derive_seed(seed, {static_cast<std::uint64_t>(r), 1});
  return sim;
}

}  // namespace

EdgeStudyResult edge_power_study(const EdgeStudyConfig& cfg) {
  cfg.sim.validate();
  const auto reps = static_cast<std::size_t>(std::max<Index>(cfg.reps, 0));
  std::vector<std::optional<TestReport>> reports(reps);
  std::vector<std::string> errors(reps);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < reps; ++r) {
    try {
      const auto sim = simulate(replicate_sim(cfg.sim, cfg.seed, static_cast<Index>(r)));
      const auto spec = cfg.tuning.kernel_spec(sim.data.n());
      const auto clime = cfg.tuning.clime_config(sim.data.n(), sim.data.d());
      const auto ctx = make_score_context(sim.data, spec, cfg.z0, clime);
      reports[r] = edge_test(ctx, cfg.j, cfg.k, cfg.alpha);
    } catch (const Error& e) {
      errors[r] = e.what();
    }
  }

  EdgeStudyResult out;
  out.summary.replicates = cfg.reps;
  for (std::size_t r = 0; r < reps; ++r) {
    if (!reports[r]) {
      ++out.summary.failures;
      out.summary.failure_messages.push_back("replicate " + std::to_string(r) + ": " + errors[r]);
      continue;
    }
    out.summary.rejections += reports[r]->reject;
    out.standardized.push_back(*reports[r]->signed_statistic);
  }
  finish(out.summary);
  return out;
}

RateSummary graph_power_study(const GraphStudyConfig& cfg) {
  cfg.sim.validate();
  if (cfg.hypothesis.d() != cfg.sim.d)
    throw Error(ErrorCode::dimension, "graph study: hypothesis graph does not match d");
  const EvalGrid grid = cfg.z0 ? EvalGrid::singleton(*cfg.z0)
                               : EvalGrid::interior(static_cast<std::size_t>(cfg.grid_points));
  const auto reps = static_cast<std::size_t>(std::max<Index>(cfg.reps, 0));
  std::vector<int> reject(reps, -1);
  std::vector<std::string> errors(reps);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < reps; ++r) {
    try {
      const auto sim = simulate(replicate_sim(cfg.sim, cfg.seed, static_cast<Index>(r)));
      const auto spec = cfg.tuning.kernel_spec(sim.data.n());
      const auto clime = cfg.tuning.clime_config(sim.data.n(), sim.data.d());
      const auto path = path_contexts(sim.data, spec, grid, clime);
      BootstrapOptions opt;
      opt.replicates = cfg.bootstrap;
      opt.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(r), 2});
      opt.mode = cfg.mode;
      opt.two_sided = cfg.two_sided;
      reject[r] = uniform_test(path, cfg.hypothesis, cfg.alpha, opt).reject ? 1 : 0;
    } catch (const Error& e) {
      errors[r] = e.what();
    }
  }

  RateSummary out;
  out.replicates = cfg.reps;
  for (std::size_t r = 0; r < reps; ++r) {
    if (reject[r] < 0) {
      ++out.failures;
      out.failure_messages.push_back("replicate " + std::to_string(r) + ": " + errors[r]);
      continue;
    }
    out.rejections += reject[r];
  }
  finish(out);
  return out;
}

std::string_view to_string(RocMethod m) noexcept {
  return m == RocMethod::kendall_clime ? "kendall-clime" : "pearson-clime";
}

std::optional<RocMethod> parse_roc_method(std::string_view s) noexcept {
  if (s == "kendall-clime") return RocMethod::kendall_clime;
  if (s == "pearson-clime") return RocMethod::pearson_clime;
  return std::nullopt;
}

std::vector<RocCurve> roc_study(const RocStudyConfig& cfg) {
  cfg.sim.validate();
  if (cfg.lambdas.empty() || cfg.runs < 1 || cfg.eval_points < 1)
    throw Error(ErrorCode::invalid_argument, "roc study: need lambdas, runs and evaluation points");

  const std::size_t nl = cfg.lambdas.size();
  std::vector<RocCurve> curves;
  for (auto m : cfg.methods) {
    RocCurve c;
    c.method = m;
    c.mean_points.assign(nl, RocPoint{});
    curves.push_back(std::move(c));
  }

  // per_run[run][method] holds that run's points in lambda order.
  const auto runs = static_cast<std::size_t>(cfg.runs);
  std::vector<std::vector<std::vector<RocPoint>>> per_run(runs);
  std::vector<std::exception_ptr> errors(runs);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t run = 0; run < runs; ++run) try {
    const auto sim = simulate(replicate_sim(cfg.sim, cfg.seed, static_cast<Index>(run)));
    const Index n = sim.data.n();
    const auto spec = cfg.tuning.kernel_spec(n);

    auto pick_rng = Rng::stream(cfg.seed, {static_cast<std::uint64_t>(run), 3});
    std::vector<Index> rows(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
    const auto m = static_cast<std::size_t>(std::min(cfg.eval_points, n));
    for (std::size_t i = 0; i < m; ++i)
      std::swap(rows[i], rows[i + pick_rng.below(rows.size() - i)]);
    std::vector<double> zs;
    for (std::size_t i = 0; i < m; ++i) zs.push_back(sim.data.z()[rows[i]]);

    const ZOrder order(sim.data);
    for (const auto& curve : curves) {
      std::vector<SymMatrix> sigmas;
      for (double z : zs) {
        sigmas.push_back(curve.method == RocMethod::kendall_clime
                             ? latent_correlation(kendall_tau(pair_summary(sim.data, spec, z, order)))
                             : kernel_pearson(sim.data, spec, z));
      }
      // roc_points sorts by FPR; keep the lambda order for the averaged curve.
      std::vector<RocPoint> points;
      for (std::size_t l = 0; l < nl; ++l) {
        ClimeConfig cc = cfg.tuning.clime_config(n, sim.data.d());
        cc.lambda = cfg.lambdas[l];
        std::vector<std::pair<double, Graph>> at_lambda;
        for (std::size_t i = 0; i < m; ++i)
          at_lambda.emplace_back(zs[i], support_graph(inverse_correlation(sigmas[i], cc, zs[i])));
        points.push_back(roc_points(std::span(&at_lambda, 1), sim.truth).front());
      }
      per_run[run].push_back(std::move(points));
    }
  } catch (...) {
    errors[run] = std::current_exception();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (std::size_t run = 0; run < runs; ++run) {
    for (std::size_t c = 0; c < curves.size(); ++c) {
      const auto& points = per_run[run][c];
      for (std::size_t l = 0; l < nl; ++l) {
        curves[c].mean_points[l].fpr += points[l].fpr / static_cast<double>(cfg.runs);
        curves[c].mean_points[l].tpr += points[l].tpr / static_cast<double>(cfg.runs);
      }
      curves[c].tpr_at_target.push_back(tpr_at_fpr(points, cfg.target_fpr));
    }
  }

  for (auto& c : curves) {
    double s = 0.0;
    for (double v : c.tpr_at_target) s += v;
    c.mean_tpr_at_target = s / static_cast<double>(c.tpr_at_target.size());
  }
  return curves;
}

}  // namespace tvnpn
