#pragma once

// Tuning rules and Monte-Carlo drivers for size, power and ROC studies.

#include "tvnpn/clime.hpp"
#include "tvnpn/datamodel.hpp"
#include "tvnpn/inference.hpp"
#include "tvnpn/simgen.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tvnpn {

inline constexpr double kEstimateBandwidthConstant = 0.35;
inline constexpr double kTestBandwidthConstant = 0.9;
inline constexpr double kLambdaConstant = 0.2;

/// c * n^{-1/5}
double bandwidth_rule(double c, Index n);
/// c * (h^2 + sqrt(log(d/h) / (n h)))
double lambda_rule(double c, double h, Index n, Index d);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(Index successes, Index trials, double z = 1.959963984540054);

/// Kolmogorov-Smirnov distance between the empirical law of `sample` and N(0,1).
double ks_distance_normal(std::vector<double> sample);

/// TPR at the given FPR on the piecewise-linear curve through (0,0), the
/// points and (1,1). Points sharing an FPR contribute their largest TPR.
double tpr_at_fpr(std::span<const RocPoint> curve, double fpr);

/// Log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

struct TuningConfig {
  KernelName kernel = KernelName::epanechnikov;
  double h_constant = kTestBandwidthConstant;
  std::optional<double> bandwidth;  ///< overrides the rule when set
  double lambda_constant = kLambdaConstant;
  std::optional<double> lambda;  ///< overrides the rule when set
  double gamma = 0.5;
  ClimeMethod method = ClimeMethod::calibrated_clime;
  Symmetrize symmetrize = Symmetrize::none;

  KernelSpec kernel_spec(Index n) const;
  ClimeConfig clime_config(Index n, Index d) const;
};

/// Tuning with the estimation bandwidth constant.
inline TuningConfig estimation_tuning() {
  TuningConfig t;
  t.h_constant = kEstimateBandwidthConstant;
  return t;
}

struct RateSummary {
  Index replicates = 0;
  Index rejections = 0;
  Index failures = 0;  ///< replicates whose test raised an error
  double rate = 0.0;
  Interval wilson;
  std::vector<std::string> failure_messages;
};

struct EdgeStudyConfig {
  SimConfig sim;
  TuningConfig tuning;
  double z0 = 0.5;
  Index j = 0;
  Index k = 1;
  double alpha = 0.05;
  Index reps = 200;
  std::uint64_t seed = 0;
};

struct EdgeStudyResult {
  RateSummary summary;
  /// sqrt(nh) * score / sigma-hat per completed replicate.
  std::vector<double> standardized;
};

EdgeStudyResult edge_power_study(const EdgeStudyConfig& cfg);

struct GraphStudyConfig {
  SimConfig sim;
  TuningConfig tuning;
  Graph hypothesis{2};
  /// Supergraph test at this point when set, otherwise the uniform test.
  std::optional<double> z0;
  Index grid_points = 20;
  double alpha = 0.05;
  Index reps = 100;
  Index bootstrap = 500;
  BootstrapMode mode = BootstrapMode::linearized;
  bool two_sided = true;
  std::uint64_t seed = 0;
};

RateSummary graph_power_study(const GraphStudyConfig& cfg);

enum class RocMethod { kendall_clime, pearson_clime };
std::string_view to_string(RocMethod m) noexcept;
std::optional<RocMethod> parse_roc_method(std::string_view s) noexcept;

struct RocStudyConfig {
  SimConfig sim;
  TuningConfig tuning = estimation_tuning();
  std::vector<double> lambdas = log_spaced(0.005, 2.0, 30);
  Index eval_points = 10;
  Index runs = 20;
  std::vector<RocMethod> methods{RocMethod::kendall_clime, RocMethod::pearson_clime};
  double target_fpr = 0.2;
  std::uint64_t seed = 0;
};

struct RocCurve {
  RocMethod method = RocMethod::kendall_clime;
  /// Per-lambda rates averaged over runs, in lambda order.
  std::vector<RocPoint> mean_points;
  /// TPR at the target FPR per run.
  std::vector<double> tpr_at_target;
  double mean_tpr_at_target = 0.0;
};

std::vector<RocCurve> roc_study(const RocStudyConfig& cfg);

}  // namespace tvnpn
