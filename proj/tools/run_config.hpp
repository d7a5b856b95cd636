#pragma once

// Resolved settings for one tvnpn invocation.

#include "tvnpn/clime.hpp"
#include "tvnpn/datamodel.hpp"
#include "tvnpn/inference.hpp"
#include "tvnpn/simgen.hpp"
#include "tvnpn/studies.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace tvnpn::cli {

enum class Command { estimate, test_edge, test_graph, test_uniform, simulate, roc_study, power_study };
std::string_view to_string(Command c) noexcept;

enum class StudyTest { edge, supergraph, uniform };
std::string_view to_string(StudyTest t) noexcept;

/// "estimate" and "test" select the c n^{-1/5} rules; a number fixes h.
struct BandwidthRule {
  enum class Kind { estimate, test, value } kind = Kind::test;
  double value = 0.0;
};

/// "paper" is 0.2 (h^2 + sqrt(log(d/h)/(nh))); "paper:C" swaps the 0.2 for C;
/// a number fixes lambda.
struct LambdaRule {
  bool fixed = false;
  double value = kLambdaConstant;
};

struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t m = 100;
  bool interior = true;  ///< i / (m + 1) instead of evenly over [lo, hi]

  EvalGrid make() const;
};

struct RunConfig {
  Command command = Command::estimate;
  std::filesystem::path input;
  std::filesystem::path output = ".";

  KernelName kernel = KernelName::epanechnikov;
  BandwidthRule h_rule;
  LambdaRule lambda_rule;
  double gamma = 0.5;
  ClimeMethod method = ClimeMethod::calibrated_clime;
  std::vector<RocMethod> roc_methods{RocMethod::kendall_clime, RocMethod::pearson_clime};
  double alpha = 0.05;
  Index bootstrap = 1000;
  BootstrapMode bootstrap_mode = BootstrapMode::linearized;
  bool two_sided = true;
  GridSpec grid;
  double z0 = 0.5;
  std::uint64_t seed = 0;

  std::optional<std::filesystem::path> graph_path;
  std::optional<Index> knn_hypothesis;
  std::pair<Index, Index> edge{0, 1};  ///< 0-based

  StudyTest study_test = StudyTest::edge;
  Index reps = 200;
  SimConfig sim;
  double lambda_lo = 0.005;
  double lambda_hi = 2.0;
  std::size_t lambda_count = 30;
  Index eval_points = 10;
  double target_fpr = 0.2;

  /// Throws Error(invalid_argument) when a field required by the command is
  /// missing or out of range.
  void validate() const;
  TuningConfig tuning() const;
  nlohmann::json to_json() const;
};

BandwidthRule parse_h_rule(const std::string& text);
LambdaRule parse_lambda_rule(const std::string& text);
/// "lo:hi:m" evenly spaced with endpoints, or "interior:m".
GridSpec parse_grid(const std::string& text);
/// "lo:hi:count"; `flag` names the option in error messages.
std::tuple<double, double, std::size_t> parse_path(const std::string& text,
                                                   const std::string& flag);
/// "j,k" 1-based on input, 0-based on output.
std::pair<Index, Index> parse_edge(const std::string& text);
/// "lo:hi"
std::pair<double, double> parse_range(const std::string& text);

}  // namespace tvnpn::cli
