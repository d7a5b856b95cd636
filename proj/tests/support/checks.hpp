#pragma once

// Randomized sweeps and property checks shared by the unit tests and the
// acceptance runner. Each returns a verdict plus a one-line summary.

#include <cstdint>
#include <string>

namespace tvnpn::check {

struct Result {
  bool ok = true;
  std::string detail;
};

/// Cached tau-hat, jackknife variance and multiplier draws against the
/// literal loops on `datasets` random datasets (n <= 20, d <= 4).
Result ustat_oracles(int datasets, std::uint64_t seed);

/// CLIME and calibrated CLIME against vertex enumeration on `matrices`
/// random correlation matrices (d <= 4), plus feasibility of every column.
Result lp_oracles(int matrices, std::uint64_t seed);

/// Statistics and decisions of all three tests unchanged when every column
/// of X goes through a strictly increasing map.
Result rank_invariance(std::uint64_t seed);

/// Constant multipliers reproduce tau-hat bit for bit and give replicates
/// equal to twice the observed statistic.
Result constant_multiplier(std::uint64_t seed);

/// Bootstrap critical value non-increasing in alpha.
Result quantile_monotonicity(std::uint64_t seed);

/// Positive definiteness, unit diagonals and support bounds of simulated
/// truth paths at `points` index values.
Result truth_path(std::uint64_t seed, int points);

/// Every kernel integrates to one and is even.
Result kernel_normalization();

}  // namespace tvnpn::check
