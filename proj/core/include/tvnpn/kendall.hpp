#pragma once

// Kernel-smoothed Kendall's tau at an index value z0 and its sine transform.
//
// With omega(i,i') = K_h(Z_i - z0) K_h(Z_i' - z0) the estimator is
//
//   tau_jk(z0) = sum_{i != i'} omega(i,i') sgn(X_ij - X_i'j) sgn(X_ik - X_i'k)
//               / sum_{i != i'} omega(i,i')
//
// PairSummary keeps the per-sample row sums of both numerator and
// denominator. Those row sums are all the jackknife variance and the
// multiplier bootstrap need, so pair loops are paid for once per z0.

#include "tvnpn/datamodel.hpp"

#include <optional>
#include <utility>
#include <string>
#include <vector>

namespace tvnpn {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Position of (j,k), j <= k, in the packed upper triangle of a d x d matrix.
constexpr Index packed_index(Index j, Index k, Index d) noexcept {
  if (j > k) std::swap(j, k);
  return j * d - j * (j - 1) / 2 + (k - j);
}
constexpr Index packed_size(Index d) noexcept { return d * (d + 1) / 2; }

struct PairSummary {
  double z0 = 0.0;
  double h = 0.0;
  Index n = 0;  ///< sample size of the dataset (not of the window)
  Index d = 0;

  /// Dataset rows with K_h(Z_i - z0) > 0, in ascending z (ties by row).
  std::vector<Index> window;
  /// w_row[r] = sum_{i' != i} omega(i, i') for i = window[r].
  Vector w_row;
  /// s_row(r, packed(j,k)) = sum_{i' != i} omega(i,i') sgn_j sgn_k for i = window[r].
  RowMatrix s_row;
  double w_total = 0.0;
  /// Sum of s_row over rows, unpacked to a symmetric d x d matrix.
  SymMatrix s_total;

  Index window_size() const noexcept { return static_cast<Index>(window.size()); }
  /// Row sum for dataset row i (zero outside the window).
  double w_row_of(Index sample) const;
  double s_row_of(Index sample, Index j, Index k) const;
};

/// Samples sorted by z, reused across many evaluation points.
class ZOrder {
 public:
  explicit ZOrder(const Dataset& data);
  /// Rows with |Z_i - z0| <= h, ascending z.
  std::vector<Index> candidates(double z0, double h) const;

 private:
  std::vector<Index> order_;
  std::vector<double> sorted_z_;
};

PairSummary pair_summary(const Dataset& data, const KernelSpec& spec, double z0);
PairSummary pair_summary(const Dataset& data, const KernelSpec& spec, double z0,
                         const ZOrder& order);

struct TauEstimate {
  double z0 = 0.0;
  double h = 0.0;
  SymMatrix tau;
  /// U_n[omega] = w_total / (n (n - 1)).
  double un_omega = 0.0;
};

TauEstimate kendall_tau(const PairSummary& summary);

/// sin(pi/2 * tau) elementwise with unit diagonal.
SymMatrix latent_correlation(const SymMatrix& tau);
SymMatrix latent_correlation(const TauEstimate& tau);

struct PathPoint {
  double z = 0.0;
  std::optional<SymMatrix> sigma;  ///< empty when the window was degenerate
  double un_omega = 0.0;
  std::string error;

  bool degenerate() const noexcept { return !sigma.has_value(); }
};

std::vector<PathPoint> correlation_path(const Dataset& data, const KernelSpec& spec,
                                        const EvalGrid& grid);

}  // namespace tvnpn
