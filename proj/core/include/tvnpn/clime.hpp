#pragma once

// Column-wise CLIME and calibrated CLIME, each column solved as a small LP.
//
//   CLIME:       min ||b||_1            s.t. ||S b - e_j||_inf <= lambda
//   calibrated:  min ||b||_1 + gamma k  s.t. ||S b - e_j||_inf <= lambda k,
//                                           ||b||_1 <= k
//
// b is split into nonnegative parts b+ - b-; calibrated CLIME carries k as
// one more nonnegative variable.

#include "tvnpn/datamodel.hpp"
#include "tvnpn/lp.hpp"

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace tvnpn {

enum class ClimeMethod { clime, calibrated_clime };
enum class Symmetrize { none, min_magnitude };

std::string_view to_string(ClimeMethod m) noexcept;
std::optional<ClimeMethod> parse_clime_method(std::string_view s) noexcept;
std::string_view to_string(Symmetrize s) noexcept;

struct ClimeConfig {
  double lambda = 0.1;
  double gamma = 0.5;
  ClimeMethod method = ClimeMethod::calibrated_clime;
  double feasibility_tol = 1e-8;
  Symmetrize symmetrize = Symmetrize::none;

  void validate() const;
};

struct ColumnSolution {
  Vector beta;
  double kappa = 0.0;      ///< calibrated CLIME only
  double objective = 0.0;  ///< ||beta||_1 (+ gamma kappa when calibrated)
  double residual = 0.0;   ///< ||S beta - e_j||_inf
  Index iterations = 0;
};

ColumnSolution clime_column(const SymMatrix& sigma, Index j, double lambda,
                            double feasibility_tol = 1e-8);
ColumnSolution calibrated_clime_column(const SymMatrix& sigma, Index j, double lambda,
                                       double gamma, double feasibility_tol = 1e-8);

struct InverseEstimate {
  double z0 = std::numeric_limits<double>::quiet_NaN();
  Matrix omega_raw;  ///< column j holds the solution for e_j
  Matrix omega;      ///< omega_raw after the configured symmetrization
  Vector kappa;
  Vector objective;
  ClimeConfig config;
};

InverseEstimate inverse_correlation(const SymMatrix& sigma, const ClimeConfig& config,
                                    double z0 = std::numeric_limits<double>::quiet_NaN());

/// Keep the entry of smaller magnitude from each (j,k)/(k,j) pair.
Matrix symmetrize_min_magnitude(const Matrix& omega);

/// Edge (j,k) when the symmetrized estimate has |entry| > tol.
Graph support_graph(const InverseEstimate& est, double tol = 1e-8);

}  // namespace tvnpn
