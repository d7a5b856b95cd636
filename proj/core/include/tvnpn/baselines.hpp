#pragma once

// Comparison estimators: kernel-weighted Pearson correlation and kernel
// neighbourhood selection by weighted lasso.

#include "tvnpn/datamodel.hpp"

#include <vector>

namespace tvnpn {

/// sum_i K_h(Z_i - z0) X_i X_i' / sum_i K_h(Z_i - z0). Data are used as is,
/// without centering or scaling.
SymMatrix kernel_pearson(const Dataset& data, const KernelSpec& spec, double z0);

struct LassoConfig {
  double lambda = 0.1;
  Index max_iter = 1000;
  double tol = 1e-7;

  void validate() const;
};

struct LassoFit {
  Vector beta;  ///< length d - 1, coefficients of the other variables in order
  Index sweeps = 0;
  double kkt_gap = 0.0;
  /// Objective after every full sweep.
  std::vector<double> objective_trace;
};

/// Cyclic coordinate descent for
///   (nh)^{-1} sum_i K((Z_i - z0)/h) (X_ij - X_{i,-j} b)^2 + lambda ||b||_1
/// run until every coordinate meets its subgradient condition within tol.
LassoFit kernel_neighborhood_fit(const Dataset& data, const KernelSpec& spec, double z0, Index j,
                                 const LassoConfig& cfg);
Vector kernel_neighborhood_column(const Dataset& data, const KernelSpec& spec, double z0, Index j,
                                  const LassoConfig& cfg);

/// Edge (j,k) when either regression selects the other variable.
Graph neighborhood_graph(const Dataset& data, const KernelSpec& spec, double z0,
                         const LassoConfig& cfg);

}  // namespace tvnpn
