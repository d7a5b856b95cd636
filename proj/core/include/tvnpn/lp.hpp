#pragma once

// Dense two-phase tableau simplex for
//
//   minimize c'x  subject to  A x (<= | =) b,  x >= 0
//
// Bland's rule picks both entering and leaving variables, so degenerate
// problems (CLIME produces many) cannot cycle.

#include "tvnpn/datamodel.hpp"

#include <span>
#include <string_view>

namespace tvnpn {

enum class RowSense { less_equal, equal };
enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

std::string_view to_string(LpStatus s) noexcept;

struct LpOptions {
  double pivot_tol = 1e-7;
  double feasibility_tol = 1e-9;
  /// 0 selects 50 x (number of tableau columns).
  Index max_iterations = 0;
};

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vector x;
  double objective = 0.0;
  Index iterations = 0;
};

LpResult lp_solve(const Vector& c, const Matrix& a, const Vector& b, std::span<const RowSense> sense,
                  const LpOptions& options = {});

}  // namespace tvnpn
