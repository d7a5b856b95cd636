#include "tvnpn/error.hpp"

namespace tvnpn {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::parse: return "parse";
    case ErrorCode::domain: return "domain";
    case ErrorCode::dimension: return "dimension";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::io: return "io";
    case ErrorCode::degenerate_window: return "degenerate_window";
    case ErrorCode::zero_weight: return "zero_weight";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::unbounded: return "unbounded";
    case ErrorCode::iteration_limit: return "iteration_limit";
    case ErrorCode::zero_variance: return "zero_variance";
    case ErrorCode::empty_complement: return "empty_complement";
    case ErrorCode::degenerate_bootstrap: return "degenerate_bootstrap";
    case ErrorCode::scaffold_exhausted: return "scaffold_exhausted";
    case ErrorCode::empty_truth: return "empty_truth";
    case ErrorCode::non_convergence: return "non_convergence";
  }
  return "unknown";
}

}  // namespace tvnpn
