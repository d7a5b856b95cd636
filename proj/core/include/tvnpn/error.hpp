#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tvnpn {

enum class ErrorCode {
  parse,
  domain,
  dimension,
  invalid_argument,
  io,
  degenerate_window,
  zero_weight,
  infeasible,
  unbounded,
  iteration_limit,
  zero_variance,
  empty_complement,
  degenerate_bootstrap,
  scaffold_exhausted,
  empty_truth,
  non_convergence,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library-wide exception. The code lets callers (and the CLI exit status)
/// distinguish bad input from numerical failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tvnpn
