#pragma once

#include "run_config.hpp"

namespace tvnpn::cli {

/// Runs the command and writes its files under cfg.output. Errors propagate
/// as tvnpn::Error.
void run(const RunConfig& cfg);

}  // namespace tvnpn::cli
