#pragma once

#include <string>

#include "mlhp/config.hpp"

namespace mlhp {

// exit codes reported by the CLI
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitGateFailure = 4;
inline constexpr int kExitNumeric = 5;

/// Run one command ("equilibrium", "szego-fixed-point", "hp-solve",
/// "verify", "biorthogonal", "all") against the configuration, emitting
/// deterministic CSV artifacts into config.out_dir. Every numeric gate is
/// printed; the exit code is kExitOk iff all gates pass.
int run_command(const RunConfig& config, const std::string& command);

}  // namespace mlhp
