#pragma once

namespace kfp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitSolverFailure = 3;
inline constexpr int kExitInvariantViolation = 4;

/// Entry point of the kfp-lab command line; returns the process exit status.
int cli_main(int argc, char** argv);

}  // namespace kfp
