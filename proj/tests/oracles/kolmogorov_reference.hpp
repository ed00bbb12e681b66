#pragma once

// Frozen output of kolmogorov_mc (1e6 paths, 100 trapezoid steps, seed 20240611)
// for the second moments at t = 1 of dX = V dt, dV = sqrt(2) dW from the origin.
namespace kfp_oracle {

inline constexpr double kMcVarX = 0.6651474744;
inline constexpr double kMcCovXV = 0.9981526098;
inline constexpr double kMcVarV = 1.9978491586;
inline constexpr double kMcStandardErrorVarX = 9.41e-04;

}  // namespace kfp_oracle
