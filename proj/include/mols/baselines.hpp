#pragma once

#include "mols/solvers.hpp"

namespace mols {

/// CoSaMP: per iteration merges the 2K strongest proxy indices into the
/// current support, solves LS on the merged set (at most 3K columns), prunes
/// back to K. Stops on |r| < epsilon, on a stalled residual (relative change
/// below 1e-6), or after 50 iterations. The returned estimate is the LS fit
/// on the pruned support.
RecoveryResult run_cosamp(const ProblemInstance& instance,
                          const AlgorithmParams& params);

/// Iteratively reweighted least squares for l1 minimization (p = 1) on an
/// underdetermined full-row-rank system. Weights (x_i^2 + eps^2)^(-1/2);
/// eps starts at 1 and divides by 10 once the iterate settles, floored at
/// 1e-8, at most 100 reweighting steps. The solution is pruned to the K
/// largest magnitudes and refit for parity with the greedy solvers. When
/// given, `surrogate_objective` receives sum_i sqrt(x_i^2 + eps^2) after
/// each step (non-increasing while the schedule runs).
RecoveryResult run_irls(const ProblemInstance& instance,
                        const AlgorithmParams& params,
                        std::vector<double>* surrogate_objective = nullptr);

/// Least squares on the true support; the distortion floor any recovery
/// method is compared against.
RecoveryResult run_oracle_ls(const ProblemInstance& instance);

}  // namespace mols
