#pragma once

#include <string>
#include <vector>

#include "mols/types.hpp"

namespace mols {

enum class Termination {
  residual_below_epsilon,
  reached_iteration_cap,
  exhausted_candidates,
  rank_deficient,
};

const char* to_string(Termination t);

struct IterationRecord {
  std::vector<int> selected;  // indices admitted this iteration
  std::vector<int> support;   // cumulative support after the iteration
  double residual_norm = 0.0;
};

/// Output contract shared by every solver: a support of exactly K indices
/// (padded with zero-coefficient indices when a run ends degenerate), the
/// least-squares estimate on that support, and the full per-iteration trace.
struct RecoveryResult {
  std::vector<int> support;
  SparseSignal estimate;
  int iterations = 0;
  std::vector<IterationRecord> trace;
  Termination termination = Termination::reached_iteration_cap;
  /// Diagnostic: max over iterations of |phi_j' r| / |y| for selected j.
  double max_support_residual_dot = 0.0;
};

/// Multiple orthogonal least squares. Each iteration admits `params.width`
/// new columns by the ratio rule, refits on the enlarged support, and
/// updates the residual; the loop runs while
/// (|r| >= epsilon and k < K) or width*k < K, capped at K iterations.
/// The final estimate keeps the K largest-magnitude coefficients and is
/// refit on that support. Candidate exhaustion and rank deficiency are
/// reported through `termination` with the partial trace retained.
RecoveryResult run_mols(const ProblemInstance& instance,
                        const AlgorithmParams& params);

/// MOLS with width 1.
RecoveryResult run_ols(const ProblemInstance& instance,
                       const AlgorithmParams& params);

/// Orthogonal matching pursuit: one index per iteration by largest
/// |<phi_i, r>|, lowest index on ties, K iterations.
RecoveryResult run_omp(const ProblemInstance& instance,
                       const AlgorithmParams& params);

/// Residual threshold used by the benchmark harness: 1e-6 * |y|.
double default_epsilon(const Eigen::VectorXd& y);

}  // namespace mols
