#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mols/linalg.hpp"
#include "mols/types.hpp"

namespace mols {

/// Absolute gap under which the width-th and next score count as tied.
inline constexpr double kTieTol = 1e-12;

struct SelectionOutcome {
  std::vector<int> chosen;  // `width` distinct indices, none already selected
  Eigen::VectorXd scores;   // per column; NaN where a column is inadmissible
  bool tie_note = false;    // set when the cut between ranks L and L+1 is a tie
};

/// Ratio rule: picks the `width` candidates maximizing
/// |<phi_i, r>| / |P-perp phi_i|, ties broken toward the lowest index.
/// Columns in the basis or whose projected norm sits at the floor are
/// inadmissible. Throws ExhaustedCandidatesError if fewer than `width`
/// candidates remain.
SelectionOutcome select_fast(const SensingMatrix& matrix,
                             const Eigen::VectorXd& residual,
                             const IncrementalBasis& basis,
                             const ProjectedNormTracker& norms, int width);

/// Projection-minimization oracle: scores each candidate by the residual
/// power left after a one-column trial extension of the support's basis,
/// computed by explicit augmented projection. Slower than select_fast but an
/// independent route to the same set.
SelectionOutcome select_naive(const SensingMatrix& matrix,
                              const Eigen::VectorXd& y,
                              std::span<const int> current_support, int width);

struct IterationProbes {
  double u1;         // best ratio among still-missing true indices
  double vL;         // width-th best ratio among indices outside truth+support
  int missing_true;  // |T \ T^k|
};

/// Probe values for the success analysis of one iteration. Returns nothing
/// when every true index is already selected.
std::optional<IterationProbes> iteration_probes(
    const SensingMatrix& matrix, const Eigen::VectorXd& residual,
    const IncrementalBasis& basis, const ProjectedNormTracker& norms,
    const SparseSignal& truth, int width);

}  // namespace mols
