#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mols/identify.hpp"
#include "mols/solvers.hpp"
#include "mols/types.hpp"

namespace mols {

/// Hard ceilings for exact enumeration: column count and total subset count.
inline constexpr int kMaxEnumColumns = 32;
inline constexpr std::uint64_t kMaxEnumSupports = 10'000'000;

/// Exact isometry constants delta_s for s = 1..max_order, each with the
/// support attaining the extreme deviation and that support's Gram
/// eigenvalue range. delta_0 is 0 by convention, and past the column count
/// the constant stops growing (no support can exceed n columns), so
/// requests for order > n resolve to delta_n when it was enumerated.
struct RipReport {
  int columns = 0;
  std::vector<int> orders;
  std::vector<double> delta;
  std::vector<std::vector<int>> witness_support;
  std::vector<std::pair<double, double>> eigen_extremes;  // (lmin, lmax)

  bool has(int order) const;
  /// Throws MissingOrderError for orders the report does not cover.
  double at(int order) const;
};

/// Number of supports a brute-force run would enumerate.
std::uint64_t rip_support_count(int n, int max_order);

/// Exact delta_s by enumerating every size-s support and taking symmetric
/// eigenvalue extremes of the Gram submatrix. Enumeration is partitioned
/// over workers with a deterministic merge (largest delta, then
/// lexicographically smallest witness). Throws EnumerationTooLargeError
/// beyond the ceilings above.
RipReport rip_bruteforce(const SensingMatrix& matrix, int max_order,
                         int threads = 1);

/// One evaluated inequality. `applicable` records whether the statement's
/// preconditions held; `satisfied` is only meaningful when it did.
/// Non-strict checks allow a 1e-9 relative slack; strict thresholds do not.
struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  bool applicable = false;
};

BoundCheck make_check(std::string name, double lhs, double rhs,
                      bool applicable, bool strict = false);

/// Sufficient-recovery threshold on the isometry constant:
/// sqrt(L)/(sqrt(K) + 2 sqrt(L)) for width L > 1, 1/(sqrt(K) + 2) for L = 1.
double recovery_threshold(int sparsity, int width);

/// Evaluates the strict recovery condition for the applicable width branch.
/// `delta_lk` is delta_{LK} (used when L > 1), `delta_k1` is delta_{K+1}.
BoundCheck recovery_condition(int sparsity, int width, double delta_lk,
                              double delta_k1);

/// Per-iteration residual decay factor
///   alpha(k, L) = 1 - L (1 - d_{Lk} - d_{Lk+1}^2)(1 - d_{K+Lk})^2
///                     / (K (1 + d_L)(1 - d_{Lk})(1 + d_{K+Lk})).
double decay_factor(int k, int sparsity, int width, const RipReport& rip);

/// Checks |r^{k+1}|^2 <= alpha(k, L)^{k+1} |y|^2 along a trace. A check is
/// applicable when alpha's denominators are positive and alpha is in (0, 1).
std::vector<BoundCheck> residual_decay_check(const RecoveryResult& result,
                                             const RipReport& rip,
                                             int sparsity, int width,
                                             double y_norm);

/// State of one iteration used by the probe bound checks.
struct ProbeContext {
  int iteration = 0;       // k: probes look at r^k / T^k
  int overlap = 0;         // |T ∩ T^k|
  double missing_energy = 0.0;  // |x restricted to T \ T^k|
  double noise_norm = 0.0;      // |v| (0 in the noiseless model)
};

/// Lower bound on u1 and upper bound on vL, in the noiseless or the noisy
/// form. Uses exact constants from `rip`.
std::vector<BoundCheck> iteration_bound_check(const IterationProbes& probes,
                                              const ProbeContext& context,
                                              const RipReport& rip,
                                              int sparsity, int width,
                                              bool noisy);

/// Noisy-model guarantees for a finished run: the distortion bound after an
/// epsilon stop, the SNR support-selection condition, and the distortion
/// bound after K iterations (support containment reported as its own check).
std::vector<BoundCheck> noisy_guarantee_check(const RecoveryResult& result,
                                              const ProblemInstance& instance,
                                              const RipReport& rip,
                                              int sparsity, int width,
                                              double epsilon);

/// Replays a trace, evaluating at every iteration state with missing true
/// indices the probe bounds plus the success implication "u1 > vL forces a
/// true index into this iteration's selection".
std::vector<BoundCheck> probe_checks_for_trace(const ProblemInstance& instance,
                                               const RecoveryResult& result,
                                               const RipReport& rip,
                                               int sparsity, int width);

/// Largest isometry order any checker above may request for a K, L run.
int max_rip_order(int sparsity, int width);

/// CSV with header name,applicable,satisfied,lhs,rhs plus provenance line.
std::string bound_checks_csv(const std::vector<BoundCheck>& checks,
                             std::uint64_t seed, std::uint64_t spec_hash);

/// Deterministic low-isometry-constant fixture: a 2^log2n x 2^log2n scaled
/// Hadamard matrix with `drop_rows` leading rows removed and columns
/// renormalized. For one dropped row, delta_s = (s-1)/(2^log2n - 1) exactly.
SensingMatrix hadamard_frame(int log2n, int drop_rows);

}  // namespace mols
