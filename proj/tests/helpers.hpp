#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "mols/linalg.hpp"
#include "mols/problem.hpp"
#include "mols/rng.hpp"
#include "mols/solvers.hpp"

namespace mols::testing {

struct InvariantReport {
  bool ok = true;
  std::string detail;
};

/// Solver-output invariants: support growth of exactly `width` per iteration,
/// non-increasing residual norms, disjoint selections, near-zero projection
/// of the residual onto the selected columns, and (for clean runs) the
/// estimate being its own least-squares refit.
inline InvariantReport check_result_invariants(const RecoveryResult& result,
                                               const ProblemInstance& instance,
                                               int sparsity, int width) {
  InvariantReport report;
  auto fail = [&](const std::string& why) {
    report.ok = false;
    if (!report.detail.empty()) report.detail += "; ";
    report.detail += why;
  };
  const double y_norm = instance.y.norm();
  const bool flagged =
      result.termination == Termination::exhausted_candidates ||
      result.termination == Termination::rank_deficient;

  std::set<int> seen;
  for (std::size_t k = 0; k < result.trace.size(); ++k) {
    const IterationRecord& rec = result.trace[k];
    if (static_cast<int>(rec.support.size()) !=
        width * static_cast<int>(k + 1))
      fail("support size != width*k at iteration " + std::to_string(k + 1));
    for (int idx : rec.selected) {
      if (seen.count(idx)) fail("index selected twice: " + std::to_string(idx));
      seen.insert(idx);
    }
    if (k > 0 && rec.residual_norm >
                     result.trace[k - 1].residual_norm + 1e-12 * (1 + y_norm))
      fail("residual norm increased at iteration " + std::to_string(k + 1));
  }
  if (result.max_support_residual_dot > 1e-10)
    fail("selected columns not orthogonal to residual");
  if (static_cast<int>(result.support.size()) != sparsity)
    fail("output support size != K");

  if (!flagged && !result.trace.empty()) {
    auto [coeffs, residual] =
        ls_on_support(instance.matrix, instance.y, result.support);
    (void)residual;
    const double drift = (coeffs - result.estimate.values).norm();
    if (drift > 1e-10 * (1.0 + coeffs.norm()))
      fail("estimate is not the LS fit on its support");
  }
  return report;
}

/// Random normalized instance for property sweeps.
inline ProblemInstance random_instance(int m, int n, int sparsity,
                                       std::uint64_t seed,
                                       SignalKind kind = SignalKind::gaussian) {
  SensingMatrix matrix =
      generate_gaussian_matrix(m, n, child_seed(seed, 0), true);
  SparseSignal truth =
      generate_sparse_signal(n, sparsity, kind, child_seed(seed, 1));
  return make_instance(std::move(matrix), std::move(truth));
}

/// Square matrix with orthonormal columns from a seeded QR.
inline SensingMatrix random_orthonormal(int n, std::uint64_t seed) {
  SensingMatrix gauss = generate_gaussian_matrix(n, n, seed, false);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss.entries);
  SensingMatrix out;
  out.entries = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  out.normalized = true;
  return out;
}

inline bool same_set(std::vector<int> a, std::vector<int> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace mols::testing
