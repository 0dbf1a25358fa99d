#include "mols/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mols/errors.hpp"
#include "mols/identify.hpp"
#include "mols/linalg.hpp"

namespace mols {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::residual_below_epsilon:
      return "residual_below_epsilon";
    case Termination::reached_iteration_cap:
      return "reached_iteration_cap";
    case Termination::exhausted_candidates:
      return "exhausted_candidates";
    case Termination::rank_deficient:
      return "rank_deficient";
  }
  return "unknown";
}

double default_epsilon(const Eigen::VectorXd& y) { return 1e-6 * y.norm(); }

namespace {

void validate(const ProblemInstance& instance, const AlgorithmParams& p) {
  const int m = instance.matrix.rows();
  const int n = instance.matrix.cols();
  if (instance.y.size() != m)
    throw std::invalid_argument("solver: y length != matrix rows");
  if (p.sparsity < 1 || p.sparsity > m || p.sparsity > n)
    throw std::invalid_argument("solver: need 1 <= K <= min(m, n)");
  if (p.width < 1 || p.width > p.sparsity)
    throw std::invalid_argument("solver: need 1 <= L <= K");
  if (p.epsilon < 0.0) throw std::invalid_argument("solver: epsilon < 0");
}

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Assembles the output: prune to the K largest-magnitude coefficients
// (lowest index on magnitude ties), refit on that support, pad when the run
// ended with fewer than K columns.
void finalize(RecoveryResult& result, const ProblemInstance& instance,
              const IncrementalBasis& basis, const Eigen::VectorXd& coeffs,
              int sparsity) {
  const int n = instance.matrix.cols();
  const int held = basis.size();

  std::vector<int> order(held);
  for (int i = 0; i < held; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(coeffs[a]), mb = std::abs(coeffs[b]);
    if (ma != mb) return ma > mb;
    return basis.cols[a] < basis.cols[b];
  });

  std::vector<std::pair<int, double>> kept;
  if (held > sparsity) {
    std::vector<int> pruned;
    for (int i = 0; i < sparsity; ++i) pruned.push_back(basis.cols[order[i]]);
    std::sort(pruned.begin(), pruned.end());
    auto [refit, residual] = ls_on_support(instance.matrix, instance.y, pruned);
    (void)residual;
    for (std::size_t i = 0; i < pruned.size(); ++i)
      kept.emplace_back(pruned[i], refit[i]);
  } else {
    for (int i = 0; i < held; ++i) kept.emplace_back(basis.cols[i], coeffs[i]);
    std::sort(kept.begin(), kept.end());
    // Degenerate runs pad with unused zero-coefficient indices.
    std::vector<char> used(n, 0);
    for (auto& [idx, value] : kept) used[idx] = 1;
    for (int j = 0; j < n && static_cast<int>(kept.size()) < sparsity; ++j)
      if (!used[j]) kept.emplace_back(j, 0.0);
    std::sort(kept.begin(), kept.end());
  }

  result.support.clear();
  result.estimate.n = n;
  result.estimate.support.clear();
  result.estimate.values.resize(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    result.support.push_back(kept[i].first);
    result.estimate.support.push_back(kept[i].first);
    result.estimate.values[i] = kept[i].second;
  }
}

RecoveryResult greedy_loop(const ProblemInstance& instance,
                           const AlgorithmParams& params, bool ratio_rule) {
  validate(instance, params);
  const int sparsity = params.sparsity;
  const int width = ratio_rule ? params.width : 1;
  const int cap = params.max_iterations > 0
                      ? std::min(params.max_iterations, sparsity)
                      : sparsity;
  const Eigen::VectorXd& y = instance.y;
  const double y_norm = y.norm();

  RecoveryResult result;
  IncrementalBasis basis = make_empty_basis(instance.matrix.rows());
  ProjectedNormTracker tracker(instance.matrix);
  Eigen::VectorXd residual = y;
  Eigen::VectorXd coeffs(0);
  int k = 0;
  bool flagged = false;

  while (((residual.norm() >= params.epsilon && k < cap) ||
          width * k < sparsity) &&
         k < cap) {
    SelectionOutcome picked;
    try {
      if (ratio_rule) {
        picked = select_fast(instance.matrix, residual, basis, tracker, width);
      } else {
        // Plain correlation rule; projected norms do not enter.
        const Eigen::VectorXd corr =
            instance.matrix.entries.transpose() * residual;
        int best = -1;
        double best_mag = -1.0;
        std::vector<char> taken(instance.matrix.cols(), 0);
        for (int j : basis.cols) taken[j] = 1;
        for (int i = 0; i < corr.size(); ++i) {
          if (taken[i]) continue;
          const double mag = std::abs(corr[i]);
          if (mag > best_mag) {
            best_mag = mag;
            best = i;
          }
        }
        if (best < 0) throw ExhaustedCandidatesError(1, 0);
        picked.chosen = {best};
      }
      const int before = basis.size();
      append_columns(basis, instance.matrix, picked.chosen);
      tracker.downdate(instance.matrix, basis, before);
    } catch (const ExhaustedCandidatesError&) {
      result.termination = Termination::exhausted_candidates;
      flagged = true;
      break;
    } catch (const RankDeficiencyError&) {
      result.termination = Termination::rank_deficient;
      flagged = true;
      break;
    }
    coeffs = solve_coefficients(basis, y);
    residual = residual_against(basis, y);
    ++k;

    IterationRecord record;
    record.selected = sorted(picked.chosen);
    record.support = sorted(basis.cols);
    record.residual_norm = residual.norm();
    result.trace.push_back(std::move(record));

    if (y_norm > 0.0) {
      double worst = 0.0;
      for (int j : basis.cols)
        worst = std::max(
            worst, std::abs(instance.matrix.entries.col(j).dot(residual)));
      result.max_support_residual_dot =
          std::max(result.max_support_residual_dot, worst / y_norm);
    }
  }

  result.iterations = k;
  if (!flagged) {
    result.termination = residual.norm() < params.epsilon
                             ? Termination::residual_below_epsilon
                             : Termination::reached_iteration_cap;
  }
  finalize(result, instance, basis, coeffs, sparsity);
  return result;
}

}  // namespace

RecoveryResult run_mols(const ProblemInstance& instance,
                        const AlgorithmParams& params) {
  return greedy_loop(instance, params, /*ratio_rule=*/true);
}

RecoveryResult run_ols(const ProblemInstance& instance,
                       const AlgorithmParams& params) {
  AlgorithmParams p = params;
  p.width = 1;
  return greedy_loop(instance, p, /*ratio_rule=*/true);
}

RecoveryResult run_omp(const ProblemInstance& instance,
                       const AlgorithmParams& params) {
  AlgorithmParams p = params;
  p.width = 1;
  return greedy_loop(instance, p, /*ratio_rule=*/false);
}

}  // namespace mols
