#include "mols/baselines.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mols/errors.hpp"
#include "mols/linalg.hpp"

namespace mols {

namespace {

// Indices of the `count` largest |v[i]|, lowest index on ties, ascending.
std::vector<int> top_magnitudes(const Eigen::VectorXd& v, int count) {
  std::vector<int> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ma = std::abs(v[a]), mb = std::abs(v[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  order.resize(std::min<std::size_t>(order.size(), count));
  std::sort(order.begin(), order.end());
  return order;
}

RecoveryResult from_support(const ProblemInstance& instance,
                            std::vector<int> support, Termination termination,
                            std::vector<IterationRecord> trace,
                            int iterations) {
  auto [coeffs, residual] = ls_on_support(instance.matrix, instance.y, support);
  (void)residual;
  RecoveryResult result;
  result.support = support;
  result.estimate.n = instance.matrix.cols();
  result.estimate.support = std::move(support);
  result.estimate.values = coeffs;
  result.termination = termination;
  result.trace = std::move(trace);
  result.iterations = iterations;
  return result;
}

}  // namespace

RecoveryResult run_cosamp(const ProblemInstance& instance,
                          const AlgorithmParams& params) {
  const int m = instance.matrix.rows();
  const int n = instance.matrix.cols();
  const int sparsity = params.sparsity;
  if (sparsity < 1 || sparsity > m || sparsity > n)
    throw std::invalid_argument("cosamp: need 1 <= K <= min(m, n)");
  const int max_iter = params.max_iterations > 0 ? params.max_iterations : 50;
  const Eigen::VectorXd& y = instance.y;

  std::vector<int> support;  // current K-sparse support
  Eigen::VectorXd estimate_dense = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd residual = y;
  double prev_norm = residual.norm();
  std::vector<IterationRecord> trace;
  Termination termination = Termination::reached_iteration_cap;
  int k = 0;

  while (k < max_iter) {
    const Eigen::VectorXd proxy =
        instance.matrix.entries.transpose() * residual;
    std::vector<int> merged = top_magnitudes(proxy, 2 * sparsity);
    merged.insert(merged.end(), support.begin(), support.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    if (static_cast<int>(merged.size()) > m) {
      termination = Termination::rank_deficient;
      break;
    }
    Eigen::VectorXd coeffs;
    try {
      auto [c, r] = ls_on_support(instance.matrix, y, merged);
      coeffs = std::move(c);
      (void)r;
    } catch (const RankDeficiencyError&) {
      termination = Termination::rank_deficient;
      break;
    }
    Eigen::VectorXd dense = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < merged.size(); ++i)
      dense[merged[i]] = coeffs[i];
    support = top_magnitudes(dense, sparsity);
    estimate_dense.setZero();
    for (int idx : support) estimate_dense[idx] = dense[idx];
    residual = y - instance.matrix.entries * estimate_dense;
    ++k;

    IterationRecord record;
    record.selected = support;
    record.support = support;
    record.residual_norm = residual.norm();
    trace.push_back(std::move(record));

    if (residual.norm() < params.epsilon) {
      termination = Termination::residual_below_epsilon;
      break;
    }
    if (std::abs(prev_norm - residual.norm()) <= 1e-6 * std::max(prev_norm, 1e-300)) {
      break;  // stalled
    }
    prev_norm = residual.norm();
  }

  if (support.empty()) {
    // No iteration completed; fall back to the strongest correlations.
    support = top_magnitudes(instance.matrix.entries.transpose() * y, sparsity);
  }
  try {
    return from_support(instance, support, termination, std::move(trace), k);
  } catch (const RankDeficiencyError&) {
    RecoveryResult result;
    result.support = support;
    result.estimate.n = n;
    result.estimate.support = support;
    result.estimate.values = Eigen::VectorXd::Zero(support.size());
    result.termination = Termination::rank_deficient;
    result.iterations = k;
    return result;
  }
}

RecoveryResult run_irls(const ProblemInstance& instance,
                        const AlgorithmParams& params,
                        std::vector<double>* surrogate_objective) {
  const int m = instance.matrix.rows();
  const int n = instance.matrix.cols();
  if (m >= n) throw std::invalid_argument("irls: needs m < n");
  const int sparsity = params.sparsity;
  if (sparsity < 1 || sparsity > m)
    throw std::invalid_argument("irls: need 1 <= K <= m");
  const Eigen::MatrixXd& A = instance.matrix.entries;
  const Eigen::VectorXd& y = instance.y;

  // Minimum-energy start, then reweighted minimum-weighted-energy updates:
  // x = W^{-1} A' z with (A W^{-1} A') z = y, W = diag((x_i^2 + eps^2)^(-1/2)).
  Eigen::VectorXd x;
  {
    Eigen::LLT<Eigen::MatrixXd> llt(A * A.transpose());
    if (llt.info() != Eigen::Success)
      throw RankDeficiencyError(-1);
    x = A.transpose() * llt.solve(y);
  }

  double eps = 1.0;
  std::vector<IterationRecord> trace;
  int steps = 0;
  Termination termination = Termination::reached_iteration_cap;
  for (; steps < 100; ) {
    // Weighted minimum-energy step: x = D A' z with (A D A') z = y and
    // D = diag(1/w) = diag(sqrt(x_i^2 + eps^2)).
    const Eigen::VectorXd d = (x.array().square() + eps * eps).sqrt().matrix();
    const Eigen::MatrixXd scaled =
        A * d.array().sqrt().matrix().asDiagonal();
    Eigen::LLT<Eigen::MatrixXd> llt(scaled * scaled.transpose());
    if (llt.info() != Eigen::Success) {
      termination = Termination::rank_deficient;
      break;
    }
    const Eigen::VectorXd z = llt.solve(y);
    const Eigen::VectorXd next = d.asDiagonal() * (A.transpose() * z);
    const double change = (next - x).norm() / std::max(x.norm(), 1e-300);
    x = next;
    ++steps;

    IterationRecord record;
    record.residual_norm = (y - A * x).norm();
    trace.push_back(std::move(record));
    if (surrogate_objective)
      surrogate_objective->push_back(
          (x.array().square() + eps * eps).sqrt().sum());

    if (change < std::sqrt(eps) / 100.0) {
      if (eps <= 1e-8) {
        termination = Termination::residual_below_epsilon;
        break;
      }
      eps = std::max(eps / 10.0, 1e-8);
    }
  }

  std::vector<int> support = top_magnitudes(x, sparsity);
  try {
    return from_support(instance, support, termination, std::move(trace),
                        steps);
  } catch (const RankDeficiencyError&) {
    RecoveryResult result;
    result.support = support;
    result.estimate.n = n;
    result.estimate.support = support;
    result.estimate.values = Eigen::VectorXd::Zero(support.size());
    result.termination = Termination::rank_deficient;
    result.iterations = steps;
    return result;
  }
}

RecoveryResult run_oracle_ls(const ProblemInstance& instance) {
  if (!instance.truth)
    throw std::invalid_argument("oracle_ls: instance has no ground truth");
  return from_support(instance, instance.truth->support,
                      Termination::residual_below_epsilon, {}, 0);
}

}  // namespace mols
