#include "mols/identify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mols/errors.hpp"

namespace mols {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<char> membership(int n, std::span<const int> indices) {
  std::vector<char> in(n, 0);
  for (int i : indices) in[i] = 1;
  return in;
}

// Sorts admissible candidates by (score desc, index asc) and takes the top
// `width`. The same comparator serves both selection rules so that their
// tie handling is identical.
SelectionOutcome pick_top(const Eigen::VectorXd& scores, int width) {
  std::vector<int> order;
  for (int i = 0; i < scores.size(); ++i)
    if (!std::isnan(scores[i])) order.push_back(i);
  if (static_cast<int>(order.size()) < width)
    throw ExhaustedCandidatesError(width, static_cast<int>(order.size()));
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  SelectionOutcome out;
  out.chosen.assign(order.begin(), order.begin() + width);
  out.scores = scores;
  out.tie_note =
      static_cast<int>(order.size()) > width &&
      std::abs(scores[order[width - 1]] - scores[order[width]]) <= kTieTol;
  return out;
}

}  // namespace

SelectionOutcome select_fast(const SensingMatrix& matrix,
                             const Eigen::VectorXd& residual,
                             const IncrementalBasis& basis,
                             const ProjectedNormTracker& norms, int width) {
  const int n = matrix.cols();
  const std::vector<char> taken = membership(n, basis.cols);
  const Eigen::VectorXd correlations = matrix.entries.transpose() * residual;
  Eigen::VectorXd scores = Eigen::VectorXd::Constant(n, kNaN);
  for (int i = 0; i < n; ++i) {
    if (taken[i] || norms.at_floor(i)) continue;
    scores[i] = std::abs(correlations[i]) / norms.norm(i);
  }
  return pick_top(scores, width);
}

SelectionOutcome select_naive(const SensingMatrix& matrix,
                              const Eigen::VectorXd& y,
                              std::span<const int> current_support,
                              int width) {
  const int n = matrix.cols();
  IncrementalBasis basis = make_empty_basis(matrix.rows());
  append_columns(basis, matrix, current_support);
  const Eigen::VectorXd base_projection =
      basis.size() > 0
          ? Eigen::VectorXd(basis.Q * (basis.Q.transpose() * y))
          : Eigen::VectorXd(Eigen::VectorXd::Zero(matrix.rows()));

  const std::vector<char> taken = membership(n, current_support);
  Eigen::VectorXd scores = Eigen::VectorXd::Constant(n, kNaN);
  Eigen::VectorXd q(matrix.rows());
  for (int i = 0; i < n; ++i) {
    if (taken[i]) continue;
    const double pnorm = orthogonalize_against(basis, matrix.entries.col(i), q);
    if (pnorm <= kNormFloor) continue;
    // Residual power of y against the trial-extended span.
    const Eigen::VectorXd rest = y - base_projection - q * q.dot(y);
    scores[i] = -rest.squaredNorm();
  }
  return pick_top(scores, width);
}

std::optional<IterationProbes> iteration_probes(
    const SensingMatrix& matrix, const Eigen::VectorXd& residual,
    const IncrementalBasis& basis, const ProjectedNormTracker& norms,
    const SparseSignal& truth, int width) {
  const int n = matrix.cols();
  const std::vector<char> taken = membership(n, basis.cols);
  const std::vector<char> is_true = membership(n, truth.support);

  int missing = 0;
  for (int i : truth.support)
    if (!taken[i]) ++missing;
  if (missing == 0) return std::nullopt;

  const Eigen::VectorXd correlations = matrix.entries.transpose() * residual;
  double u1 = 0.0;
  std::vector<double> outside;
  for (int i = 0; i < n; ++i) {
    if (taken[i] || norms.at_floor(i)) continue;
    const double ratio = std::abs(correlations[i]) / norms.norm(i);
    if (is_true[i]) {
      u1 = std::max(u1, ratio);
    } else {
      outside.push_back(ratio);
    }
  }
  double vL = 0.0;
  if (static_cast<int>(outside.size()) >= width) {
    std::nth_element(outside.begin(), outside.begin() + (width - 1),
                     outside.end(), std::greater<double>());
    vL = outside[width - 1];
  }
  return IterationProbes{u1, vL, missing};
}

}  // namespace mols
