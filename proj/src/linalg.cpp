#include "mols/linalg.hpp"

#include <stdexcept>

#include "mols/errors.hpp"

namespace mols {

IncrementalBasis make_empty_basis(int rows) {
  IncrementalBasis b;
  b.rows = rows;
  b.Q.resize(rows, 0);
  b.R.resize(0, 0);
  return b;
}

namespace {

// Grows Q and R by one column, preserving existing contents.
void grow(IncrementalBasis& b) {
  const int c = b.size();
  b.Q.conservativeResize(b.rows, c + 1);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(c + 1, c + 1);
  r.topLeftCorner(c, c) = b.R;
  b.R = std::move(r);
}

}  // namespace

double orthogonalize_against(const IncrementalBasis& basis,
                             const Eigen::VectorXd& column,
                             Eigen::VectorXd& q) {
  q = column;
  if (basis.size() > 0) {
    // Two passes handle the cancellation when the column is nearly in-span.
    q.noalias() -= basis.Q * (basis.Q.transpose() * q);
    q.noalias() -= basis.Q * (basis.Q.transpose() * q);
  }
  const double norm = q.norm();
  if (norm > 0.0) q /= norm;
  return norm;
}

void append_columns(IncrementalBasis& basis, const SensingMatrix& matrix,
                    std::span<const int> new_indices) {
  for (int idx : new_indices) {
    if (idx < 0 || idx >= matrix.cols())
      throw std::invalid_argument("append_columns: index out of range");
    for (int held : basis.cols)
      if (held == idx)
        throw std::invalid_argument("append_columns: index already selected");

    const Eigen::VectorXd column = matrix.entries.col(idx);
    Eigen::VectorXd h1 = basis.Q.transpose() * column;
    Eigen::VectorXd w = column - basis.Q * h1;
    Eigen::VectorXd h2 = basis.Q.transpose() * w;
    w.noalias() -= basis.Q * h2;
    const double norm = w.norm();
    if (norm < kRankTol * column.norm()) throw RankDeficiencyError(idx);

    const int c = basis.size();
    grow(basis);
    basis.Q.col(c) = w / norm;
    if (c > 0) basis.R.block(0, c, c, 1) = h1 + h2;
    basis.R(c, c) = norm;
    basis.cols.push_back(idx);
  }
}

IncrementalBasis basis_append(const IncrementalBasis& basis,
                              const SensingMatrix& matrix,
                              std::span<const int> new_indices) {
  IncrementalBasis out = basis;
  append_columns(out, matrix, new_indices);
  return out;
}

Eigen::VectorXd solve_coefficients(const IncrementalBasis& basis,
                                   const Eigen::VectorXd& y) {
  const Eigen::VectorXd qty = basis.Q.transpose() * y;
  return basis.R.triangularView<Eigen::Upper>().solve(qty);
}

Eigen::VectorXd residual_against(const IncrementalBasis& basis,
                                 const Eigen::VectorXd& y) {
  if (basis.size() == 0) return y;
  return y - basis.Q * (basis.Q.transpose() * y);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> ls_on_support(
    const SensingMatrix& matrix, const Eigen::VectorXd& y,
    std::span<const int> support) {
  if (static_cast<int>(support.size()) > matrix.rows())
    throw std::invalid_argument("ls_on_support: support larger than m");
  IncrementalBasis basis = make_empty_basis(matrix.rows());
  append_columns(basis, matrix, support);
  Eigen::VectorXd coeffs = solve_coefficients(basis, y);
  Eigen::VectorXd residual = y;
  for (std::size_t i = 0; i < support.size(); ++i)
    residual -= matrix.entries.col(support[i]) * coeffs[i];
  return {std::move(coeffs), std::move(residual)};
}

Eigen::VectorXd projected_column_norms(const SensingMatrix& matrix,
                                       const IncrementalBasis& basis,
                                       std::span<const int> candidates) {
  Eigen::VectorXd out(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Eigen::VectorXd& col = matrix.entries.col(candidates[i]);
    Eigen::VectorXd p = col;
    if (basis.size() > 0) p.noalias() -= basis.Q * (basis.Q.transpose() * col);
    out[i] = std::max(p.norm(), kNormFloor);
  }
  return out;
}

ProjectedNormTracker::ProjectedNormTracker(const SensingMatrix& matrix) {
  squared_.resize(matrix.cols());
  for (int j = 0; j < matrix.cols(); ++j)
    squared_[j] = matrix.entries.col(j).squaredNorm();
}

void ProjectedNormTracker::downdate(const SensingMatrix& matrix,
                                    const IncrementalBasis& basis,
                                    int first_new) {
  for (int c = first_new; c < basis.size(); ++c) {
    const Eigen::VectorXd dots = matrix.entries.transpose() * basis.Q.col(c);
    squared_ -= dots.cwiseProduct(dots);
  }
  squared_ = squared_.cwiseMax(0.0);
}

}  // namespace mols
