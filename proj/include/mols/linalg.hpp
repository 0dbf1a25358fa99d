#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mols/types.hpp"

namespace mols {

/// Relative threshold below which an appended column counts as rank deficient.
inline constexpr double kRankTol = 1e-10;
/// Clamp for projected column norms; candidates at the floor carry no new
/// direction and are excluded from selection.
inline constexpr double kNormFloor = 1e-12;

/// Thin QR factorization of the selected columns, grown one column at a time
/// by Gram-Schmidt with a single reorthogonalization pass. Q has orthonormal
/// columns and Q * R reconstructs the selected submatrix; R's diagonal stays
/// strictly positive while the selection is full rank.
struct IncrementalBasis {
  int rows = 0;
  std::vector<int> cols;
  Eigen::MatrixXd Q;  // rows x |cols|
  Eigen::MatrixXd R;  // |cols| x |cols|, upper triangular

  int size() const { return static_cast<int>(cols.size()); }
};

IncrementalBasis make_empty_basis(int rows);

/// Extends the basis in place. Throws RankDeficiencyError (carrying the
/// offending index) when a new column's projected norm falls below
/// kRankTol times its raw norm; the basis keeps the columns appended so far.
void append_columns(IncrementalBasis& basis, const SensingMatrix& matrix,
                    std::span<const int> new_indices);

/// Value-returning variant of append_columns.
IncrementalBasis basis_append(const IncrementalBasis& basis,
                              const SensingMatrix& matrix,
                              std::span<const int> new_indices);

/// Orthogonalizes one candidate column against the basis without mutating it.
/// Returns the projected norm and, when above the floor, the new unit
/// direction in `q`.
double orthogonalize_against(const IncrementalBasis& basis,
                             const Eigen::VectorXd& column, Eigen::VectorXd& q);

/// Least-squares coefficients for the basis columns: R^{-1} Q' y.
Eigen::VectorXd solve_coefficients(const IncrementalBasis& basis,
                                   const Eigen::VectorXd& y);

/// Residual of y against the basis span: y - Q (Q' y).
Eigen::VectorXd residual_against(const IncrementalBasis& basis,
                                 const Eigen::VectorXd& y);

/// Least squares restricted to a support. Returns coefficients in support
/// order plus the residual. Throws RankDeficiencyError when the selected
/// columns are not independent.
std::pair<Eigen::VectorXd, Eigen::VectorXd> ls_on_support(
    const SensingMatrix& matrix, const Eigen::VectorXd& y,
    std::span<const int> support);

/// From-scratch projected norms |phi_i - Q (Q' phi_i)| for the candidates,
/// clamped at kNormFloor.
Eigen::VectorXd projected_column_norms(const SensingMatrix& matrix,
                                       const IncrementalBasis& basis,
                                       std::span<const int> candidates);

/// Maintains |P-perp phi_i| for every column as the basis grows, by the
/// downdate |P phi|^2 <- |P phi|^2 - sum_new (q' phi)^2 with nonnegativity
/// clamping.
class ProjectedNormTracker {
 public:
  explicit ProjectedNormTracker(const SensingMatrix& matrix);

  /// Accounts for basis columns [first_new, basis.size()).
  void downdate(const SensingMatrix& matrix, const IncrementalBasis& basis,
                int first_new);

  double norm(int i) const {
    double sq = squared_[i];
    return sq <= kNormFloor * kNormFloor ? kNormFloor : std::sqrt(sq);
  }
  bool at_floor(int i) const {
    return squared_[i] <= kNormFloor * kNormFloor;
  }
  int size() const { return static_cast<int>(squared_.size()); }

 private:
  Eigen::VectorXd squared_;
};

}  // namespace mols
