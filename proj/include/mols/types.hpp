#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace mols {

/// A signal with few nonzeros: ambient dimension, strictly increasing support
/// indices, and one value per support index. Ground-truth signals carry only
/// nonzero values; solver estimates may hold exact zeros (see make_estimate).
struct SparseSignal {
  int n = 0;
  std::vector<int> support;
  Eigen::VectorXd values;

  int sparsity() const { return static_cast<int>(support.size()); }
  Eigen::VectorXd to_dense() const;
  double norm() const { return values.norm(); }
  double min_abs() const;
};

/// Checks dimension, ordering and (for ground truth) nonzero values.
void validate_signal(const SparseSignal& s, bool require_nonzero);

struct SensingMatrix {
  Eigen::MatrixXd entries;  // m x n, dense
  bool normalized = false;  // true when every column has unit l2 norm

  int rows() const { return static_cast<int>(entries.rows()); }
  int cols() const { return static_cast<int>(entries.cols()); }
};

/// Signal-to-noise ratio in dB with an explicit noiseless sentinel.
struct Snr {
  bool is_infinite = true;
  double db = 0.0;

  static Snr infinite() { return Snr{}; }
  static Snr from_db(double value) { return Snr{false, value}; }
  /// Per-entry noise variance (K/m) * 10^(-db/10); zero when infinite.
  double noise_variance(int sparsity, int m) const;
};

struct ProblemInstance {
  SensingMatrix matrix;
  Eigen::VectorXd y;
  std::optional<SparseSignal> truth;
  std::optional<Eigen::VectorXd> noise;
};

/// Solver configuration. `width` is the number of indices admitted per
/// iteration (1 recovers plain OLS). `epsilon` is an absolute threshold on
/// the residual norm; `max_iterations` of 0 means the sparsity acts as cap.
struct AlgorithmParams {
  int sparsity = 0;
  int width = 1;
  double epsilon = 0.0;
  int max_iterations = 0;
};

enum class SignalKind { gaussian, pam2 };

}  // namespace mols
