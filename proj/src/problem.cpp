#include "mols/problem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mols/rng.hpp"

namespace mols {

Eigen::VectorXd SparseSignal::to_dense() const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < sparsity(); ++i) x[support[i]] = values[i];
  return x;
}

double SparseSignal::min_abs() const {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < values.size(); ++i) m = std::min(m, std::abs(values[i]));
  return m;
}

void validate_signal(const SparseSignal& s, bool require_nonzero) {
  if (s.n < 1) throw std::invalid_argument("signal: n must be positive");
  if (s.support.empty() || s.sparsity() > s.n)
    throw std::invalid_argument("signal: support size out of range");
  if (s.values.size() != s.sparsity())
    throw std::invalid_argument("signal: one value per support index required");
  for (int i = 0; i < s.sparsity(); ++i) {
    if (s.support[i] < 0 || s.support[i] >= s.n)
      throw std::invalid_argument("signal: index out of range");
    if (i > 0 && s.support[i] <= s.support[i - 1])
      throw std::invalid_argument("signal: indices must be strictly increasing");
    if (require_nonzero && s.values[i] == 0.0)
      throw std::invalid_argument("signal: zero value on the support");
  }
}

double Snr::noise_variance(int sparsity, int m) const {
  if (is_infinite) return 0.0;
  return (static_cast<double>(sparsity) / m) * std::pow(10.0, -db / 10.0);
}

SensingMatrix generate_gaussian_matrix(int m, int n, std::uint64_t seed,
                                       bool normalize) {
  if (m < 1 || n < 1)
    throw std::invalid_argument("matrix dimensions must be positive");
  Rng rng(seed);
  SensingMatrix out;
  out.entries.resize(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) out.entries(i, j) = scale * rng.next_gaussian();
  if (normalize) {
    for (int j = 0; j < n; ++j) out.entries.col(j) /= out.entries.col(j).norm();
    out.normalized = true;
  }
  return out;
}

SparseSignal generate_sparse_signal(int n, int sparsity, SignalKind kind,
                                    std::uint64_t seed) {
  if (n < 1 || sparsity < 1 || sparsity > n)
    throw std::invalid_argument("invalid sparsity: need 1 <= K <= n");
  Rng rng(seed);
  SparseSignal s;
  s.n = n;
  s.support = rng.sample_without_replacement(n, sparsity);
  s.values.resize(sparsity);
  for (int i = 0; i < sparsity; ++i) {
    if (kind == SignalKind::gaussian) {
      double v;
      do {
        v = rng.next_gaussian();
      } while (v == 0.0);
      s.values[i] = v;
    } else {
      s.values[i] = (rng.next_u64() & 1u) ? 1.0 : -1.0;
    }
  }
  return s;
}

Eigen::VectorXd measure(const SensingMatrix& matrix, const SparseSignal& x) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(matrix.rows());
  for (int i = 0; i < x.sparsity(); ++i)
    y += matrix.entries.col(x.support[i]) * x.values[i];
  return y;
}

ProblemInstance make_instance(SensingMatrix matrix, SparseSignal truth) {
  validate_signal(truth, /*require_nonzero=*/true);
  if (truth.n != matrix.cols())
    throw std::invalid_argument("instance: signal dimension != matrix columns");
  ProblemInstance inst;
  inst.y = measure(matrix, truth);
  inst.matrix = std::move(matrix);
  inst.truth = std::move(truth);
  return inst;
}

ProblemInstance add_noise(const ProblemInstance& instance, Snr snr,
                          std::uint64_t seed) {
  if (!instance.truth)
    throw std::invalid_argument("add_noise: instance has no ground truth");
  const int m = instance.matrix.rows();
  const double variance = snr.noise_variance(instance.truth->sparsity(), m);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
  if (!snr.is_infinite) {
    Rng rng(seed);
    const double sigma = std::sqrt(variance);
    for (int i = 0; i < m; ++i) v[i] = sigma * rng.next_gaussian();
  }
  ProblemInstance out = instance;
  out.y = measure(instance.matrix, *instance.truth) + v;
  out.noise = std::move(v);
  return out;
}

std::pair<double, double> snr_and_mar(const ProblemInstance& instance) {
  if (!instance.truth || !instance.noise)
    throw std::invalid_argument("snr_and_mar: needs truth and noise");
  const SparseSignal& x = *instance.truth;
  const double signal_power = measure(instance.matrix, x).squaredNorm();
  const double noise_power = instance.noise->squaredNorm();
  const double snr = noise_power == 0.0
                         ? std::numeric_limits<double>::infinity()
                         : signal_power / noise_power;
  const double mar =
      x.min_abs() / (x.norm() / std::sqrt(static_cast<double>(x.sparsity())));
  return {snr, mar};
}

double signal_distance(const SparseSignal& a, const SparseSignal& b) {
  if (a.n != b.n)
    throw std::invalid_argument("signal_distance: dimension mismatch");
  return (a.to_dense() - b.to_dense()).norm();
}

}  // namespace mols
