#pragma once

#include <cstdint>

#include "mols/types.hpp"

namespace mols {

/// m x n matrix with i.i.d. N(0, 1/m) entries, drawn column-major from the
/// seed. With normalize, every column is rescaled to unit l2 norm afterward.
SensingMatrix generate_gaussian_matrix(int m, int n, std::uint64_t seed,
                                       bool normalize);

/// K-sparse signal on a uniformly random support. Gaussian values are
/// standard normal; pam2 values are drawn from {-1, +1}.
SparseSignal generate_sparse_signal(int n, int sparsity, SignalKind kind,
                                    std::uint64_t seed);

/// Canonical measurement map y = Phi * x over the stored support, applied in
/// support order. Every construction and recomputation of y goes through
/// here so the byte-identity invariant is checkable.
Eigen::VectorXd measure(const SensingMatrix& matrix, const SparseSignal& x);

/// Noiseless instance y = Phi * x with the truth retained.
ProblemInstance make_instance(SensingMatrix matrix, SparseSignal truth);

/// Replaces y by Phi*x + v where v has i.i.d. entries of variance
/// (K/m) * 10^(-snr_db/10). The infinite sentinel yields v = 0. The matrix
/// and the truth are preserved exactly.
ProblemInstance add_noise(const ProblemInstance& instance, Snr snr,
                          std::uint64_t seed);

/// Measured snr = |Phi x|^2 / |v|^2 and the minimum-to-average magnitude
/// ratio min|x_j| / (|x|_2 / sqrt(K)). Zero noise reports an infinite snr.
std::pair<double, double> snr_and_mar(const ProblemInstance& instance);

/// l2 distance between two signals of the same ambient dimension.
double signal_distance(const SparseSignal& a, const SparseSignal& b);

}  // namespace mols
