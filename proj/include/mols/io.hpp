#pragma once

#include <cstdint>
#include <string>

#include "mols/types.hpp"

namespace mols {

/// Shortest decimal that round-trips a double (printf %.17g).
std::string format_g17(double v);

/// Provenance line prepended to every CSV the tools emit:
/// "# mols <version>, seed=<seed>, spec=<hash>".
std::string provenance_line(std::uint64_t seed, std::uint64_t spec_hash);

/// FNV-1a over a byte range; used for spec hashes and instance digests.
std::uint64_t fnv1a(const void* data, std::size_t bytes,
                    std::uint64_t seed = 0xCBF29CE484222325ULL);

// Matrix file: line 1 "m n", then m rows of n space-separated decimals.
void write_matrix(const std::string& path, const SensingMatrix& matrix);
SensingMatrix read_matrix(const std::string& path);

// Signal file: line 1 "n K", then K lines "index value" (0-based indices).
void write_signal(const std::string& path, const SparseSignal& signal);
SparseSignal read_signal(const std::string& path);

// Measurement vectors reuse the matrix format with a single column.
void write_vector(const std::string& path, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector(const std::string& path);

}  // namespace mols
