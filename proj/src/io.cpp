#include "mols/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mols/errors.hpp"

namespace mols {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string provenance_line(std::uint64_t seed, std::uint64_t spec_hash) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "# mols 0.1.0, seed=%llu, spec=%016llx",
                static_cast<unsigned long long>(seed),
                static_cast<unsigned long long>(spec_hash));
  return buf;
}

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

}  // namespace

void write_matrix(const std::string& path, const SensingMatrix& matrix) {
  std::ofstream out = open_out(path);
  out << matrix.rows() << ' ' << matrix.cols() << '\n';
  for (int i = 0; i < matrix.rows(); ++i) {
    for (int j = 0; j < matrix.cols(); ++j) {
      if (j) out << ' ';
      out << format_g17(matrix.entries(i, j));
    }
    out << '\n';
  }
}

SensingMatrix read_matrix(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  int lineno = 1;
  if (!std::getline(in, line)) throw ParseError(path, lineno, "empty file");
  int m = 0, n = 0;
  {
    std::istringstream head(line);
    if (!(head >> m >> n) || m < 1 || n < 1)
      throw ParseError(path, lineno, "expected header 'm n'");
  }
  SensingMatrix out;
  out.entries.resize(m, n);
  for (int i = 0; i < m; ++i) {
    ++lineno;
    if (!std::getline(in, line))
      throw ParseError(path, lineno, "missing matrix row");
    std::istringstream row(line);
    for (int j = 0; j < n; ++j) {
      if (!(row >> out.entries(i, j)))
        throw ParseError(path, lineno, "expected " + std::to_string(n) +
                                           " entries in row");
    }
    double extra;
    if (row >> extra) throw ParseError(path, lineno, "trailing entries in row");
  }
  bool unit = true;
  for (int j = 0; j < n && unit; ++j)
    unit = std::abs(out.entries.col(j).norm() - 1.0) <= 1e-12;
  out.normalized = unit;
  return out;
}

void write_signal(const std::string& path, const SparseSignal& signal) {
  std::ofstream out = open_out(path);
  out << signal.n << ' ' << signal.sparsity() << '\n';
  for (int i = 0; i < signal.sparsity(); ++i)
    out << signal.support[i] << ' ' << format_g17(signal.values[i]) << '\n';
}

SparseSignal read_signal(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  int lineno = 1;
  if (!std::getline(in, line)) throw ParseError(path, lineno, "empty file");
  int n = 0, k = 0;
  {
    std::istringstream head(line);
    if (!(head >> n >> k) || n < 1 || k < 1 || k > n)
      throw ParseError(path, lineno, "expected header 'n K'");
  }
  SparseSignal s;
  s.n = n;
  s.values.resize(k);
  for (int i = 0; i < k; ++i) {
    ++lineno;
    if (!std::getline(in, line))
      throw ParseError(path, lineno, "missing signal entry");
    std::istringstream row(line);
    int idx;
    double value;
    if (!(row >> idx >> value))
      throw ParseError(path, lineno, "expected 'index value'");
    s.support.push_back(idx);
    s.values[i] = value;
  }
  try {
    validate_signal(s, /*require_nonzero=*/false);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, lineno, e.what());
  }
  return s;
}

void write_vector(const std::string& path, const Eigen::VectorXd& v) {
  SensingMatrix wrap;
  wrap.entries = v;
  write_matrix(path, wrap);
}

Eigen::VectorXd read_vector(const std::string& path) {
  SensingMatrix wrap = read_matrix(path);
  if (wrap.cols() != 1)
    throw ParseError(path, 1, "expected a single-column vector file");
  return wrap.entries.col(0);
}

}  // namespace mols
