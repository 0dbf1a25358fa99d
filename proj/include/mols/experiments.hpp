#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mols/solvers.hpp"
#include "mols/types.hpp"

namespace mols {

enum class SweepVariable { sparsity, measurements, snr_db };

const char* to_string(SweepVariable v);

/// One benchmark entry: algorithm name, selection width for mols, and the
/// residual threshold relative to |y| (ignored by the fixed-iteration
/// solvers). The id is the canonical label used in CSV rows.
struct AlgorithmSpec {
  std::string id;
  std::string name;  // mols | ols | omp | cosamp | irls | oracle_ls
  int width = 1;
  double epsilon_rel = 1e-6;
};

/// Parses "name" or "name:L=5" or "name:L=5,eps=1e-8".
AlgorithmSpec parse_algorithm_spec(const std::string& text);
AlgorithmSpec make_algorithm(const std::string& name, int width = 1,
                             double epsilon_rel = 1e-6);

struct SweepSpec {
  int m = 128;
  int n = 256;
  SweepVariable variable = SweepVariable::sparsity;
  std::vector<double> values;  // strictly increasing
  int trials = 100;
  SignalKind kind = SignalKind::gaussian;
  std::vector<AlgorithmSpec> algorithms;
  std::uint64_t master_seed = 0;
  double exact_tol = 1e-6;  // relative, |x - xhat| <= tol * |x|
  int sparsity = 20;        // fixed K when the variable is not K
  Snr snr = Snr::infinite();  // fixed snr when the variable is not snr_db

  std::string canonical() const;  // serialization fed into the spec hash
  std::uint64_t hash() const;
};

struct SweepCell {
  std::string algorithm;
  double sweep_value = 0.0;
  int trials = 0;  // 0 marks a skipped (inadmissible) cell
  long exact_count = 0;
  double mean_mse = 0.0;
  double mean_iterations = 0.0;
  int failures = 0;
  std::uint64_t child_seed_first = 0;
  std::uint64_t child_seed_last = 0;
  std::uint64_t instance_digest_xor = 0;  // paired-design witness

  double frequency_exact() const {
    return trials == 0 ? 0.0 : static_cast<double>(exact_count) / trials;
  }
};

struct SweepTable {
  SweepVariable variable = SweepVariable::sparsity;
  std::vector<SweepCell> rows;  // grouped by algorithm, values ascending
  std::uint64_t master_seed = 0;
  std::uint64_t spec_hash = 0;
};

/// Instance consumed by every algorithm of one trial; exposed so tests can
/// verify the paired design and determinism independently of the runner.
ProblemInstance make_trial_instance(const SweepSpec& spec, int point_index,
                                    int trial_index);
std::uint64_t trial_seed(const SweepSpec& spec, int point_index,
                         int trial_index);
std::uint64_t instance_digest(const ProblemInstance& instance);

/// Runs one algorithm on one instance with the sweep's iteration policy
/// (fixed K iterations for ols/omp, residual stop for mols/cosamp).
RecoveryResult run_algorithm(const AlgorithmSpec& algorithm,
                             const ProblemInstance& instance, int sparsity);

/// Monte-Carlo sweep: per trial a fresh matrix, signal, and (when the model
/// is noisy) noise vector, all from pre-assigned child seeds; every
/// algorithm sees the identical instance. Deterministic for a fixed master
/// seed regardless of `threads`.
SweepTable run_sweep(const SweepSpec& spec, int threads = 0);

/// Largest swept K at which every trial recovered exactly; 0 when none.
int critical_sparsity(const SweepTable& table, const std::string& algorithm);

struct MseRatioRow {
  std::string algorithm;
  double snr_db = 0.0;
  double ratio = 0.0;  // mean MSE relative to the oracle row
};

/// Per-SNR MSE ratios against the oracle_ls rows of the same table.
std::vector<MseRatioRow> mse_sweep_summary(const SweepTable& table);

/// CSV with the provenance comment line and the fixed header
/// algorithm,sweep_variable,sweep_value,trials,frequency_exact,mean_mse,
/// mean_iterations,failures. Row order: algorithm, then value.
std::string sweep_table_csv(const SweepTable& table);

/// Parses rows from a CSV in the schema above (externally computed results
/// included); appends them to the table.
void merge_sweep_csv(SweepTable& table, const std::string& csv_text);

/// Self-contained gnuplot script with the table data inlined.
std::string sweep_plot_script(const SweepTable& table);

}  // namespace mols
