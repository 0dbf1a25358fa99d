#include "mols/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mols/baselines.hpp"
#include "mols/io.hpp"
#include "mols/parallel.hpp"
#include "mols/problem.hpp"
#include "mols/rng.hpp"

namespace mols {

const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::sparsity:
      return "K";
    case SweepVariable::measurements:
      return "m";
    case SweepVariable::snr_db:
      return "snr_db";
  }
  return "?";
}

AlgorithmSpec make_algorithm(const std::string& name, int width,
                             double epsilon_rel) {
  AlgorithmSpec spec;
  spec.name = name;
  spec.width = name == "mols" ? width : 1;
  spec.epsilon_rel = epsilon_rel;
  spec.id = name == "mols" ? name + ":L=" + std::to_string(spec.width) : name;
  return spec;
}

AlgorithmSpec parse_algorithm_spec(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  int width = 1;
  double epsilon_rel = 1e-6;
  if (colon != std::string::npos) {
    std::stringstream opts(text.substr(colon + 1));
    std::string item;
    while (std::getline(opts, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("algorithm option needs key=value: " + item);
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      if (key == "L") {
        width = std::stoi(value);
      } else if (key == "eps") {
        epsilon_rel = std::stod(value);
      } else {
        throw std::invalid_argument("unknown algorithm option: " + key);
      }
    }
  }
  static const char* known[] = {"mols", "ols", "omp", "cosamp", "irls",
                                "oracle_ls"};
  if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
        return name == k;
      }) == std::end(known))
    throw std::invalid_argument("unknown algorithm: " + name);
  return make_algorithm(name, width, epsilon_rel);
}

std::string SweepSpec::canonical() const {
  std::ostringstream out;
  out << "m=" << m << ";n=" << n << ";var=" << to_string(variable)
      << ";values=";
  for (std::size_t i = 0; i < values.size(); ++i)
    out << (i ? "," : "") << format_g17(values[i]);
  out << ";trials=" << trials
      << ";kind=" << (kind == SignalKind::gaussian ? "gaussian" : "pam2")
      << ";algs=";
  for (std::size_t i = 0; i < algorithms.size(); ++i)
    out << (i ? "|" : "") << algorithms[i].id << ",eps="
        << format_g17(algorithms[i].epsilon_rel);
  out << ";seed=" << master_seed << ";tol=" << format_g17(exact_tol)
      << ";K=" << sparsity
      << ";snr=" << (snr.is_infinite ? "inf" : format_g17(snr.db));
  return out.str();
}

std::uint64_t SweepSpec::hash() const {
  const std::string text = canonical();
  return fnv1a(text.data(), text.size());
}

namespace {

void validate_spec(const SweepSpec& spec) {
  if (spec.trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  if (spec.values.empty())
    throw std::invalid_argument("sweep: values must be nonempty");
  for (std::size_t i = 1; i < spec.values.size(); ++i)
    if (spec.values[i] <= spec.values[i - 1])
      throw std::invalid_argument("sweep: values must be strictly increasing");
  if (spec.algorithms.empty())
    throw std::invalid_argument("sweep: no algorithms given");
}

struct PointGeometry {
  int m;
  int sparsity;
  Snr snr;
};

PointGeometry point_geometry(const SweepSpec& spec, int point_index) {
  PointGeometry g{spec.m, spec.sparsity, spec.snr};
  const double value = spec.values[point_index];
  switch (spec.variable) {
    case SweepVariable::sparsity:
      g.sparsity = static_cast<int>(value);
      break;
    case SweepVariable::measurements:
      g.m = static_cast<int>(value);
      break;
    case SweepVariable::snr_db:
      g.snr = Snr::from_db(value);
      break;
  }
  return g;
}

bool admissible(const AlgorithmSpec& algorithm, const PointGeometry& g,
                int n) {
  if (g.sparsity < 1 || g.sparsity > std::min(g.m, n)) return false;
  if (algorithm.name == "mols" && algorithm.width > g.sparsity) return false;
  if (algorithm.name == "irls" && g.m >= n) return false;
  return true;
}

struct TrialOutcome {
  bool exact = false;
  double mse = 0.0;
  double iterations = 0.0;
  bool failure = false;
};

}  // namespace

std::uint64_t trial_seed(const SweepSpec& spec, int point_index,
                         int trial_index) {
  const std::uint64_t global =
      static_cast<std::uint64_t>(point_index) * spec.trials + trial_index;
  return child_seed(spec.master_seed, global);
}

ProblemInstance make_trial_instance(const SweepSpec& spec, int point_index,
                                    int trial_index) {
  const PointGeometry g = point_geometry(spec, point_index);
  const std::uint64_t seed = trial_seed(spec, point_index, trial_index);
  SensingMatrix matrix = generate_gaussian_matrix(g.m, spec.n,
                                                  child_seed(seed, 0), true);
  SparseSignal signal =
      generate_sparse_signal(spec.n, g.sparsity, spec.kind, child_seed(seed, 1));
  ProblemInstance instance = make_instance(std::move(matrix), std::move(signal));
  if (!g.snr.is_infinite)
    instance = add_noise(instance, g.snr, child_seed(seed, 2));
  return instance;
}

std::uint64_t instance_digest(const ProblemInstance& instance) {
  std::uint64_t h = fnv1a(instance.matrix.entries.data(),
                          sizeof(double) * instance.matrix.entries.size());
  h = fnv1a(instance.y.data(), sizeof(double) * instance.y.size(), h);
  return h;
}

RecoveryResult run_algorithm(const AlgorithmSpec& algorithm,
                             const ProblemInstance& instance, int sparsity) {
  AlgorithmParams params;
  params.sparsity = sparsity;
  params.width = algorithm.width;
  if (algorithm.name == "mols") {
    params.epsilon = algorithm.epsilon_rel * instance.y.norm();
    return run_mols(instance, params);
  }
  if (algorithm.name == "ols") {
    params.epsilon = 0.0;  // fixed K iterations
    return run_ols(instance, params);
  }
  if (algorithm.name == "omp") {
    params.epsilon = 0.0;
    return run_omp(instance, params);
  }
  if (algorithm.name == "cosamp") {
    params.epsilon = algorithm.epsilon_rel * instance.y.norm();
    return run_cosamp(instance, params);
  }
  if (algorithm.name == "irls") return run_irls(instance, params);
  if (algorithm.name == "oracle_ls") return run_oracle_ls(instance);
  throw std::invalid_argument("unknown algorithm: " + algorithm.name);
}

SweepTable run_sweep(const SweepSpec& spec, int threads) {
  validate_spec(spec);
  const int points = static_cast<int>(spec.values.size());
  const int algs = static_cast<int>(spec.algorithms.size());

  std::vector<char> cell_admissible(points * algs, 0);
  for (int p = 0; p < points; ++p) {
    const PointGeometry g = point_geometry(spec, p);
    for (int a = 0; a < algs; ++a)
      cell_admissible[p * algs + a] = admissible(spec.algorithms[a], g, spec.n);
  }

  // Slot per (point, trial); the parallel phase only writes its own slot.
  std::vector<std::vector<TrialOutcome>> outcomes(
      static_cast<std::size_t>(points) * spec.trials,
      std::vector<TrialOutcome>(algs));
  std::vector<std::uint64_t> digests(
      static_cast<std::size_t>(points) * spec.trials, 0);

  parallel_for(points * spec.trials, threads, [&](int slot) {
    const int p = slot / spec.trials;
    const int t = slot % spec.trials;
    const PointGeometry g = point_geometry(spec, p);
    bool any = false;
    for (int a = 0; a < algs; ++a) any = any || cell_admissible[p * algs + a];
    if (!any) return;

    const ProblemInstance instance = make_trial_instance(spec, p, t);
    digests[slot] = instance_digest(instance);
    const SparseSignal& truth = *instance.truth;
    const double truth_norm = truth.norm();

    for (int a = 0; a < algs; ++a) {
      if (!cell_admissible[p * algs + a]) continue;
      TrialOutcome& out = outcomes[slot][a];
      try {
        const RecoveryResult result =
            run_algorithm(spec.algorithms[a], instance, g.sparsity);
        const double err = signal_distance(truth, result.estimate);
        out.exact = err <= spec.exact_tol * truth_norm;
        out.mse = err * err / spec.n;
        out.iterations = result.iterations;
        out.failure = result.termination == Termination::exhausted_candidates ||
                      result.termination == Termination::rank_deficient;
      } catch (const std::exception&) {
        out.failure = true;
        out.exact = false;
        out.mse = truth_norm * truth_norm / spec.n;
        out.iterations = 0.0;
      }
    }
  });

  SweepTable table;
  table.variable = spec.variable;
  table.master_seed = spec.master_seed;
  table.spec_hash = spec.hash();
  for (int a = 0; a < algs; ++a) {
    for (int p = 0; p < points; ++p) {
      SweepCell cell;
      cell.algorithm = spec.algorithms[a].id;
      cell.sweep_value = spec.values[p];
      if (cell_admissible[p * algs + a]) {
        cell.trials = spec.trials;
        cell.child_seed_first = trial_seed(spec, p, 0);
        cell.child_seed_last = trial_seed(spec, p, spec.trials - 1);
        double mse_sum = 0.0, iter_sum = 0.0;
        for (int t = 0; t < spec.trials; ++t) {
          const int slot = p * spec.trials + t;
          const TrialOutcome& out = outcomes[slot][a];
          cell.exact_count += out.exact ? 1 : 0;
          cell.failures += out.failure ? 1 : 0;
          mse_sum += out.mse;
          iter_sum += out.iterations;
          cell.instance_digest_xor ^= digests[slot];
        }
        cell.mean_mse = mse_sum / spec.trials;
        cell.mean_iterations = iter_sum / spec.trials;
      }
      table.rows.push_back(std::move(cell));
    }
  }
  return table;
}

int critical_sparsity(const SweepTable& table, const std::string& algorithm) {
  if (table.variable != SweepVariable::sparsity)
    throw std::invalid_argument("critical_sparsity: table is not a K sweep");
  bool seen = false;
  int best = 0;
  for (const SweepCell& cell : table.rows) {
    if (cell.algorithm != algorithm) continue;
    seen = true;
    if (cell.trials > 0 && cell.exact_count == cell.trials)
      best = std::max(best, static_cast<int>(cell.sweep_value));
  }
  if (!seen)
    throw std::invalid_argument("critical_sparsity: unknown algorithm " +
                                algorithm);
  return best;
}

std::vector<MseRatioRow> mse_sweep_summary(const SweepTable& table) {
  if (table.variable != SweepVariable::snr_db)
    throw std::invalid_argument("mse_sweep_summary: table is not an SNR sweep");
  std::vector<MseRatioRow> out;
  for (const SweepCell& cell : table.rows) {
    if (cell.trials == 0) continue;
    const SweepCell* oracle = nullptr;
    for (const SweepCell& other : table.rows)
      if (other.algorithm == "oracle_ls" &&
          other.sweep_value == cell.sweep_value && other.trials > 0)
        oracle = &other;
    if (!oracle)
      throw std::invalid_argument("mse_sweep_summary: missing oracle_ls row");
    out.push_back(
        {cell.algorithm, cell.sweep_value, cell.mean_mse / oracle->mean_mse});
  }
  return out;
}

static const char* kSweepHeader =
    "algorithm,sweep_variable,sweep_value,trials,frequency_exact,mean_mse,"
    "mean_iterations,failures";

std::string sweep_table_csv(const SweepTable& table) {
  std::ostringstream out;
  out << provenance_line(table.master_seed, table.spec_hash) << '\n';
  out << kSweepHeader << '\n';
  for (const SweepCell& cell : table.rows) {
    out << cell.algorithm << ',' << to_string(table.variable) << ','
        << format_g17(cell.sweep_value) << ',' << cell.trials << ','
        << format_g17(cell.frequency_exact()) << ','
        << format_g17(cell.mean_mse) << ','
        << format_g17(cell.mean_iterations) << ',' << cell.failures << '\n';
  }
  return out.str();
}

void merge_sweep_csv(SweepTable& table, const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kSweepHeader)
        throw std::invalid_argument("merge: unexpected header at line " +
                                    std::to_string(lineno));
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string field;
    SweepCell cell;
    std::getline(row, cell.algorithm, ',');
    std::getline(row, field, ',');
    if (field != to_string(table.variable))
      throw std::invalid_argument("merge: sweep variable mismatch at line " +
                                  std::to_string(lineno));
    std::getline(row, field, ',');
    cell.sweep_value = std::stod(field);
    std::getline(row, field, ',');
    cell.trials = std::stoi(field);
    std::getline(row, field, ',');
    const double freq = std::stod(field);
    cell.exact_count = std::lround(freq * cell.trials);
    std::getline(row, field, ',');
    cell.mean_mse = std::stod(field);
    std::getline(row, field, ',');
    cell.mean_iterations = std::stod(field);
    if (!std::getline(row, field, ','))
      throw std::invalid_argument("merge: short row at line " +
                                  std::to_string(lineno));
    cell.failures = std::stoi(field);
    table.rows.push_back(std::move(cell));
  }
  if (!header_seen)
    throw std::invalid_argument("merge: no header found");
}

std::string sweep_plot_script(const SweepTable& table) {
  std::vector<std::string> algorithms;
  for (const SweepCell& cell : table.rows)
    if (std::find(algorithms.begin(), algorithms.end(), cell.algorithm) ==
        algorithms.end())
      algorithms.push_back(cell.algorithm);

  const bool mse = table.variable == SweepVariable::snr_db;
  std::ostringstream out;
  out << "# gnuplot script, data inlined\n";
  out << "set datafile separator ','\n";
  out << "set xlabel '" << to_string(table.variable) << "'\n";
  out << "set ylabel '" << (mse ? "mean MSE" : "frequency of exact recovery")
      << "'\n";
  if (mse) out << "set logscale y\n";
  out << "set key outside\n";
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    out << "$data" << a << " << EOD\n";
    for (const SweepCell& cell : table.rows)
      if (cell.algorithm == algorithms[a] && cell.trials > 0)
        out << format_g17(cell.sweep_value) << ','
            << format_g17(mse ? cell.mean_mse : cell.frequency_exact()) << '\n';
    out << "EOD\n";
  }
  out << "plot ";
  for (std::size_t a = 0; a < algorithms.size(); ++a)
    out << (a ? ", " : "") << "$data" << a << " using 1:2 with linespoints"
        << " title '" << algorithms[a] << "'";
  out << "\n";
  return out.str();
}

}  // namespace mols
