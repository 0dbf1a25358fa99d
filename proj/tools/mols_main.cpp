// Command-line front end: instance generation, single-shot recovery,
// isometry-constant reports, bound verification, and Monte-Carlo sweeps.
// Exit codes: 0 success, 1 usage or I/O error, 2 solver-flagged failure,
// 3 resource limit (enumeration too large).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mols/analysis.hpp"
#include "mols/baselines.hpp"
#include "mols/errors.hpp"
#include "mols/experiments.hpp"
#include "mols/io.hpp"
#include "mols/problem.hpp"
#include "mols/rng.hpp"
#include "mols/solvers.hpp"

namespace {

using namespace mols;

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

std::uint64_t hash_of(const std::string& text) {
  return fnv1a(text.data(), text.size());
}

SignalKind parse_kind(const std::string& kind) {
  if (kind == "gaussian") return SignalKind::gaussian;
  if (kind == "pam2") return SignalKind::pam2;
  throw CLI::ValidationError("--kind", "must be gaussian or pam2");
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  const auto first_colon = text.find(':');
  if (first_colon != std::string::npos) {
    double start, stop, step = 1.0;
    char sep1, sep2;
    std::istringstream in(text);
    if (!(in >> start >> sep1 >> stop) || sep1 != ':')
      throw CLI::ValidationError("--values", "expected start:stop[:step]");
    if (in >> sep2 >> step) {
      if (sep2 != ':' || step <= 0)
        throw CLI::ValidationError("--values", "expected start:stop:step");
    }
    for (double v = start; v <= stop + 1e-9; v += step) out.push_back(v);
  } else {
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(std::stod(item));
  }
  return out;
}

std::string recovery_csv(const RecoveryResult& result, std::uint64_t seed,
                         std::uint64_t spec_hash) {
  std::ostringstream out;
  out << provenance_line(seed, spec_hash) << '\n';
  out << "type,index,value\n";
  for (std::size_t i = 0; i < result.support.size(); ++i)
    out << "support," << result.support[i] << ','
        << format_g17(result.estimate.values[i]) << '\n';
  for (std::size_t k = 0; k < result.trace.size(); ++k)
    out << "iteration," << k + 1 << ','
        << format_g17(result.trace[k].residual_norm) << '\n';
  out << "termination," << result.iterations << ','
      << to_string(result.termination) << '\n';
  return out.str();
}

std::string rip_csv(const RipReport& report, std::uint64_t seed,
                    std::uint64_t spec_hash) {
  std::ostringstream out;
  out << provenance_line(seed, spec_hash) << '\n';
  out << "order,delta,lambda_min,lambda_max,witness\n";
  for (std::size_t i = 0; i < report.orders.size(); ++i) {
    out << report.orders[i] << ',' << format_g17(report.delta[i]) << ','
        << format_g17(report.eigen_extremes[i].first) << ','
        << format_g17(report.eigen_extremes[i].second) << ',';
    for (std::size_t j = 0; j < report.witness_support[i].size(); ++j)
      out << (j ? ";" : "") << report.witness_support[i][j];
    out << '\n';
  }
  return out.str();
}

struct GenOptions {
  int m = 128, n = 256, sparsity = 5;
  std::string kind = "gaussian";
  std::uint64_t seed = 0;
  bool no_normalize = false;
  double snr_db = 0.0;
  bool has_snr = false;
  std::string matrix_out, signal_out, y_out;
};

int cmd_gen(const GenOptions& opt) {
  SensingMatrix matrix =
      generate_gaussian_matrix(opt.m, opt.n, child_seed(opt.seed, 0),
                               !opt.no_normalize);
  SparseSignal signal = generate_sparse_signal(opt.n, opt.sparsity,
                                               parse_kind(opt.kind),
                                               child_seed(opt.seed, 1));
  ProblemInstance instance = make_instance(std::move(matrix), std::move(signal));
  if (opt.has_snr)
    instance = add_noise(instance, Snr::from_db(opt.snr_db),
                         child_seed(opt.seed, 2));
  if (!opt.matrix_out.empty()) write_matrix(opt.matrix_out, instance.matrix);
  if (!opt.signal_out.empty()) write_signal(opt.signal_out, *instance.truth);
  if (!opt.y_out.empty()) write_vector(opt.y_out, instance.y);
  return 0;
}

struct RecoverOptions {
  std::string matrix_path, y_path, truth_path, algorithm = "mols:L=1";
  int sparsity = 1;
  double epsilon_rel = 1e-6;
  std::uint64_t seed = 0;
  std::string out = "-";
};

int cmd_recover(const RecoverOptions& opt) {
  ProblemInstance instance;
  instance.matrix = read_matrix(opt.matrix_path);
  instance.y = read_vector(opt.y_path);
  if (instance.y.size() != instance.matrix.rows())
    throw std::runtime_error("dimension mismatch: y has " +
                             std::to_string(instance.y.size()) +
                             " entries, matrix has " +
                             std::to_string(instance.matrix.rows()) + " rows");
  if (!opt.truth_path.empty()) {
    SparseSignal truth = read_signal(opt.truth_path);
    if (truth.n != instance.matrix.cols())
      throw std::runtime_error("dimension mismatch: truth has n = " +
                               std::to_string(truth.n));
    instance.truth = std::move(truth);
  }
  AlgorithmSpec algorithm = parse_algorithm_spec(opt.algorithm);
  algorithm.epsilon_rel = opt.epsilon_rel;
  const RecoveryResult result =
      run_algorithm(algorithm, instance, opt.sparsity);
  const std::string spec = "recover;" + algorithm.id + ";K=" +
                           std::to_string(opt.sparsity) + ";eps=" +
                           format_g17(opt.epsilon_rel);
  write_text(opt.out, recovery_csv(result, opt.seed, hash_of(spec)));
  const bool flagged = result.termination == Termination::exhausted_candidates ||
                       result.termination == Termination::rank_deficient;
  return flagged ? 2 : 0;
}

struct RipOptions {
  std::string matrix_path;
  int max_order = 4;
  int threads = 0;
  std::uint64_t seed = 0;
  std::string out = "-";
};

int cmd_rip(const RipOptions& opt) {
  const SensingMatrix matrix = read_matrix(opt.matrix_path);
  const RipReport report = rip_bruteforce(matrix, opt.max_order, opt.threads);
  const std::string spec =
      "rip;order=" + std::to_string(opt.max_order) + ";" + opt.matrix_path;
  write_text(opt.out, rip_csv(report, opt.seed, hash_of(spec)));
  return 0;
}

struct VerifyOptions {
  std::string matrix_path;
  bool hadamard = false;
  int log2n = 4, drop_rows = 1;
  int m = 15, n = 16, sparsity = 2, width = 2, trials = 10;
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  bool has_snr = false;
  double epsilon_rel = -1.0;  // <0: 1e-6 noiseless, 0 noisy
  std::string kind = "gaussian";
  int threads = 0;
  std::string out = "-";
};

int cmd_verify(const VerifyOptions& opt) {
  SensingMatrix matrix;
  if (!opt.matrix_path.empty()) {
    matrix = read_matrix(opt.matrix_path);
  } else if (opt.hadamard) {
    matrix = hadamard_frame(opt.log2n, opt.drop_rows);
  } else {
    matrix = generate_gaussian_matrix(opt.m, opt.n, child_seed(opt.seed, 0),
                                      true);
  }
  const int order =
      std::min(max_rip_order(opt.sparsity, opt.width), matrix.cols());
  const RipReport rip = rip_bruteforce(matrix, order, opt.threads);

  const double eps_rel =
      opt.epsilon_rel >= 0.0 ? opt.epsilon_rel : (opt.has_snr ? 0.0 : 1e-6);
  std::vector<BoundCheck> checks;
  checks.push_back(recovery_condition(opt.sparsity, opt.width,
                                      rip.at(std::min(opt.width * opt.sparsity,
                                                      matrix.cols())),
                                      rip.at(opt.sparsity + 1)));
  for (int t = 0; t < opt.trials; ++t) {
    SparseSignal truth = generate_sparse_signal(
        matrix.cols(), opt.sparsity, parse_kind(opt.kind),
        child_seed(opt.seed, 1000 + t));
    ProblemInstance instance = make_instance(matrix, std::move(truth));
    if (opt.has_snr)
      instance = add_noise(instance, Snr::from_db(opt.snr_db),
                           child_seed(opt.seed, 2000 + t));
    AlgorithmParams params;
    params.sparsity = opt.sparsity;
    params.width = opt.width;
    params.epsilon = eps_rel * instance.y.norm();
    const RecoveryResult result = run_mols(instance, params);

    auto decay = residual_decay_check(result, rip, opt.sparsity, opt.width,
                                      instance.y.norm());
    auto probes =
        probe_checks_for_trace(instance, result, rip, opt.sparsity, opt.width);
    std::vector<BoundCheck> trial;
    trial.insert(trial.end(), decay.begin(), decay.end());
    trial.insert(trial.end(), probes.begin(), probes.end());
    if (opt.has_snr) {
      auto noisy = noisy_guarantee_check(result, instance, rip, opt.sparsity,
                                         opt.width, params.epsilon);
      trial.insert(trial.end(), noisy.begin(), noisy.end());
    }
    for (BoundCheck& c : trial) {
      c.name = "t" + std::to_string(t) + "." + c.name;
      checks.push_back(std::move(c));
    }
  }
  const std::string spec = "verify;K=" + std::to_string(opt.sparsity) + ";L=" +
                           std::to_string(opt.width) + ";trials=" +
                           std::to_string(opt.trials);
  write_text(opt.out, bound_checks_csv(checks, opt.seed, hash_of(spec)));
  return 0;
}

struct SweepOptions {
  std::string var = "K";
  std::string values = "5:20:5";
  int m = 128, n = 256, trials = 100, sparsity = 20;
  std::string kind = "gaussian";
  std::vector<std::string> algorithms;
  std::uint64_t seed = 0;
  double exact_tol = 1e-6;
  double snr_db = 0.0;
  bool has_snr = false;
  int threads = 0;
  std::string out = "-";
  std::string plot_out;
  std::vector<std::string> merge_paths;
};

int cmd_sweep(const SweepOptions& opt) {
  SweepSpec spec;
  spec.m = opt.m;
  spec.n = opt.n;
  spec.trials = opt.trials;
  spec.sparsity = opt.sparsity;
  spec.kind = parse_kind(opt.kind);
  spec.master_seed = opt.seed;
  spec.exact_tol = opt.exact_tol;
  if (opt.has_snr) spec.snr = Snr::from_db(opt.snr_db);
  if (opt.var == "K") {
    spec.variable = SweepVariable::sparsity;
  } else if (opt.var == "m") {
    spec.variable = SweepVariable::measurements;
  } else if (opt.var == "snr") {
    spec.variable = SweepVariable::snr_db;
  } else {
    throw CLI::ValidationError("--var", "must be K, m, or snr");
  }
  spec.values = parse_values(opt.values);
  for (const std::string& text : opt.algorithms)
    spec.algorithms.push_back(parse_algorithm_spec(text));
  if (spec.algorithms.empty())
    throw CLI::ValidationError("--alg", "at least one algorithm is required");

  SweepTable table = run_sweep(spec, opt.threads);
  for (const std::string& path : opt.merge_paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    merge_sweep_csv(table, buffer.str());
  }
  write_text(opt.out, sweep_table_csv(table));
  if (!opt.plot_out.empty()) write_text(opt.plot_out, sweep_plot_script(table));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse recovery toolbox: greedy solvers, isometry analysis, "
               "Monte-Carlo sweeps"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a key=value file");

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate instance files");
  gen_cmd->add_option("--m", gen.m, "measurement rows")->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "signal dimension")->capture_default_str();
  gen_cmd->add_option("--k", gen.sparsity, "sparsity")->capture_default_str();
  gen_cmd->add_option("--kind", gen.kind, "signal kind: gaussian or pam2")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "master seed")->capture_default_str();
  gen_cmd->add_flag("--no-normalize", gen.no_normalize,
                    "keep raw Gaussian columns");
  gen_cmd->add_option("--snr", gen.snr_db, "noise level in dB")
      ->each([&gen](const std::string&) { gen.has_snr = true; });
  gen_cmd->add_option("--matrix-out", gen.matrix_out, "matrix file path");
  gen_cmd->add_option("--signal-out", gen.signal_out, "signal file path");
  gen_cmd->add_option("--y-out", gen.y_out, "measurement file path");

  RecoverOptions rec;
  CLI::App* rec_cmd =
      app.add_subcommand("recover", "run one solver on instance files");
  rec_cmd->add_option("--matrix", rec.matrix_path, "matrix file")->required();
  rec_cmd->add_option("--y", rec.y_path, "measurement file")->required();
  rec_cmd->add_option("--truth", rec.truth_path, "optional truth signal file");
  rec_cmd->add_option("--k", rec.sparsity, "target sparsity")->required();
  rec_cmd->add_option("--alg", rec.algorithm,
                      "algorithm id, e.g. mols:L=2, ols, omp, cosamp, irls")
      ->capture_default_str();
  rec_cmd->add_option("--epsilon-rel", rec.epsilon_rel,
                      "residual stop relative to |y|")
      ->capture_default_str();
  rec_cmd->add_option("--seed", rec.seed, "seed recorded in provenance")
      ->capture_default_str();
  rec_cmd->add_option("--out", rec.out, "output CSV path, - for stdout")
      ->capture_default_str();

  RipOptions rip;
  CLI::App* rip_cmd =
      app.add_subcommand("rip", "brute-force isometry constants");
  rip_cmd->add_option("--matrix", rip.matrix_path, "matrix file")->required();
  rip_cmd->add_option("--max-order", rip.max_order, "largest support size")
      ->capture_default_str();
  rip_cmd->add_option("--threads", rip.threads, "worker threads, 0 = auto")
      ->capture_default_str();
  rip_cmd->add_option("--seed", rip.seed, "seed recorded in provenance")
      ->capture_default_str();
  rip_cmd->add_option("--out", rip.out, "output CSV path, - for stdout")
      ->capture_default_str();

  VerifyOptions ver;
  CLI::App* ver_cmd = app.add_subcommand(
      "verify", "run solver trials and check recovery and decay bounds");
  ver_cmd->add_option("--matrix", ver.matrix_path,
                      "matrix file (default: generated)");
  ver_cmd->add_flag("--hadamard", ver.hadamard,
                    "use the deterministic Hadamard-derived frame");
  ver_cmd->add_option("--log2n", ver.log2n, "Hadamard size exponent")
      ->capture_default_str();
  ver_cmd->add_option("--drop-rows", ver.drop_rows, "rows removed from it")
      ->capture_default_str();
  ver_cmd->add_option("--m", ver.m, "rows of the generated matrix")
      ->capture_default_str();
  ver_cmd->add_option("--n", ver.n, "columns of the generated matrix")
      ->capture_default_str();
  ver_cmd->add_option("--k", ver.sparsity, "sparsity")->capture_default_str();
  ver_cmd->add_option("--l", ver.width, "selection width")
      ->capture_default_str();
  ver_cmd->add_option("--trials", ver.trials, "seeded signal trials")
      ->capture_default_str();
  ver_cmd->add_option("--kind", ver.kind, "signal kind")->capture_default_str();
  ver_cmd->add_option("--seed", ver.seed, "master seed")->capture_default_str();
  ver_cmd->add_option("--snr", ver.snr_db, "noise level in dB")
      ->each([&ver](const std::string&) { ver.has_snr = true; });
  ver_cmd->add_option("--epsilon-rel", ver.epsilon_rel,
                      "residual stop relative to |y| "
                      "(default 1e-6 noiseless, 0 with --snr)");
  ver_cmd->add_option("--threads", ver.threads, "worker threads, 0 = auto")
      ->capture_default_str();
  ver_cmd->add_option("--out", ver.out, "output CSV path, - for stdout")
      ->capture_default_str();

  SweepOptions sw;
  CLI::App* sw_cmd = app.add_subcommand("sweep", "Monte-Carlo benchmark sweep");
  sw_cmd->add_option("--var", sw.var, "sweep variable: K, m, or snr")
      ->capture_default_str();
  sw_cmd->add_option("--values", sw.values,
                     "list v1,v2,... or range start:stop[:step]")
      ->capture_default_str();
  sw_cmd->add_option("--m", sw.m, "measurement rows")->capture_default_str();
  sw_cmd->add_option("--n", sw.n, "signal dimension")->capture_default_str();
  sw_cmd->add_option("--k", sw.sparsity, "sparsity when not swept")
      ->capture_default_str();
  sw_cmd->add_option("--trials", sw.trials, "trials per sweep point")
      ->capture_default_str();
  sw_cmd->add_option("--kind", sw.kind, "signal kind: gaussian or pam2")
      ->capture_default_str();
  sw_cmd->add_option("--alg", sw.algorithms,
                     "algorithm id (repeatable), e.g. mols:L=5 omp cosamp");
  sw_cmd->add_option("--seed", sw.seed, "master seed")->capture_default_str();
  sw_cmd->add_option("--exact-tol", sw.exact_tol,
                     "relative tolerance declaring exact recovery")
      ->capture_default_str();
  sw_cmd->add_option("--snr", sw.snr_db, "noise level in dB when not swept")
      ->each([&sw](const std::string&) { sw.has_snr = true; });
  sw_cmd->add_option("--threads", sw.threads, "worker threads, 0 = auto")
      ->capture_default_str();
  sw_cmd->add_option("--out", sw.out, "output CSV path, - for stdout")
      ->capture_default_str();
  sw_cmd->add_option("--plot", sw.plot_out, "write a gnuplot script here");
  sw_cmd->add_option("--merge", sw.merge_paths,
                     "merge rows from external result CSVs (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen);
    if (rec_cmd->parsed()) return cmd_recover(rec);
    if (rip_cmd->parsed()) return cmd_rip(rip);
    if (ver_cmd->parsed()) return cmd_verify(ver);
    if (sw_cmd->parsed()) return cmd_sweep(sw);
  } catch (const mols::EnumerationTooLargeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
