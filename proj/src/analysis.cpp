#include "mols/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mols/errors.hpp"
#include "mols/io.hpp"
#include "mols/linalg.hpp"
#include "mols/parallel.hpp"
#include "mols/problem.hpp"

namespace mols {

bool RipReport::has(int order) const {
  if (order == 0) return true;
  if (columns > 0 && order > columns) order = columns;
  for (int o : orders)
    if (o == order) return true;
  return false;
}

double RipReport::at(int order) const {
  if (order == 0) return 0.0;
  if (columns > 0 && order > columns) order = columns;
  for (std::size_t i = 0; i < orders.size(); ++i)
    if (orders[i] == order) return delta[i];
  throw MissingOrderError(order);
}

namespace {

std::uint64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<int> unrank_combination(int n, int s, std::uint64_t rank) {
  std::vector<int> combo(s);
  int x = 0;
  for (int i = 0; i < s; ++i) {
    while (true) {
      const std::uint64_t block = binom(n - 1 - x, s - 1 - i);
      if (rank < block) break;
      rank -= block;
      ++x;
    }
    combo[i] = x++;
  }
  return combo;
}

bool next_combination(std::vector<int>& c, int n) {
  const int s = static_cast<int>(c.size());
  int i = s - 1;
  while (i >= 0 && c[i] == n - s + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < s; ++j) c[j] = c[j - 1] + 1;
  return true;
}

struct Extreme {
  double dev = -1.0;
  std::vector<int> support;
  double lmin = 0.0;
  double lmax = 0.0;
};

void consider(Extreme& best, double dev, const std::vector<int>& support,
              double lmin, double lmax) {
  if (dev > best.dev || (dev == best.dev && support < best.support)) {
    best.dev = dev;
    best.support = support;
    best.lmin = lmin;
    best.lmax = lmax;
  }
}

}  // namespace

std::uint64_t rip_support_count(int n, int max_order) {
  std::uint64_t total = 0;
  for (int s = 1; s <= max_order; ++s) total += binom(n, s);
  return total;
}

RipReport rip_bruteforce(const SensingMatrix& matrix, int max_order,
                         int threads) {
  const int n = matrix.cols();
  if (max_order < 1 || max_order > n)
    throw std::invalid_argument("rip_bruteforce: order out of range");
  if (n > kMaxEnumColumns)
    throw EnumerationTooLargeError(rip_support_count(n, max_order));
  const std::uint64_t total_supports = rip_support_count(n, max_order);
  if (total_supports > kMaxEnumSupports)
    throw EnumerationTooLargeError(total_supports);

  const Eigen::MatrixXd gram =
      matrix.entries.transpose() * matrix.entries;  // n x n, shared

  RipReport report;
  report.columns = n;
  for (int s = 1; s <= max_order; ++s) {
    const std::uint64_t count = binom(n, s);
    const int workers =
        static_cast<int>(std::min<std::uint64_t>(resolve_threads(threads),
                                                 std::max<std::uint64_t>(count / 64, 1)));
    const std::uint64_t chunk = (count + workers - 1) / workers;
    std::vector<Extreme> local(workers);

    parallel_for(workers, workers, [&](int w) {
      const std::uint64_t begin = std::min<std::uint64_t>(w * chunk, count);
      const std::uint64_t end = std::min<std::uint64_t>(begin + chunk, count);
      if (begin >= end) return;
      std::vector<int> combo = unrank_combination(n, s, begin);
      Eigen::MatrixXd sub(s, s);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
      for (std::uint64_t r = begin; r < end; ++r) {
        for (int i = 0; i < s; ++i)
          for (int j = 0; j < s; ++j) sub(i, j) = gram(combo[i], combo[j]);
        eig.compute(sub, Eigen::EigenvaluesOnly);
        const double lmin = eig.eigenvalues()(0);
        const double lmax = eig.eigenvalues()(s - 1);
        consider(local[w], std::max(lmax - 1.0, 1.0 - lmin), combo, lmin, lmax);
        if (r + 1 < end) next_combination(combo, n);
      }
    });

    Extreme best;
    for (const Extreme& e : local)
      if (e.dev >= 0.0) consider(best, e.dev, e.support, e.lmin, e.lmax);

    report.orders.push_back(s);
    report.delta.push_back(best.dev);
    report.witness_support.push_back(best.support);
    report.eigen_extremes.emplace_back(best.lmin, best.lmax);
  }
  return report;
}

BoundCheck make_check(std::string name, double lhs, double rhs,
                      bool applicable, bool strict) {
  BoundCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.applicable = applicable;
  // Non-strict comparisons carry a 1e-9 relative slack for rounding dust;
  // strict ones (recovery thresholds) compare exactly.
  const double slack =
      1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
  c.satisfied = applicable && (strict ? lhs < rhs : lhs <= rhs + slack);
  return c;
}

double recovery_threshold(int sparsity, int width) {
  if (width > 1)
    return std::sqrt(static_cast<double>(width)) /
           (std::sqrt(static_cast<double>(sparsity)) +
            2.0 * std::sqrt(static_cast<double>(width)));
  return 1.0 / (std::sqrt(static_cast<double>(sparsity)) + 2.0);
}

BoundCheck recovery_condition(int sparsity, int width, double delta_lk,
                              double delta_k1) {
  if (sparsity < 1 || width < 1)
    throw std::invalid_argument("recovery_condition: K, L must be positive");
  const double measured = width > 1 ? delta_lk : delta_k1;
  return make_check("recovery_condition", measured,
                    recovery_threshold(sparsity, width), true,
                    /*strict=*/true);
}

double decay_factor(int k, int sparsity, int width, const RipReport& rip) {
  const double d_l = rip.at(width);
  const double d_lk = rip.at(width * k);
  const double d_lk1 = rip.at(width * k + 1);
  const double d_klk = rip.at(sparsity + width * k);
  const double numerator = width * (1.0 - d_lk - d_lk1 * d_lk1) *
                           (1.0 - d_klk) * (1.0 - d_klk);
  const double denominator =
      sparsity * (1.0 + d_l) * (1.0 - d_lk) * (1.0 + d_klk);
  return 1.0 - numerator / denominator;
}

std::vector<BoundCheck> residual_decay_check(const RecoveryResult& result,
                                             const RipReport& rip,
                                             int sparsity, int width,
                                             double y_norm) {
  std::vector<BoundCheck> checks;
  for (std::size_t t = 0; t < result.trace.size(); ++t) {
    const int k = static_cast<int>(t);
    const double d_lk = rip.at(width * k);
    const double alpha = decay_factor(k, sparsity, width, rip);
    const bool applicable = d_lk < 1.0 && alpha > 0.0 && alpha < 1.0;
    const double lhs = result.trace[t].residual_norm *
                       result.trace[t].residual_norm;
    const double rhs =
        applicable ? std::pow(alpha, k + 1) * y_norm * y_norm : 0.0;
    checks.push_back(make_check("residual_decay_k" + std::to_string(k), lhs,
                                rhs, applicable));
  }
  return checks;
}

std::vector<BoundCheck> iteration_bound_check(const IterationProbes& probes,
                                              const ProbeContext& context,
                                              const RipReport& rip,
                                              int sparsity, int width,
                                              bool noisy) {
  const int k = context.iteration;
  const int overlap = context.overlap;
  if (sparsity - overlap < 1)
    throw std::invalid_argument("iteration_bound_check: no missing indices");
  const std::string suffix = "_k" + std::to_string(k);

  const double d_a = rip.at(sparsity + width * k - overlap);
  const double d_b = rip.at(width * k);
  const double d_c = rip.at(width * k + 1);
  const double d_d = rip.at(width + sparsity - overlap);
  const double d_e = rip.at(width + width * k);
  const double missing = context.missing_energy;
  const double root_missing = std::sqrt(static_cast<double>(sparsity - overlap));

  std::vector<BoundCheck> checks;

  double u1_bound;
  if (noisy) {
    u1_bound = ((1.0 - d_a) * missing -
                std::sqrt(1.0 + d_a) * context.noise_norm) /
               root_missing;
  } else {
    u1_bound = (1.0 - d_a) * missing / root_missing;
  }
  checks.push_back(
      make_check("u1_lower" + suffix, u1_bound, probes.u1, d_a < 1.0));

  const double gap = 1.0 - d_b - d_c * d_c;
  const bool v_applicable = gap > 0.0 && d_b < 1.0;
  double v_bound = 0.0;
  if (v_applicable) {
    const double inflate = std::sqrt(1.0 + d_c * d_c / gap);
    const double cross = d_d + d_e * d_a / (1.0 - d_b);
    if (noisy) {
      v_bound = inflate *
                (cross * missing +
                 std::sqrt(1.0 + d_e) * context.noise_norm) /
                std::sqrt(static_cast<double>(width));
    } else {
      v_bound =
          inflate * cross * missing / std::sqrt(static_cast<double>(width));
    }
  }
  checks.push_back(
      make_check("vL_upper" + suffix, probes.vL, v_bound, v_applicable));
  return checks;
}

namespace {

int missing_true_indices(const std::vector<int>& truth,
                         const std::vector<int>& selected) {
  int missing = 0;
  for (int t : truth)
    if (std::find(selected.begin(), selected.end(), t) == selected.end())
      ++missing;
  return missing;
}

}  // namespace

std::vector<BoundCheck> noisy_guarantee_check(const RecoveryResult& result,
                                              const ProblemInstance& instance,
                                              const RipReport& rip,
                                              int sparsity, int width,
                                              double epsilon) {
  if (!instance.truth || !instance.noise)
    throw std::invalid_argument("noisy_guarantee_check: needs truth and noise");
  const SparseSignal& truth = *instance.truth;
  const double noise_norm = instance.noise->norm();
  const auto [snr, mar] = snr_and_mar(instance);
  const double distortion =
      (truth.to_dense() - result.estimate.to_dense()).norm();

  std::vector<BoundCheck> checks;

  const double d_k1 = rip.at(sparsity + 1);
  const double d_lk = rip.at(width * sparsity);
  BoundCheck rip_ok = recovery_condition(sparsity, width, d_lk, d_k1);
  checks.push_back(rip_ok);

  // SNR threshold for selecting the whole support within K iterations.
  double snr_threshold = 0.0;
  bool snr_applicable = false;
  const double root_k = std::sqrt(static_cast<double>(sparsity));
  if (width == 1) {
    const double denom = mar * (1.0 - (root_k + 2.0) * d_k1);
    snr_applicable = denom > 0.0;
    if (snr_applicable)
      snr_threshold = 2.0 * (1.0 + d_k1) * root_k / denom;
  } else {
    const double root_l = std::sqrt(static_cast<double>(width));
    const double denom = mar * (root_l - (root_k + 2.0 * root_l) * d_lk);
    snr_applicable = denom > 0.0;
    if (snr_applicable)
      snr_threshold = (root_l + 1.0) * (1.0 + d_lk) * root_k / denom;
  }
  BoundCheck snr_ok = make_check("snr_condition", snr_threshold,
                                 std::sqrt(snr), snr_applicable);
  checks.push_back(snr_ok);

  // Support containment and the post-K-iterations distortion bound.
  const bool ran_k = result.iterations == sparsity && !result.trace.empty() &&
                     (result.termination == Termination::reached_iteration_cap ||
                      result.termination == Termination::residual_below_epsilon);
  const bool guarantee_applies =
      rip_ok.satisfied && snr_ok.satisfied && ran_k;
  const int missing =
      result.trace.empty()
          ? truth.sparsity()
          : missing_true_indices(truth.support, result.trace.back().support);
  checks.push_back(make_check("support_containment",
                              static_cast<double>(missing), 0.0,
                              guarantee_applies));

  double dist_bound = 0.0;
  bool dist_applicable = guarantee_applies;
  if (width == 1) {
    const double d_k = rip.at(sparsity);
    dist_applicable = dist_applicable && d_k < 1.0;
    if (dist_applicable) dist_bound = noise_norm / std::sqrt(1.0 - d_k);
  } else {
    const double d_2k = rip.at(2 * sparsity);
    dist_applicable = dist_applicable && d_2k < 1.0 && d_lk < 1.0;
    if (dist_applicable)
      dist_bound = (1.0 + std::sqrt((1.0 - d_2k) / (1.0 - d_lk))) * 2.0 *
                   noise_norm / std::sqrt(1.0 + d_2k);
  }
  checks.push_back(make_check("distortion_k_iterations", distortion,
                              dist_bound, dist_applicable));

  // Distortion bound for runs that stopped on the residual threshold early.
  const bool eps_stop =
      result.termination == Termination::residual_below_epsilon &&
      result.iterations < sparsity;
  double eps_bound = 0.0;
  bool eps_applicable = false;
  if (eps_stop) {
    const double d_2k = rip.at(2 * sparsity);
    const double d_llk = rip.at(width * result.iterations + sparsity);
    eps_applicable = d_2k < 1.0 && d_llk < 1.0;
    if (eps_applicable) {
      eps_bound = (2.0 * epsilon * std::sqrt(1.0 - d_2k) +
                   2.0 * (std::sqrt(1.0 - d_2k) + std::sqrt(1.0 - d_llk)) *
                       noise_norm) /
                  std::sqrt((1.0 - d_llk) * (1.0 + d_2k));
    }
  }
  checks.push_back(
      make_check("distortion_eps_stop", distortion, eps_bound, eps_applicable));

  return checks;
}

std::vector<BoundCheck> probe_checks_for_trace(const ProblemInstance& instance,
                                               const RecoveryResult& result,
                                               const RipReport& rip,
                                               int sparsity, int width) {
  if (!instance.truth)
    throw std::invalid_argument("probe_checks_for_trace: needs ground truth");
  const SparseSignal& truth = *instance.truth;
  const bool noisy = instance.noise && instance.noise->norm() > 0.0;
  const double noise_norm = instance.noise ? instance.noise->norm() : 0.0;

  std::vector<BoundCheck> checks;
  IncrementalBasis basis = make_empty_basis(instance.matrix.rows());
  ProjectedNormTracker tracker(instance.matrix);
  Eigen::VectorXd residual = instance.y;

  for (std::size_t k = 0; k < result.trace.size(); ++k) {
    const auto probes = iteration_probes(instance.matrix, residual, basis,
                                         tracker, truth, width);
    if (probes) {
      ProbeContext context;
      context.iteration = static_cast<int>(k);
      context.overlap = truth.sparsity() - probes->missing_true;
      double energy = 0.0;
      for (int i = 0; i < truth.sparsity(); ++i) {
        const int idx = truth.support[i];
        if (std::find(basis.cols.begin(), basis.cols.end(), idx) ==
            basis.cols.end())
          energy += truth.values[i] * truth.values[i];
      }
      context.missing_energy = std::sqrt(energy);
      context.noise_norm = noise_norm;
      auto bounds = iteration_bound_check(*probes, context, rip, sparsity,
                                          width, noisy);
      checks.insert(checks.end(), bounds.begin(), bounds.end());

      int hits = 0;
      for (int idx : result.trace[k].selected)
        if (std::find(truth.support.begin(), truth.support.end(), idx) !=
            truth.support.end())
          ++hits;
      checks.push_back(make_check(
          "success_implication_k" + std::to_string(k), 1.0,
          static_cast<double>(hits), probes->u1 > probes->vL));
    }
    const int before = basis.size();
    append_columns(basis, instance.matrix, result.trace[k].selected);
    tracker.downdate(instance.matrix, basis, before);
    residual = residual_against(basis, instance.y);
  }
  return checks;
}

int max_rip_order(int sparsity, int width) {
  const int from_probes = sparsity + width * (sparsity - 1);
  return std::max(2 * sparsity, from_probes);
}

std::string bound_checks_csv(const std::vector<BoundCheck>& checks,
                             std::uint64_t seed, std::uint64_t spec_hash) {
  std::string out = provenance_line(seed, spec_hash) + "\n";
  out += "name,applicable,satisfied,lhs,rhs\n";
  for (const BoundCheck& c : checks) {
    out += c.name;
    out += c.applicable ? ",1," : ",0,";
    out += c.satisfied ? "1," : "0,";
    out += format_g17(c.lhs) + "," + format_g17(c.rhs) + "\n";
  }
  return out;
}

SensingMatrix hadamard_frame(int log2n, int drop_rows) {
  const int n = 1 << log2n;
  if (drop_rows < 0 || drop_rows >= n)
    throw std::invalid_argument("hadamard_frame: bad row count");
  Eigen::MatrixXd h(1, 1);
  h(0, 0) = 1.0;
  for (int k = 0; k < log2n; ++k) {
    Eigen::MatrixXd next(2 * h.rows(), 2 * h.cols());
    next << h, h, h, -h;
    h = std::move(next);
  }
  h /= std::sqrt(static_cast<double>(n));
  SensingMatrix out;
  out.entries = h.bottomRows(n - drop_rows);
  for (int j = 0; j < n; ++j) out.entries.col(j) /= out.entries.col(j).norm();
  out.normalized = true;
  return out;
}

}  // namespace mols
