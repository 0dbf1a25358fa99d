#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Cholesky>
#include <cmath>

#include "helpers.hpp"
#include "mols/baselines.hpp"
#include "mols/problem.hpp"

using namespace mols;

namespace {

AlgorithmParams params_for(int sparsity, double epsilon = 0.0) {
  AlgorithmParams p;
  p.sparsity = sparsity;
  p.epsilon = epsilon;
  return p;
}

}  // namespace

TEST_CASE("cosamp is exact in one iteration on an orthonormal system") {
  const SensingMatrix q = testing::random_orthonormal(12, 8);
  SparseSignal x;
  x.n = 12;
  x.support = {1, 7, 10};
  x.values.resize(3);
  x.values << 1.0, -2.0, 0.5;
  const ProblemInstance instance = make_instance(q, x);
  const RecoveryResult result =
      run_cosamp(instance, params_for(3, default_epsilon(instance.y)));
  CHECK(result.iterations == 1);
  CHECK(result.termination == Termination::residual_below_epsilon);
  CHECK(result.support == x.support);
  CHECK(signal_distance(*instance.truth, result.estimate) <= 1e-10);
}

TEST_CASE("cosamp succeeds at easy sparsity on Gaussian instances") {
  int exact = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    const ProblemInstance instance =
        testing::random_instance(128, 256, 20, 4000 + t);
    const RecoveryResult result =
        run_cosamp(instance, params_for(20, default_epsilon(instance.y)));
    if (signal_distance(*instance.truth, result.estimate) <=
        1e-6 * instance.truth->norm())
      ++exact;
  }
  CHECK(exact == trials);
}

TEST_CASE("cosamp honors its iteration cap under noise") {
  const ProblemInstance noisy = add_noise(
      testing::random_instance(64, 128, 24, 99), Snr::from_db(5), 7);
  const RecoveryResult result = run_cosamp(noisy, params_for(24, 0.0));
  CHECK(result.trace.size() <= 50);
  CHECK(static_cast<int>(result.support.size()) == 24);
}

TEST_CASE("irls recovers a one-sparse signal") {
  const ProblemInstance instance = testing::random_instance(12, 24, 1, 3);
  const RecoveryResult result = run_irls(instance, params_for(1));
  CHECK(signal_distance(*instance.truth, result.estimate) <=
        1e-6 * instance.truth->norm());
  CHECK(result.support == instance.truth->support);
}

TEST_CASE("irls surrogate objective never increases") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ProblemInstance instance =
        testing::random_instance(32, 64, 5, 500 + seed);
    std::vector<double> objective;
    run_irls(instance, params_for(5), &objective);
    REQUIRE(objective.size() >= 2);
    for (std::size_t i = 1; i < objective.size(); ++i)
      CHECK(objective[i] <= objective[i - 1] * (1.0 + 1e-9) + 1e-12);
  }
}

TEST_CASE("irls stays reliable on 2-PAM signals near the l1 phase edge") {
  int exact = 0;
  const int trials = 40;
  for (int t = 0; t < trials; ++t) {
    const ProblemInstance instance =
        testing::random_instance(128, 256, 35, 7000 + t, SignalKind::pam2);
    const RecoveryResult result = run_irls(instance, params_for(35));
    if (signal_distance(*instance.truth, result.estimate) <=
        1e-6 * instance.truth->norm())
      ++exact;
  }
  CHECK(exact >= 36);  // measured 1.00 at 200 trials; 0.9 leaves slack
}

TEST_CASE("irls rejects overdetermined systems") {
  const ProblemInstance instance = testing::random_instance(16, 16, 2, 1);
  CHECK_THROWS_AS(run_irls(instance, params_for(2)), std::invalid_argument);
}

TEST_CASE("oracle least squares") {
  SUBCASE("noiseless oracle is exact") {
    const ProblemInstance instance = testing::random_instance(20, 40, 5, 11);
    const RecoveryResult result = run_oracle_ls(instance);
    CHECK(result.support == instance.truth->support);
    CHECK(signal_distance(*instance.truth, result.estimate) <= 1e-10);
  }

  SUBCASE("noisy oracle error equals the pseudoinverse of the noise") {
    const ProblemInstance noisy = add_noise(
        testing::random_instance(24, 48, 4, 12), Snr::from_db(15), 3);
    const RecoveryResult result = run_oracle_ls(noisy);
    Eigen::MatrixXd sub(24, 4);
    for (int i = 0; i < 4; ++i)
      sub.col(i) = noisy.matrix.entries.col(noisy.truth->support[i]);
    const Eigen::VectorXd pinv_noise =
        (sub.transpose() * sub).llt().solve(sub.transpose() * *noisy.noise);
    CHECK(signal_distance(*noisy.truth, result.estimate) ==
          doctest::Approx(pinv_noise.norm()).epsilon(1e-9));
  }

  SUBCASE("missing ground truth is an error") {
    ProblemInstance instance;
    instance.matrix = generate_gaussian_matrix(8, 16, 0, true);
    instance.y = Eigen::VectorXd::Zero(8);
    CHECK_THROWS_AS(run_oracle_ls(instance), std::invalid_argument);
  }
}

TEST_CASE("baselines keep the shared output contract") {
  const ProblemInstance noisy = add_noise(
      testing::random_instance(32, 64, 6, 21), Snr::from_db(25), 5);
  for (int which = 0; which < 3; ++which) {
    RecoveryResult result;
    if (which == 0) result = run_cosamp(noisy, params_for(6, 0.0));
    if (which == 1) result = run_irls(noisy, params_for(6));
    if (which == 2) result = run_oracle_ls(noisy);
    CHECK(static_cast<int>(result.support.size()) == 6);
    // LS-consistency of the returned estimate.
    auto [coeffs, residual] =
        ls_on_support(noisy.matrix, noisy.y, result.support);
    (void)residual;
    CHECK((coeffs - result.estimate.values).norm() <=
          1e-10 * (1.0 + coeffs.norm()));
  }
}
