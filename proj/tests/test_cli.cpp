#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mols/analysis.hpp"
#include "mols/io.hpp"
#include "mols/problem.hpp"

namespace fs = std::filesystem;
using namespace mols;

namespace {

const std::string kCli = MOLS_CLI_PATH;

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "mols_cli_out.txt";
  const std::string command =
      kCli + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(command.c_str());
  std::ifstream in(out);
  std::stringstream buffer;
  buffer << in.rdbuf();
  int code = -1;
  if (WIFEXITED(status)) code = WEXITSTATUS(status);
  return {code, buffer.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mols_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("help output enumerates subcommands and flags") {
  const RunResult top = run("--help");
  CHECK(top.exit_code == 0);
  for (const char* name : {"gen", "recover", "rip", "verify", "sweep"})
    CHECK(top.output.find(name) != std::string::npos);

  const RunResult sweep = run("sweep --help");
  CHECK(sweep.exit_code == 0);
  for (const char* flag :
       {"--var", "--values", "--m", "--n", "--k", "--trials", "--kind",
        "--alg", "--seed", "--exact-tol", "--snr", "--threads", "--out",
        "--plot", "--merge"})
    CHECK(sweep.output.find(flag) != std::string::npos);

  const RunResult recover = run("recover --help");
  for (const char* flag : {"--matrix", "--y", "--truth", "--k", "--alg",
                           "--epsilon-rel", "--seed", "--out"})
    CHECK(recover.output.find(flag) != std::string::npos);
}

TEST_CASE("recover on an identity instance") {
  TempDir dir;
  SensingMatrix eye;
  eye.entries = Eigen::MatrixXd::Identity(4, 4);
  write_matrix((dir.path / "phi.txt").string(), eye);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(4);
  y[2] = 1.5;
  write_vector((dir.path / "y.txt").string(), y);

  const fs::path out = dir.path / "result.csv";
  const RunResult r = run("recover --matrix " + (dir.path / "phi.txt").string() +
                          " --y " + (dir.path / "y.txt").string() +
                          " --k 1 --alg ols --out " + out.string());
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("support,2,1.5\n") != std::string::npos);
  CHECK(csv.find("termination,1,reached_iteration_cap") != std::string::npos);
}

TEST_CASE("recover output is byte-identical across runs") {
  TempDir dir;
  const RunResult gen = run("gen --m 16 --n 32 --k 3 --seed 9 --matrix-out " +
                            (dir.path / "phi.txt").string() + " --signal-out " +
                            (dir.path / "x.txt").string() + " --y-out " +
                            (dir.path / "y.txt").string());
  REQUIRE(gen.exit_code == 0);

  const std::string base = "recover --matrix " + (dir.path / "phi.txt").string() +
                           " --y " + (dir.path / "y.txt").string() +
                           " --k 3 --alg mols:L=2 --out ";
  const RunResult first = run(base + (dir.path / "a.csv").string());
  const RunResult second = run(base + (dir.path / "b.csv").string());
  CHECK(first.exit_code == 0);
  CHECK(second.exit_code == 0);
  const std::string a = slurp(dir.path / "a.csv");
  CHECK(a == slurp(dir.path / "b.csv"));
  CHECK(a.find("# mols 0.1.0") == 0);

  // The recovered support matches the generated signal.
  const SparseSignal truth = read_signal((dir.path / "x.txt").string());
  for (int idx : truth.support)
    CHECK(a.find("support," + std::to_string(idx) + ",") != std::string::npos);
}

TEST_CASE("recover rejects dimension mismatches with exit 1") {
  TempDir dir;
  write_matrix((dir.path / "phi.txt").string(),
               generate_gaussian_matrix(6, 8, 1, true));
  write_vector((dir.path / "y.txt").string(), Eigen::VectorXd::Zero(5));
  const RunResult r = run("recover --matrix " + (dir.path / "phi.txt").string() +
                          " --y " + (dir.path / "y.txt").string() + " --k 2");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("dimension") != std::string::npos);
}

TEST_CASE("recover flags degenerate solver outcomes with exit 2") {
  TempDir dir;
  write_matrix((dir.path / "phi.txt").string(),
               generate_gaussian_matrix(6, 3, 2, true));
  Eigen::VectorXd y = Eigen::VectorXd::Ones(6);
  write_vector((dir.path / "y.txt").string(), y);
  const RunResult r = run("recover --matrix " + (dir.path / "phi.txt").string() +
                          " --y " + (dir.path / "y.txt").string() +
                          " --k 3 --alg mols:L=2 --out -");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("exhausted_candidates") != std::string::npos);
}

TEST_CASE("rip subcommand") {
  TempDir dir;

  SUBCASE("identity deltas are zero") {
    SensingMatrix eye;
    eye.entries = Eigen::MatrixXd::Identity(6, 6);
    write_matrix((dir.path / "eye.txt").string(), eye);
    const RunResult r = run("rip --matrix " + (dir.path / "eye.txt").string() +
                            " --max-order 3 --out -");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("order,delta,lambda_min,lambda_max,witness\n") !=
          std::string::npos);
    CHECK(r.output.find("1,0,") != std::string::npos);
    CHECK(r.output.find("2,0,") != std::string::npos);
    CHECK(r.output.find("3,0,") != std::string::npos);
  }

  SUBCASE("duplicate columns reach delta 1") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 1.0;
    a.col(2) = a.col(0);
    SensingMatrix matrix;
    matrix.entries = a;
    write_matrix((dir.path / "dup.txt").string(), matrix);
    const RunResult r = run("rip --matrix " + (dir.path / "dup.txt").string() +
                            " --max-order 2 --out -");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("2,1,") != std::string::npos);
    CHECK(r.output.find("0;2") != std::string::npos);
  }

  SUBCASE("matches the library on a 12x16 fixture") {
    const SensingMatrix matrix = generate_gaussian_matrix(12, 16, 5, true);
    write_matrix((dir.path / "f.txt").string(), matrix);
    const fs::path out = dir.path / "rip.csv";
    const RunResult r = run("rip --matrix " + (dir.path / "f.txt").string() +
                            " --max-order 4 --seed 5 --out " + out.string());
    CHECK(r.exit_code == 0);
    const RipReport rip = rip_bruteforce(matrix, 4);
    const std::string csv = slurp(out);
    for (int s = 1; s <= 4; ++s) {
      std::ostringstream want;
      want << s << ',' << format_g17(rip.at(s)) << ',';
      CHECK(csv.find(want.str()) != std::string::npos);
    }
  }

  SUBCASE("oversized enumerations exit with code 3") {
    SensingMatrix wide;
    wide.entries = Eigen::MatrixXd::Random(2, 33);
    write_matrix((dir.path / "wide.txt").string(), wide);
    const RunResult r = run("rip --matrix " + (dir.path / "wide.txt").string() +
                            " --max-order 2 --out -");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("enumeration") != std::string::npos);
  }
}

TEST_CASE("verify subcommand reports satisfied checks on the frame fixture") {
  const RunResult r = run(
      "verify --hadamard --log2n 4 --drop-rows 1 --k 2 --l 2 --trials 3 "
      "--seed 4 --out -");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("name,applicable,satisfied,lhs,rhs\n") !=
        std::string::npos);
  CHECK(r.output.find("recovery_condition,1,1,") != std::string::npos);
  // No applicable-but-violated rows.
  std::istringstream lines(r.output);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("name,", 0) == 0) continue;
    CHECK(line.find(",1,0,") == std::string::npos);
  }
}

TEST_CASE("sweep subcommand: determinism across thread counts") {
  TempDir dir;
  const std::string base =
      "sweep --var K --values 2,4 --m 24 --n 48 --trials 6 --alg mols:L=2 "
      "--alg omp --seed 13 --out ";
  const RunResult one =
      run(base + (dir.path / "a.csv").string() + " --threads 1");
  const RunResult two =
      run(base + (dir.path / "b.csv").string() + " --threads 3");
  CHECK(one.exit_code == 0);
  CHECK(two.exit_code == 0);
  CHECK(slurp(dir.path / "a.csv") == slurp(dir.path / "b.csv"));
  CHECK(slurp(dir.path / "a.csv").find("algorithm,sweep_variable") !=
        std::string::npos);
}

TEST_CASE("sweep range syntax, plot output, and merge") {
  TempDir dir;
  const fs::path external = dir.path / "ext.csv";
  {
    std::ofstream out(external);
    out << "algorithm,sweep_variable,sweep_value,trials,frequency_exact,"
           "mean_mse,mean_iterations,failures\n";
    out << "bp,K,2,10,1,0,0,0\n";
  }
  const RunResult r = run("sweep --var K --values 2:4:2 --m 16 --n 32 "
                          "--trials 2 --alg ols --seed 1 --merge " +
                          external.string() + " --plot " +
                          (dir.path / "plot.gp").string() + " --out " +
                          (dir.path / "table.csv").string());
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(dir.path / "table.csv");
  CHECK(csv.find("ols,K,2,") != std::string::npos);
  CHECK(csv.find("ols,K,4,") != std::string::npos);
  CHECK(csv.find("bp,K,2,10,1") != std::string::npos);
  const std::string plot = slurp(dir.path / "plot.gp");
  CHECK(plot.find("$data0") != std::string::npos);
}

TEST_CASE("config file mirrors flags and flags win") {
  TempDir dir;
  const fs::path config = dir.path / "sweep.cfg";
  {
    std::ofstream out(config);
    out << "[sweep]\n";
    out << "var = K\n";
    out << "values = 2\n";
    out << "m = 16\n";
    out << "n = 32\n";
    out << "trials = 2\n";
    out << "alg = ols\n";
    out << "seed = 7\n";
  }
  const RunResult from_config =
      run("--config " + config.string() + " sweep --out -");
  CHECK(from_config.exit_code == 0);
  CHECK(from_config.output.find("ols,K,2,2,") != std::string::npos);

  const RunResult overridden =
      run("--config " + config.string() + " sweep --trials 3 --out -");
  CHECK(overridden.exit_code == 0);
  CHECK(overridden.output.find("ols,K,2,3,") != std::string::npos);
}

TEST_CASE("unknown flags are rejected") {
  const RunResult r = run("sweep --no-such-flag 1");
  CHECK(r.exit_code == 1);
}
