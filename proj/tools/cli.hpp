#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spfit::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kOracleError = 3,
  kConvergenceAssert = 4,
  kCheckFailure = 5,
};

struct RunConfig {
  std::string command;
  std::string problem = "var_sine";
  std::string scheme = "fitted";
  std::string mesh = "uniform";
  std::string mesh_file;
  double spread = 0.5;
  double grading = 2.0;
  double c_mesh = 3.0;
  int eps_min_exp = -20;
  int eps_max_exp = 0;
  std::optional<double> eps;
  std::size_t n_min = 16;
  std::size_t n_max = 2048;
  std::optional<std::size_t> n;
  std::uint64_t seed = 1;
  std::string out = "-";
  bool assert_orders = false;
  std::size_t trials = 1000;
  std::optional<double> u0;
};

/// Runs one command line (without the program name). Diagnostics go to err,
/// CSV and reports to out unless --out names a file.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spfit::cli
