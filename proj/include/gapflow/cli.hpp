#ifndef GAPFLOW_CLI_HPP
#define GAPFLOW_CLI_HPP

#include <cstdint>
#include <string>

namespace gapflow {

struct RunConfig {
  std::string command;
  std::string input;
  std::string input_b;
  int m = -1;
  int m2 = -1;
  int l = -1;
  int N = -1;
  int grid = 21;
  std::uint64_t seed = 0;
  std::string out = "runs";
  double tol_ker = 1e-8;
  long long dense_cap = 4096;
  bool allow_outside_window = false;
  int threads = 0;  // 0 = GAPFLOW_THREADS or 1
};

// Exit codes: 0 pass, 1 certified failure, 2 invalid input.
int run(const RunConfig& config);

}  // namespace gapflow

#endif
