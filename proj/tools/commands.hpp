#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace netopt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitSuiteFailed = 2;

/// Resolved experiment settings. Sources are layered CLI > config file >
/// environment (workers only) > defaults.
struct ExperimentConfig {
  std::string graph = "path:4";  // file path, or path:N / cycle:N
  int q = 2;
  double beta = 0.2;
  std::size_t T = 200;
  std::string mu0 = "uniform";   // or a file with one row of q probabilities per vertex
  std::string mode = "exact";    // exact | montecarlo
  std::size_t replicas = 1000;
  std::uint64_t seed = 7;
  std::string schedule;          // schedule file; empty means generate
  std::string generator = "iid"; // iid | shocks
  double amplitude = 1.0;
  std::size_t epoch_mean = 25;
  std::vector<std::size_t> checkpoints{5, 20, 50};
  std::string output_dir = ".";
  std::size_t dense_cap = 65536;
  std::size_t ot_cap = 256;
  bool allow_large = false;
  std::size_t workers = 1;
  bool trajectory = false;

  nlohmann::json to_json() const;
};

/// Full command line: `netopt <simulate|verify|bounds|gen|oracle> [options]`.
/// Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netopt::cli
