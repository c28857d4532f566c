#pragma once

// Command-line front end: simulate, exact, verify, optimize.
//
// Exit codes: 0 all checks pass, 1 a verification failed (or a step cap was
// hit), 2 usage or configuration error.

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace herman {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Settings shared by every subcommand. Precedence: flag > settings file >
/// HERMAN_LAB_THREADS (threads only) > the defaults below.
struct RunConfig {
  std::uint64_t seed = 1;
  int threads = 0;  ///< 0 leaves the OpenMP default
  int exact_capacity_n = 14;
  int float_capacity_n = 20;
  std::int64_t mc_runs = 100000;
  int opt_starts = 50;
  std::string output_format = "json";  ///< json | csv
};

/// Reads key=value lines ('#' starts a comment) into `cfg`. Unknown keys and
/// malformed values throw InvalidArgument.
void load_settings(std::istream& in, RunConfig& cfg);

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace herman
