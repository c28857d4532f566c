#pragma once

// Trajectory simulation of the protocol and Monte Carlo estimates of E T.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "herman/random_stream.hpp"
#include "herman/ring.hpp"

namespace herman {

/// 100 N^2.
std::int64_t default_step_cap(int ring_size);

/// Steps until one token remains. Throws StepCapError (run index 0) past `step_cap`;
/// step_cap <= 0 selects default_step_cap.
std::int64_t simulate_once(const Configuration& config, RandomStream& stream,
                           std::int64_t step_cap = 0);

struct SimStats {
  std::int64_t runs = 0;
  double mean = 0.0;
  double stderr_ = 0.0;  ///< sample standard deviation / sqrt(runs)
  std::pair<double, double> ci95{0.0, 0.0};
  std::int64_t min_steps = 0;
  std::int64_t max_steps = 0;
  std::uint64_t seed = 0;
  std::map<std::int64_t, std::int64_t> histogram;  ///< step count -> frequency

  friend bool operator==(const SimStats&, const SimStats&) = default;
};

/// Run i uses derive_stream(master_seed, i). Aggregation works on exact integer
/// sums, so the serial and parallel versions give identical SimStats. A breached
/// step cap throws StepCapError carrying the lowest offending run index.
SimStats estimate_serial(const Configuration& config, std::int64_t runs, std::uint64_t master_seed,
                         std::int64_t step_cap = 0);
SimStats estimate_parallel(const Configuration& config, std::int64_t runs,
                           std::uint64_t master_seed, std::int64_t step_cap = 0);
inline SimStats estimate(const Configuration& config, std::int64_t runs, std::uint64_t master_seed,
                         std::int64_t step_cap = 0) {
  return estimate_parallel(config, runs, master_seed, step_cap);
}

struct CouplingResult {
  int ring_size = 0;
  std::int64_t runs = 0;
  std::int64_t steps_checked = 0;
  bool pass = true;
  std::optional<std::string> mismatch;  ///< trace of the first failing run
};

/// Random bit rings evolved by bit_step next to their token configurations evolved
/// by apply_step under the same coins, until one token remains. N odd.
CouplingResult coupled_equivalence(int ring_size, std::int64_t runs, std::uint64_t master_seed);

/// N = 3: all 8 bit states against all 8 coin vectors, one step each.
CouplingResult coupled_equivalence_exhaustive_n3();

}  // namespace herman
