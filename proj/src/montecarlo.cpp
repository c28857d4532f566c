#include "herman/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "herman/errors.hpp"

namespace herman {

namespace {

void require_odd_tokens(const Configuration& config) {
  if (config.token_count() % 2 == 0) {
    throw InvalidArgument("token count K must be odd (even K may never stabilize)");
  }
}

struct Accumulator {
  std::int64_t runs = 0;
  unsigned __int128 sum = 0;
  unsigned __int128 sum_sq = 0;
  std::int64_t min_steps = std::numeric_limits<std::int64_t>::max();
  std::int64_t max_steps = 0;
  std::map<std::int64_t, std::int64_t> histogram;

  void add(std::int64_t steps) {
    ++runs;
    sum += static_cast<unsigned __int128>(steps);
    sum_sq += static_cast<unsigned __int128>(steps) * static_cast<unsigned __int128>(steps);
    min_steps = std::min(min_steps, steps);
    max_steps = std::max(max_steps, steps);
    ++histogram[steps];
  }

  void merge(const Accumulator& o) {
    runs += o.runs;
    sum += o.sum;
    sum_sq += o.sum_sq;
    min_steps = std::min(min_steps, o.min_steps);
    max_steps = std::max(max_steps, o.max_steps);
    for (const auto& [steps, count] : o.histogram) histogram[steps] += count;
  }

  SimStats finish(std::uint64_t seed) const {
    SimStats s;
    s.runs = runs;
    s.seed = seed;
    s.min_steps = min_steps;
    s.max_steps = max_steps;
    s.histogram = histogram;
    const long double n = static_cast<long double>(runs);
    const long double total = static_cast<long double>(sum);
    const long double mean = total / n;
    s.mean = static_cast<double>(mean);
    if (runs > 1) {
      // sum_sq - sum^2/n, formed so the cancellation happens in exact integers.
      const unsigned __int128 nn = static_cast<unsigned __int128>(runs);
      const unsigned __int128 scaled = sum_sq * nn - sum * sum;  // n^2 * biased variance
      const long double var =
          static_cast<long double>(scaled) / (n * static_cast<long double>(runs - 1));
      s.stderr_ = static_cast<double>(std::sqrt(var / n));
    }
    s.ci95 = {s.mean - 1.96 * s.stderr_, s.mean + 1.96 * s.stderr_};
    return s;
  }
};

void validate_estimate(const Configuration& config, std::int64_t runs) {
  require_odd_tokens(config);
  if (runs < 1) throw InvalidArgument("runs must be >= 1");
}

}  // namespace

std::int64_t default_step_cap(int ring_size) {
  return 100 * static_cast<std::int64_t>(ring_size) * ring_size;
}

std::int64_t simulate_once(const Configuration& config, RandomStream& stream,
                           std::int64_t step_cap) {
  require_odd_tokens(config);
  const std::int64_t cap = step_cap > 0 ? step_cap : default_step_cap(config.ring_size());
  Configuration z = config;
  std::int64_t steps = 0;
  while (z.token_count() > 1) {
    if (steps >= cap) throw StepCapError(0, cap);
    z = random_step(z, stream);
    ++steps;
  }
  return steps;
}

SimStats estimate_serial(const Configuration& config, std::int64_t runs, std::uint64_t master_seed,
                         std::int64_t step_cap) {
  validate_estimate(config, runs);
  Accumulator acc;
  for (std::int64_t i = 0; i < runs; ++i) {
    auto stream = derive_stream(master_seed, static_cast<std::uint64_t>(i));
    try {
      acc.add(simulate_once(config, stream, step_cap));
    } catch (const StepCapError& e) {
      throw StepCapError(i, e.cap());
    }
  }
  return acc.finish(master_seed);
}

SimStats estimate_parallel(const Configuration& config, std::int64_t runs,
                           std::uint64_t master_seed, std::int64_t step_cap) {
  validate_estimate(config, runs);
  Accumulator total;
  std::int64_t first_breach = std::numeric_limits<std::int64_t>::max();
  std::int64_t breach_cap = 0;
#pragma omp parallel
  {
    Accumulator local;
    std::int64_t local_breach = std::numeric_limits<std::int64_t>::max();
    std::int64_t local_cap = 0;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < runs; ++i) {
      auto stream = derive_stream(master_seed, static_cast<std::uint64_t>(i));
      try {
        local.add(simulate_once(config, stream, step_cap));
      } catch (const StepCapError& e) {
        if (i < local_breach) {
          local_breach = i;
          local_cap = e.cap();
        }
      }
    }
#pragma omp critical
    {
      total.merge(local);
      if (local_breach < first_breach) {
        first_breach = local_breach;
        breach_cap = local_cap;
      }
    }
  }
  if (first_breach != std::numeric_limits<std::int64_t>::max()) {
    throw StepCapError(first_breach, breach_cap);
  }
  return total.finish(master_seed);
}

namespace {

std::string bits_string(const BitRing& ring) {
  std::string s;
  for (bool b : ring.bits) s.push_back(b ? '1' : '0');
  return s;
}

std::string coins_string(const std::vector<bool>& coins) {
  std::string s;
  for (bool b : coins) s.push_back(b ? '1' : '0');
  return s;
}

}  // namespace

CouplingResult coupled_equivalence(int ring_size, std::int64_t runs, std::uint64_t master_seed) {
  if (ring_size < 3 || ring_size % 2 == 0) throw InvalidArgument("N must be odd and >= 3");
  if (runs < 1) throw InvalidArgument("runs must be >= 1");
  CouplingResult out;
  out.ring_size = ring_size;
  out.runs = runs;
  const std::int64_t cap = default_step_cap(ring_size);
  std::vector<bool> coins(static_cast<std::size_t>(ring_size));
  for (std::int64_t run = 0; run < runs && out.pass; ++run) {
    auto stream = derive_stream(master_seed, static_cast<std::uint64_t>(run));
    BitRing ring{std::vector<bool>(static_cast<std::size_t>(ring_size))};
    for (int p = 0; p < ring_size; ++p) ring.bits[p] = stream.coin();
    Configuration config = config_from_bits(ring);
    std::ostringstream trace;
    trace << "N=" << ring_size << " run " << run << "\n  bits " << bits_string(ring) << "  "
          << to_token_literal(config) << "\n";
    std::int64_t steps = 0;
    while (config.token_count() > 1) {
      if (steps >= cap) throw StepCapError(run, cap);
      for (int p = 0; p < ring_size; ++p) coins[p] = stream.coin();
      ring = bit_step(ring, coins);
      config = apply_step(config, coupled_mask(config, coins));
      ++steps;
      ++out.steps_checked;
      const Configuration extracted = config_from_bits(ring);
      trace << "  coins " << coins_string(coins) << " -> bits " << bits_string(ring) << "  "
            << to_token_literal(extracted) << " vs " << to_token_literal(config) << "\n";
      if (!(extracted == config)) {
        out.pass = false;
        out.mismatch = trace.str();
        break;
      }
    }
  }
  return out;
}

CouplingResult coupled_equivalence_exhaustive_n3() {
  CouplingResult out;
  out.ring_size = 3;
  for (unsigned state = 0; state < 8; ++state) {
    for (unsigned word = 0; word < 8; ++word) {
      BitRing ring{{(state & 1U) != 0, (state & 2U) != 0, (state & 4U) != 0}};
      const std::vector<bool> coins{(word & 1U) != 0, (word & 2U) != 0, (word & 4U) != 0};
      const Configuration config = config_from_bits(ring);
      const Configuration expected = apply_step(config, coupled_mask(config, coins));
      const Configuration actual = config_from_bits(bit_step(ring, coins));
      ++out.runs;
      ++out.steps_checked;
      if (!(expected == actual)) {
        out.pass = false;
        std::ostringstream trace;
        trace << "bits " << bits_string(ring) << " coins " << coins_string(coins) << ": "
              << to_token_literal(actual) << " vs " << to_token_literal(expected);
        out.mismatch = trace.str();
        return out;
      }
    }
  }
  return out;
}

}  // namespace herman
