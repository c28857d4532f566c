#pragma once

// Machine-readable output. Every JSON object carries "schema": kSchemaVersion;
// the field lists are documented in the README.

#include <ostream>
#include <span>
#include <string>

#include "json.hpp"

#include "herman/markov.hpp"
#include "herman/montecarlo.hpp"
#include "herman/polynomial.hpp"
#include "herman/simplex_opt.hpp"

namespace herman {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

Json to_json(const SimStats& s);
/// {N, gaps, expected_time_num, expected_time_den, bound_num, bound_den, pass}
Json exact_record(const GapVector& g, const Rational& expected_time);
Json to_json(const IdentityReport& r);
Json to_json(const CriticalPointReport& r);
Json to_json(const ScanResult& r);
Json to_json(const ChainReport& r);
Json to_json(const DriftRecord& r);
Json to_json(const MomentTable& t);
Json to_json(const CouplingResult& r);
Json to_json(const GradientValidation& v, int k);

/// N,K,gaps,expected_time,expected_time_decimal,lyapunov,bound,pass
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);
/// K,starts,best_value,interior_best_value,violations
void write_scan_csv(std::ostream& out, std::span<const ScanResult> scans);
/// step_count,frequency
void write_histogram_csv(std::ostream& out, const SimStats& s);

}  // namespace herman
