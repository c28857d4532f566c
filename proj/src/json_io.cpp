#include "herman/json_io.hpp"

#include <charconv>
#include <sstream>

namespace herman {

namespace {

Json rational_pair(const Rational& r) {
  return Json::array({r.get_num().get_str(), r.get_den().get_str()});
}

// Shortest form that round-trips.
std::string decimal(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// get_d truncates; dividing two exactly representable doubles rounds correctly.
double nearest_double(const Rational& r) {
  const auto limit = mpz_class(1) << 53;
  if (abs(r.get_num()) <= limit && r.get_den() <= limit) {
    return r.get_num().get_d() / r.get_den().get_d();
  }
  return r.get_d();
}

}  // namespace

Json to_json(const SimStats& s) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "sim_stats";
  j["runs"] = s.runs;
  j["mean"] = s.mean;
  j["stderr"] = s.stderr_;
  j["ci95"] = Json::array({s.ci95.first, s.ci95.second});
  j["min_steps"] = s.min_steps;
  j["max_steps"] = s.max_steps;
  j["seed"] = s.seed;
  return j;
}

Json exact_record(const GapVector& g, const Rational& expected_time) {
  const Rational bound = conjectured_bound(g.ring_size());
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "exact";
  j["N"] = g.ring_size();
  j["gaps"] = g.gaps();
  j["expected_time_num"] = expected_time.get_num().get_str();
  j["expected_time_den"] = expected_time.get_den().get_str();
  j["bound_num"] = bound.get_num().get_str();
  j["bound_den"] = bound.get_den().get_str();
  j["pass"] = expected_time <= bound;
  return j;
}

Json to_json(const IdentityReport& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "identity";
  j["identity"] = r.identity;
  j["K"] = r.k;
  if (r.l) {
    j["l"] = *r.l;
  } else {
    j["l"] = nullptr;
  }
  j["pass"] = r.pass;
  j["missing_terms"] = r.missing_terms;
  j["extra_terms"] = r.extra_terms;
  return j;
}

Json to_json(const CriticalPointReport& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "critical_point";
  j["K"] = r.point.size();
  j["point"] = r.point;
  j["value"] = r.value;
  j["converged"] = r.converged;
  j["interior"] = r.interior;
  j["iterations"] = r.iterations;
  j["stationarity"] = r.stationarity;
  j["c_values"] = r.c_values;
  j["second_order"] = r.second_order;
  j["weighted_s_lhs"] = r.weighted_s_lhs;
  j["drop_terms_margin"] = r.drop_terms_margin;
  if (r.f5_bound_check) {
    j["f5_bound_check"] = *r.f5_bound_check;
  } else {
    j["f5_bound_check"] = nullptr;
  }
  return j;
}

Json to_json(const ScanResult& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "interior_scan";
  j["K"] = r.k;
  j["starts"] = r.starts;
  j["best_value"] = r.best_value;
  if (r.interior_best_value) {
    j["interior_best_value"] = *r.interior_best_value;
  } else {
    j["interior_best_value"] = nullptr;
  }
  j["interior_points"] = r.interior_points.size();
  j["violations"] = r.violations;
  j["conditional_violations"] = r.conditional_violations;
  j["pass"] = r.pass();
  return j;
}

Json to_json(const ChainReport& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "chain";
  j["applicable"] = r.applicable;
  j["reason"] = r.reason;
  j["c"] = r.c;
  j["c_sum_residual"] = r.c_sum_residual;
  j["weighted_c_lhs"] = r.weighted_c_lhs;
  j["weighted_c_rhs"] = r.weighted_c_rhs;
  j["weighted_s_lhs"] = r.weighted_s_lhs;
  j["weighted_s_rhs"] = r.weighted_s_rhs;
  j["alpha_f5"] = r.alpha_f5;
  if (r.implied_alpha) {
    j["implied_alpha"] = *r.implied_alpha;
  } else {
    j["implied_alpha"] = nullptr;
  }
  j["contradiction"] = r.contradiction;
  return j;
}

Json to_json(const DriftRecord& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "drift";
  j["N"] = r.gaps.ring_size();
  j["gaps"] = r.gaps.gaps();
  j["v3"] = {{"lhs", rational_pair(r.v3.lhs)}, {"rhs", rational_pair(r.v3.rhs)},
             {"pass", r.v3.pass}};
  if (r.v5) {
    j["v5"] = {{"lhs", rational_pair(r.v5->lhs)}, {"rhs", rational_pair(r.v5->rhs)},
               {"pass", r.v5->pass}};
  } else {
    j["v5"] = nullptr;
  }
  j["raw_f5"] = {{"raw", rational_pair(r.raw_f5.raw_expectation)},
                 {"merged", rational_pair(r.raw_f5.merged_expectation)},
                 {"rhs", rational_pair(r.raw_f5.rhs)},
                 {"pass", r.raw_f5.pass}};
  j["v_drift"] = {{"drift", rational_pair(r.v.drift)}, {"pass", r.v.pass}};
  j["v_identity"] = {{"lhs", rational_pair(r.v_identity.lhs)},
                     {"rhs", rational_pair(r.v_identity.rhs)},
                     {"pass", r.v_identity.pass}};
  j["pass"] = r.pass();
  return j;
}

Json to_json(const MomentTable& t) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "moments";
  j["K"] = t.k;
  j["single_blocks"] = t.single_blocks;
  j["block_pairs"] = t.block_pairs;
  Json mism = Json::array();
  for (const auto& m : t.mismatches) {
    mism.push_back({{"indices", m.indices},
                    {"enumerated", to_fraction_string(m.enumerated)},
                    {"expected", to_fraction_string(m.expected)}});
  }
  j["mismatches"] = mism;
  j["pass"] = t.mismatches.empty();
  return j;
}

Json to_json(const CouplingResult& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "coupling";
  j["N"] = r.ring_size;
  j["runs"] = r.runs;
  j["steps_checked"] = r.steps_checked;
  j["pass"] = r.pass;
  if (r.mismatch) {
    j["mismatch"] = *r.mismatch;
  } else {
    j["mismatch"] = nullptr;
  }
  return j;
}

Json to_json(const GradientValidation& v, int k) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "gradient_fd";
  j["K"] = k;
  j["max_rel_err"] = v.max_rel_err;
  j["max_rel_err_p"] = v.max_rel_err_p;
  j["max_rel_err_q"] = v.max_rel_err_q;
  j["max_rel_err_r"] = v.max_rel_err_r;
  return j;
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "N,K,gaps,expected_time,expected_time_decimal,lyapunov,bound,pass\n";
  const std::string bound = to_fraction_string(sweep.bound);
  for (const auto& row : sweep.rows) {
    out << sweep.ring_size << ',' << row.gaps.token_count() << ",\"" << join_gaps(row.gaps)
        << "\"," << to_fraction_string(row.expected_time) << ','
        << decimal(nearest_double(row.expected_time)) << ',' << to_fraction_string(row.lyapunov) << ','
        << bound << ',' << (row.pass ? "true" : "false") << '\n';
  }
}

void write_scan_csv(std::ostream& out, std::span<const ScanResult> scans) {
  out << "K,starts,best_value,interior_best_value,violations\n";
  for (const auto& s : scans) {
    out << s.k << ',' << s.starts << ',' << decimal(s.best_value) << ','
        << (s.interior_best_value ? decimal(*s.interior_best_value) : std::string()) << ','
        << s.violations << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const SimStats& s) {
  out << "step_count,frequency\n";
  for (const auto& [steps, count] : s.histogram) out << steps << ',' << count << '\n';
}

}  // namespace herman
