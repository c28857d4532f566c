#include "herman/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "herman/errors.hpp"
#include "herman/json_io.hpp"
#include "herman/lyapunov.hpp"
#include "herman/markov.hpp"
#include "herman/montecarlo.hpp"
#include "herman/polynomial.hpp"
#include "herman/simplex_opt.hpp"

namespace herman {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  in >> out;
  if (in.fail() || !in.eof()) throw InvalidArgument("bad value for " + key + ": " + value);
  return out;
}

void check_output_format(const std::string& f) {
  if (f != "json" && f != "csv") throw InvalidArgument("output_format must be json or csv");
}

struct Summary {
  std::string suite;
  int checks = 0;
  int failures = 0;

  void record(bool pass) {
    ++checks;
    if (!pass) ++failures;
  }
};

void print_line(std::ostream& out, const Json& j) { out << j.dump() << '\n'; }

void print_summary(std::ostream& out, const Summary& s) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "summary";
  j["suite"] = s.suite;
  j["checks"] = s.checks;
  j["failures"] = s.failures;
  j["verdict"] = s.failures == 0 ? "PASS" : "FAIL";
  print_line(out, j);
}

struct VerifyOptions {
  std::optional<int> max_k;
  std::optional<int> n;
  std::optional<int> samples;
  std::optional<int> starts;
  std::uint64_t seed = 1;
};

GapVector require_odd_gaps(const std::string& literal) {
  const GapVector g = gap_vector(parse_configuration(literal));
  if (g.token_count() % 2 == 0) {
    throw InvalidArgument("token count K must be odd (even K may never stabilize)");
  }
  return g;
}

// ---- verify suites --------------------------------------------------------

Summary verify_drift(const VerifyOptions& o, std::ostream& out) {
  Summary s{"drift"};
  const int max_n = o.n.value_or(30);
  const int samples = o.samples.value_or(200);
  const int max_k = o.max_k.value_or(9);
  if (max_n < 3) throw InvalidArgument("--n must be >= 3");
  if (samples < 1) throw InvalidArgument("--samples must be >= 1");
  for (int k = 3; k <= std::min(max_k, max_n); k += 2) {
    std::vector<GapVector> states;
    for (int i = 0; i < samples; ++i) {
      auto rng = derive_stream(o.seed, (static_cast<std::uint64_t>(k) << 32) | i);
      const int n = k + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_n - k + 1)));
      states.push_back(random_gap_vector(std::max(n, 3), k, rng));
    }
    for (const auto& rec : drift_records_parallel(states)) {
      print_line(out, to_json(rec));
      s.record(rec.pass());
    }
  }
  return s;
}

Summary verify_moments(const VerifyOptions& o, std::ostream& out) {
  Summary s{"moments"};
  const int max_k = o.max_k.value_or(11);
  for (int k = 3; k <= max_k; k += 2) {
    const auto table = verify_moment_table(k);
    print_line(out, to_json(table));
    s.record(table.mismatches.empty());
  }
  return s;
}

Summary verify_identities(const VerifyOptions& o, std::ostream& out) {
  Summary s{"identities"};
  const int max_k = o.max_k.value_or(13);
  for (int k = 5; k <= max_k; k += 2) {
    std::vector<IdentityReport> reports{check_continuity(k), check_rotation_sum_identity(k),
                                        check_fancy_sum(k, 3), check_fancy_sum(k, 5),
                                        check_corollary_sums(k), check_c_rotation_sum(k).report};
    for (const auto& r : reports) {
      print_line(out, to_json(r));
      s.record(r.pass);
    }
  }
  return s;
}

Summary verify_kkt(const VerifyOptions& o, const RunConfig& rc, std::ostream& out) {
  Summary s{"kkt"};
  const int max_k = o.max_k.value_or(9);
  const int samples = o.samples.value_or(100);
  OptimizerConfig cfg;
  cfg.starts = o.starts.value_or(200);
  cfg.seed = o.seed;

  for (int k = 3; k <= max_k; k += 2) {
    OptimizerConfig small = cfg;
    small.starts = rc.opt_starts;
    const auto best_f3 = maximize(Target::f3, k, small);
    const double closed = (1.0 - 1.0 / (k * k)) / 24.0;
    const bool f3_ok = std::abs(best_f3.value - closed) <= 1e-9;
    Json j3 = to_json(best_f3);
    j3["target"] = "f3";
    j3["closed_form"] = closed;
    j3["pass"] = f3_ok;
    print_line(out, j3);
    s.record(f3_ok);

    const auto best_f = maximize(Target::f, k, small);
    const bool f_ok = std::abs(best_f.value - 1.0 / 27.0) <= 1e-9;
    Json jf = to_json(best_f);
    jf["target"] = "f";
    jf["closed_form"] = 1.0 / 27.0;
    jf["pass"] = f_ok;
    print_line(out, jf);
    s.record(f_ok);
  }

  for (int k = 5; k <= max_k; k += 2) {
    const auto fd = gradient_fd_validation(k, samples, o.seed);
    Json j = to_json(fd, k);
    j["pass"] = fd.max_rel_err <= 1e-6;
    print_line(out, j);
    s.record(fd.max_rel_err <= 1e-6);

    const auto scan = interior_max_scan(k, cfg);
    print_line(out, to_json(scan));
    s.record(scan.pass());
  }

  for (int k : {5, 7}) {
    const Rational got = synthetic_alpha_threshold(k);
    const Rational expected = k == 5 ? make_rational(216, 11) : make_rational(72, 5);
    Json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "synthetic_threshold";
    j["K"] = k;
    j["threshold"] = to_fraction_string(got);
    j["expected"] = to_fraction_string(expected);
    j["pass"] = got == expected;
    print_line(out, j);
    s.record(got == expected);
  }

  if (max_k >= 7) {
    // The uniform point is a critical point that is not a maximum; it is reported,
    // not judged.
    const auto uniform = kkt_report(SimplexPoint<double>::uniform(7));
    Json j = to_json(uniform);
    j["note"] = "uniform K=7 saddle, recorded only";
    j["weighted_s_bound"] = 7.0 / kAlpha;
    print_line(out, j);
  }
  return s;
}

Summary verify_coupling(const VerifyOptions& o, std::ostream& out) {
  Summary s{"coupling"};
  const int max_n = o.n.value_or(15);
  const int runs = o.samples.value_or(10000);
  if (runs < 1) throw InvalidArgument("--samples must be >= 1");
  const auto exhaustive = coupled_equivalence_exhaustive_n3();
  print_line(out, to_json(exhaustive));
  s.record(exhaustive.pass);
  for (int n = 3; n <= max_n; n += 2) {
    const auto r = coupled_equivalence(n, runs, o.seed);
    print_line(out, to_json(r));
    s.record(r.pass);
  }
  return s;
}

// ---- subcommands ----------------------------------------------------------

int cmd_simulate(const std::string& config, std::int64_t runs, std::uint64_t seed,
                 const std::string& histogram_path, const RunConfig& rc, std::ostream& out,
                 std::ostream& err) {
  const Configuration z = parse_configuration(config);
  if (z.token_count() % 2 == 0) {
    throw InvalidArgument("token count K must be odd (even K may never stabilize)");
  }
  if (runs < 1) throw InvalidArgument("--runs must be >= 1");
  SimStats stats;
  try {
    stats = estimate_parallel(z, runs, seed);
  } catch (const StepCapError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
  if (rc.output_format == "csv") {
    out << "config,runs,mean,stderr,ci95_lo,ci95_hi,min_steps,max_steps,seed\n";
    std::ostringstream row;
    row.precision(17);
    row << '"' << config << "\"," << stats.runs << ',' << stats.mean << ',' << stats.stderr_ << ','
        << stats.ci95.first << ',' << stats.ci95.second << ',' << stats.min_steps << ','
        << stats.max_steps << ',' << stats.seed;
    out << row.str() << '\n';
  } else {
    Json j = to_json(stats);
    j["config"] = to_gap_literal(gap_vector(z));
    print_line(out, j);
  }
  if (!histogram_path.empty()) {
    std::ofstream h(histogram_path);
    if (!h) throw InvalidArgument("cannot open histogram file " + histogram_path);
    write_histogram_csv(h, stats);
  }
  return kExitPass;
}

int cmd_exact_config(const std::string& config, bool use_float, const RunConfig& rc,
                     std::ostream& out) {
  const GapVector g = require_odd_gaps(config);
  const SolverCapacity cap{rc.exact_capacity_n, rc.float_capacity_n};
  const Rational bound = conjectured_bound(g.ring_size());
  if (g.ring_size() <= cap.exact_max_n) {
    const Rational et = expected_time_exact(g, cap);
    if (rc.output_format == "csv") {
      out << "N,gaps,expected_time,bound,pass\n"
          << g.ring_size() << ",\"" << join_gaps(g) << "\"," << to_fraction_string(et) << ','
          << to_fraction_string(bound) << ',' << (et <= bound ? "true" : "false") << '\n';
    } else {
      Json j = exact_record(g, et);
      j["expected_time"] = to_fraction_string(et);
      print_line(out, j);
    }
    return et <= bound ? kExitPass : kExitFail;
  }
  if (!use_float) {
    throw CapacityError("N=" + std::to_string(g.ring_size()) + " exceeds exact capacity " +
                        std::to_string(cap.exact_max_n) + "; rerun with --float");
  }
  const double et = expected_time_float(g, cap);
  const double b = bound.get_d();
  const bool pass = et <= b * (1.0 + 1e-9);
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "exact_float";
  j["N"] = g.ring_size();
  j["gaps"] = g.gaps();
  j["expected_time"] = et;
  j["bound"] = b;
  j["pass"] = pass;
  print_line(out, j);
  return pass ? kExitPass : kExitFail;
}

int cmd_exact_sweep(int n, bool use_float, const RunConfig& rc, std::ostream& out) {
  if (n < 3) throw InvalidArgument("--sweep N needs N >= 3");
  const SolverCapacity cap{rc.exact_capacity_n, rc.float_capacity_n};
  if (n <= cap.exact_max_n) {
    const auto sweep = sweep_exact(n, cap);
    const bool max_ok = sweep.max.within_bound;
    const bool pass = sweep.pass && max_ok;
    const std::string verdict = pass ? "PASS" : "FAIL";
    if (rc.output_format == "json") {
      for (const auto& row : sweep.rows) {
        Json j = exact_record(row.gaps, row.expected_time);
        j["lyapunov"] = to_fraction_string(row.lyapunov);
        j["pass"] = row.pass;
        print_line(out, j);
      }
      Json j;
      j["schema"] = kSchemaVersion;
      j["kind"] = "sweep_summary";
      j["N"] = n;
      j["states"] = sweep.rows.size();
      j["max"] = to_fraction_string(sweep.max.value);
      j["argmax"] = sweep.max.argmax.gaps();
      j["bound"] = to_fraction_string(sweep.bound);
      j["verdict"] = verdict;
      print_line(out, j);
    } else {
      write_sweep_csv(out, sweep);
      out << "# verdict " << verdict << " max " << to_fraction_string(sweep.max.value) << " at "
          << join_gaps(sweep.max.argmax) << " bound " << to_fraction_string(sweep.bound) << '\n';
    }
    return pass ? kExitPass : kExitFail;
  }
  if (!use_float) {
    throw CapacityError("N=" + std::to_string(n) + " exceeds exact capacity " +
                        std::to_string(cap.exact_max_n) + "; rerun with --float");
  }
  if (n > cap.float_max_n) {
    throw CapacityError("N=" + std::to_string(n) + " exceeds float capacity " +
                        std::to_string(cap.float_max_n));
  }
  const auto solved = solve_expected_times_float(full_state_space(n));
  const double bound = conjectured_bound(n).get_d();
  bool pass = true;
  double best = -1.0;
  std::size_t arg = 0;
  if (rc.output_format == "csv") out << "N,K,gaps,expected_time,bound,pass\n";
  for (std::size_t i = 0; i < solved.space.size(); ++i) {
    const auto& g = solved.space.states()[i];
    const double et = solved.value[i];
    const bool ok = et <= bound * (1.0 + 1e-9);
    pass = pass && ok;
    if (et > best) {
      best = et;
      arg = i;
    }
    if (rc.output_format == "csv") {
      std::ostringstream row;
      row.precision(17);
      row << n << ',' << g.token_count() << ",\"" << join_gaps(g) << "\"," << et << ',' << bound
          << ',' << (ok ? "true" : "false");
      out << row.str() << '\n';
    } else {
      Json j;
      j["schema"] = kSchemaVersion;
      j["kind"] = "exact_float";
      j["N"] = n;
      j["gaps"] = g.gaps();
      j["expected_time"] = et;
      j["bound"] = bound;
      j["pass"] = ok;
      print_line(out, j);
    }
  }
  const std::string verdict = pass ? "PASS" : "FAIL";
  if (rc.output_format == "csv") {
    std::ostringstream line;
    line.precision(17);
    line << "# verdict " << verdict << " max " << best << " at "
         << join_gaps(solved.space.states()[arg]) << " bound " << bound << " residual "
         << solved.max_residual;
    out << line.str() << '\n';
  } else {
    Json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "sweep_summary";
    j["N"] = n;
    j["states"] = solved.space.size();
    j["max"] = best;
    j["argmax"] = solved.space.states()[arg].gaps();
    j["bound"] = bound;
    j["max_residual"] = solved.max_residual;
    j["verdict"] = verdict;
    print_line(out, j);
  }
  return pass ? kExitPass : kExitFail;
}

int cmd_verify(const std::string& suite, const VerifyOptions& o, const RunConfig& rc,
               std::ostream& out) {
  std::vector<Summary> results;
  if (suite == "drift" || suite == "all") results.push_back(verify_drift(o, out));
  if (suite == "moments" || suite == "all") results.push_back(verify_moments(o, out));
  if (suite == "identities" || suite == "all") results.push_back(verify_identities(o, out));
  if (suite == "kkt" || suite == "all") results.push_back(verify_kkt(o, rc, out));
  if (suite == "coupling" || suite == "all") results.push_back(verify_coupling(o, out));
  int failures = 0;
  for (const auto& s : results) {
    print_summary(out, s);
    failures += s.failures;
  }
  return failures == 0 ? kExitPass : kExitFail;
}

int cmd_optimize(const std::string& target_name, int k, int starts, std::uint64_t seed,
                 std::ostream& out) {
  const Target target = parse_target(target_name);
  OptimizerConfig cfg;
  cfg.starts = starts;
  cfg.seed = seed;
  const auto best = maximize(target, k, cfg);
  print_line(out, to_json(best));
  Json verdict;
  verdict["schema"] = kSchemaVersion;
  verdict["kind"] = "optimize_verdict";
  verdict["target"] = to_string(target);
  verdict["K"] = k;
  verdict["value"] = best.value;
  bool pass = true;
  if (target == Target::f) {
    verdict["bound"] = 1.0 / 27.0;
    pass = best.value <= 1.0 / 27.0 + 1e-9;
  } else if (target == Target::f3) {
    verdict["closed_form"] = (1.0 - 1.0 / (static_cast<double>(k) * k)) / 24.0;
  }
  verdict["verdict"] = pass ? "PASS" : "FAIL";
  print_line(out, verdict);
  return pass ? kExitPass : kExitFail;
}

}  // namespace

void load_settings(std::istream& in, RunConfig& cfg) {
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("settings line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "threads") {
      cfg.threads = parse_number<int>(key, value);
    } else if (key == "exact_capacity_n") {
      cfg.exact_capacity_n = parse_number<int>(key, value);
    } else if (key == "float_capacity_n") {
      cfg.float_capacity_n = parse_number<int>(key, value);
    } else if (key == "mc_runs") {
      cfg.mc_runs = parse_number<std::int64_t>(key, value);
    } else if (key == "opt_starts") {
      cfg.opt_starts = parse_number<int>(key, value);
    } else if (key == "output_format") {
      check_output_format(value);
      cfg.output_format = value;
    } else {
      throw InvalidArgument("unknown settings key: " + key);
    }
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Herman's protocol: simulation, exact expected times, verification suites"};
  app.name("herman_lab");
  app.require_subcommand(1);
  app.fallthrough();

  std::string settings_path;
  int threads = 0;
  std::string output_format;
  int exact_cap = 0;
  int float_cap = 0;
  app.add_option("--settings", settings_path, "key=value settings file");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads (0 = OpenMP default)");
  auto* format_opt = app.add_option("--output-format", output_format, "json or csv");
  auto* exact_cap_opt = app.add_option("--exact-capacity-n", exact_cap, "largest N solved exactly");
  auto* float_cap_opt = app.add_option("--float-capacity-n", float_cap, "largest N solved in double");

  std::uint64_t seed = 0;
  std::string config;

  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of E T");
  std::int64_t runs = 0;
  std::string histogram_path;
  sim->add_option("--config", config, "\"N=9;gaps=3,3,3\" or \"N=7;tokens=2,3,6\"")->required();
  auto* runs_opt = sim->add_option("--runs", runs, "number of runs");
  auto* sim_seed = sim->add_option("--seed", seed, "master seed");
  sim->add_option("--histogram", histogram_path, "write step_count,frequency CSV here");

  auto* exact = app.add_subcommand("exact", "exact expected stabilization time");
  int sweep_n = 0;
  bool use_float = false;
  auto* exact_config = exact->add_option("--config", config, "configuration literal");
  auto* sweep_opt = exact->add_option("--sweep", sweep_n, "every odd-K state of ring size N");
  exact_config->excludes(sweep_opt);
  exact->add_flag("--float", use_float, "allow the double-precision solver above exact capacity");

  auto* verify = app.add_subcommand("verify", "verification suites");
  std::string suite;
  VerifyOptions vo;
  int max_k = 0, vn = 0, samples = 0, vstarts = 0;
  verify->add_option("suite", suite, "drift|moments|identities|kkt|coupling|all")
      ->required()
      ->check(CLI::IsMember({"drift", "moments", "identities", "kkt", "coupling", "all"}));
  auto* max_k_opt = verify->add_option("--max-k", max_k, "largest token count");
  auto* n_opt = verify->add_option("--n", vn, "largest ring size");
  auto* samples_opt = verify->add_option("--samples", samples, "samples per K / runs per N");
  auto* vstarts_opt = verify->add_option("--starts", vstarts, "random starts per interior scan");
  auto* verify_seed = verify->add_option("--seed", seed, "master seed");

  auto* opt = app.add_subcommand("optimize", "maximise f3, f5 or f over the simplex");
  std::string target;
  int k = 0;
  int starts = 0;
  opt->add_option("--target", target, "f3, f5 or f")->required();
  opt->add_option("--k", k, "odd dimension K >= 3")->required();
  auto* starts_opt = opt->add_option("--starts", starts, "random starts");
  auto* opt_seed = opt->add_option("--seed", seed, "master seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    RunConfig rc;
    if (const char* env = std::getenv("HERMAN_LAB_THREADS"); env != nullptr && *env != '\0') {
      rc.threads = parse_number<int>("HERMAN_LAB_THREADS", env);
    }
    if (!settings_path.empty()) {
      std::ifstream in(settings_path);
      if (!in) throw InvalidArgument("cannot read settings file " + settings_path);
      load_settings(in, rc);
    }
    if (threads_opt->count() > 0) rc.threads = threads;
    if (format_opt->count() > 0) {
      check_output_format(output_format);
      rc.output_format = output_format;
    }
    if (exact_cap_opt->count() > 0) rc.exact_capacity_n = exact_cap;
    if (float_cap_opt->count() > 0) rc.float_capacity_n = float_cap;
    if (rc.threads < 0) throw InvalidArgument("threads must be >= 0");
    if (rc.threads > 0) omp_set_num_threads(rc.threads);

    if (sim->parsed()) {
      const std::int64_t r = runs_opt->count() > 0 ? runs : rc.mc_runs;
      const std::uint64_t s = sim_seed->count() > 0 ? seed : rc.seed;
      return cmd_simulate(config, r, s, histogram_path, rc, out, err);
    }
    if (exact->parsed()) {
      if (sweep_opt->count() > 0) return cmd_exact_sweep(sweep_n, use_float, rc, out);
      if (exact_config->count() == 0) throw InvalidArgument("exact needs --config or --sweep");
      return cmd_exact_config(config, use_float, rc, out);
    }
    if (verify->parsed()) {
      if (max_k_opt->count() > 0) vo.max_k = max_k;
      if (n_opt->count() > 0) vo.n = vn;
      if (samples_opt->count() > 0) vo.samples = samples;
      if (vstarts_opt->count() > 0) vo.starts = vstarts;
      vo.seed = verify_seed->count() > 0 ? seed : rc.seed;
      return cmd_verify(suite, vo, rc, out);
    }
    if (opt->parsed()) {
      const int st = starts_opt->count() > 0 ? starts : rc.opt_starts;
      const std::uint64_t s = opt_seed->count() > 0 ? seed : rc.seed;
      return cmd_optimize(target, k, st, s, out);
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapacityError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StepCapError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}

}  // namespace herman
