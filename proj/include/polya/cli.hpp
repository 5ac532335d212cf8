#pragma once

// Command-line front end. Every invocation prints exactly one JSON outcome
// document on stdout (floating-point quantities rendered as decimal strings);
// human-oriented progress and per-check lines go to stderr. Exit codes:
//   0  command ran and all asserted checks passed
//   1  command ran but at least one check failed
//   2  usage, domain, or I/O error
//
// `verify` bundles the identity suites; each check certifies an enclosure,
// never a point estimate.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polya/means.hpp"
#include "polya/moebius.hpp"
#include "polya/multiplicative.hpp"
#include "polya/precision.hpp"
#include "polya/scan.hpp"
#include "polya/theta.hpp"
#include "polya/zeta.hpp"

namespace polya::cli {

enum class Status { pass, fail, error };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    default: return "error";
  }
}

struct CommandOutcome {
  std::string command;
  std::map<std::string, std::string> params;
  Status status = Status::pass;
  nlohmann::json payload = nlohmann::json::object();
  std::int64_t elapsed_ms = 0;

  int exit_code() const {
    switch (status) {
      case Status::pass: return 0;
      case Status::fail: return 1;
      default: return 2;
    }
  }

  nlohmann::json to_json() const {
    return nlohmann::json{{"command", command},
                          {"params", params},
                          {"status", status_name(status)},
                          {"payload", payload},
                          {"elapsed_ms", elapsed_ms}};
  }
};

namespace detail {

struct CheckResult {
  std::string name;
  bool passed = false;
  nlohmann::json details = nlohmann::json::object();
};

using CheckList = std::vector<CheckResult>;

inline std::string sci(const real_t& x) { return x.str(3, std::ios_base::scientific); }

inline void push_check(CheckList& checks, std::ostream& log, std::string name, bool passed,
                       nlohmann::json details) {
  log << (passed ? "  [ok]   " : "  [FAIL] ") << name;
  if (!passed && details.contains("note")) log << "  (" << details["note"].get<std::string>() << ")";
  log << "\n";
  checks.push_back(CheckResult{std::move(name), passed, std::move(details)});
}

// An identity residual must enclose zero and be certified tight.
inline void check_zero_enclosure(CheckList& checks, std::ostream& log, const std::string& name,
                                 const BoundedValue& r, const real_t& tight) {
  const bool encloses = abs(r.value) <= r.error_bound;
  const bool is_tight = r.error_bound <= tight;
  nlohmann::json d{{"residual", sci(r.value)}, {"error_bound", sci(r.error_bound)}, {"tightness", sci(tight)}};
  if (!encloses) d["note"] = "enclosure misses zero";
  if (!is_tight) d["note"] = "error bound exceeds tightness target";
  push_check(checks, log, name, encloses && is_tight, std::move(d));
}

inline real_t tightness_target(const PrecisionContext& ctx) {
  return ldexp(real_t(1), 28 - static_cast<int>(ctx.precision_bits));
}

inline void run_step1_suite(CheckList& checks, std::ostream& log, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  const real_t tight = tightness_target(ctx);
  for (const char* xs : {"0.1", "0.25", "0.5", "1", "2"})
    check_zero_enclosure(checks, log, std::string("step1 residual at x=") + xs,
                         step1_residual(real_t(xs), ctx), tight);
}

inline void run_step2_suite(CheckList& checks, std::ostream& log, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  const real_t tight = tightness_target(ctx);
  for (const char* xs : {"0.1", "0.25", "0.5", "1", "2"})
    check_zero_enclosure(checks, log, std::string("step2 residual at x=") + xs,
                         step2_residual(real_t(xs), ctx), tight);
}

inline void run_theorem1_suite(CheckList& checks, std::ostream& log, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  for (const char* xs : {"0.05", "0.1", "0.2", "0.5"}) {
    const real_t x(xs);
    const BoundedValue r = theorem1_residual(x, ctx);
    const real_t cap = remainder_bound(x, ctx);
    // |S+(x) - (1/2 - c/sqrt(x))| must fit inside the theta-tail remainder.
    const bool ok = abs(r.value) <= cap + r.error_bound;
    push_check(checks, log, std::string("theorem1 gap within remainder at x=") + xs, ok,
               {{"gap", sci(r.value)}, {"error_bound", sci(r.error_bound)}, {"remainder_cap", sci(cap)}});
  }
  const int sign_low = s_plus(real_t("0.1"), ctx).certified_sign();
  push_check(checks, log, "S+ certified negative at x=0.1", sign_low == -1,
             {{"certified_sign", sign_low}});
  const int sign_high = s_plus(real_t("0.2"), ctx).certified_sign();
  push_check(checks, log, "S+ certified positive at x=0.2", sign_high == +1,
             {{"certified_sign", sign_high}});
}

inline void run_theta_suite(CheckList& checks, std::ostream& log, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  const real_t tight = tightness_target(ctx);
  for (const char* xs : {"0.1", "0.3", "1", "3", "10"})
    check_zero_enclosure(checks, log, std::string("theta functional residual at x=") + xs,
                         theta_functional_residual(real_t(xs), ctx), tight);
}

inline void run_lemma2_suite(CheckList& checks, std::ostream& log, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  BoundCalc bc(ctx);
  const real_t tight = tightness_target(ctx);
  for (const char* xs : {"-0.5", "0.1", "0.3", "0.5", "0.9"}) {
    const BoundedValue x = bc.exact(real_t(xs));
    const BoundedValue target = bc.sub(x, bc.scale2(bc.mul(x, x), 1));  // x - 2x^2
    const BoundedValue r = bc.sub(mobius_plus_series(x.value, ctx), target);
    check_zero_enclosure(checks, log, std::string("plus-series equals x-2x^2 at x=") + xs, r, tight);

    const BoundedValue rc = bc.sub(mobius_lambert_classic(x.value, ctx), x);
    check_zero_enclosure(checks, log, std::string("classic Lambert equals x at x=") + xs, rc, tight);
  }
  // Probing x -> 1-: values track x - 2x^2 on its way to the limit -1.
  const std::vector<real_t> probes{real_t("0.9"), real_t("0.99")};
  const auto probed = limit_probe(probes, ctx);
  BoundCalc pc(ctx);
  bool track = true;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const BoundedValue xb = pc.exact(probes[i]);
    const BoundedValue target = pc.sub(xb, pc.scale2(pc.mul(xb, xb), 1));
    const BoundedValue diff = pc.sub(probed[i], target);
    track = track && abs(diff.value) <= diff.error_bound && diff.error_bound <= tight;
  }
  push_check(checks, log, "limit probe tracks x-2x^2 toward -1", track,
             {{"probe_0.99", probed.back().value.str(8)}});
}

inline void run_corollary_suite(CheckList& checks, std::ostream& log, const PrecisionContext& ctx) {
  // The alternating 1/(2^n + 1) sum needs real depth: floor the precision.
  PrecisionContext local = ctx;
  local.precision_bits = std::max(local.precision_bits, 256u);
  ScopedPrecision scope(local.working_bits());
  const BoundedValue v = corollary_half(local);
  const real_t tau = ldexp(real_t(1), -180);
  const bool encloses = abs(v.value) <= v.error_bound;
  const bool certified_small = abs(v.value) + v.error_bound <= tau;
  nlohmann::json d{{"value", sci(v.value)}, {"error_bound", sci(v.error_bound)}, {"threshold", sci(tau)}};
  if (!certified_small) d["note"] = "certified magnitude exceeds 2^-180; series truncated too early";
  push_check(checks, log, "mu/(2^n+1) sums to zero (certified below 2^-180)", encloses && certified_small,
             std::move(d));
}

inline void run_dirichlet_suite(CheckList& checks, std::ostream& log, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  const auto check = dirichlet_quotient_check(real_t(2), 100000, ctx);
  const bool ok = abs(check.difference.value) <= check.tail_bound + check.difference.error_bound &&
                  check.tail_bound <= real_t("2e-5");
  push_check(checks, log, "partial lambda Dirichlet sum meets zeta(2s)/zeta(s) at s=2", ok,
             {{"difference", sci(check.difference.value)},
              {"tail_bound", sci(check.tail_bound)},
              {"quotient", check.quotient.value.str(20)}});
}

}  // namespace detail

/// Execute one CLI invocation. `args` excludes argv[0].
inline CommandOutcome run(const std::vector<std::string>& args) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();

  CommandOutcome outcome;
  auto finish = [&](Status s) {
    outcome.status = s;
    outcome.elapsed_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - started).count();
    return outcome;
  };

  CLI::App app{"Certified Liouville/Moebius toolkit"};
  app.require_subcommand(1);

  // --- sieve ---------------------------------------------------------------
  auto* sieve_cmd = app.add_subcommand("sieve", "Sieve lambda and mu over [lo, hi] to CSV");
  std::uint64_t sieve_lo = 1, sieve_hi = 1;
  std::string sieve_out;
  sieve_cmd->add_option("--lo", sieve_lo, "Lower end (>= 1)")->required();
  sieve_cmd->add_option("--hi", sieve_hi, "Upper end")->required();
  sieve_cmd->add_option("--out", sieve_out, "Output CSV path")->required();

  // --- scan ----------------------------------------------------------------
  auto* scan_cmd = app.add_subcommand("scan", "Scan summatory L and M up to a bound");
  std::uint64_t scan_to = 0;
  std::string scan_checkpoint, scan_report, scan_events;
  unsigned scan_threads = 0;
  std::size_t scan_segment = std::size_t{1} << 22;
  scan_cmd->add_option("--to", scan_to, "Scan up to this n")->required();
  scan_cmd->add_option("--checkpoint", scan_checkpoint, "Checkpoint file (resumed when present)");
  scan_cmd->add_option("--report", scan_report, "Write the report JSON here");
  scan_cmd->add_option("--events-csv", scan_events, "Write nonnegative events CSV here");
  scan_cmd->add_option("--threads", scan_threads, "Sieve worker threads (default: NT_THREADS or cores)");
  scan_cmd->add_option("--segment", scan_segment, "Segment length");

  // --- density -------------------------------------------------------------
  auto* density_cmd = app.add_subcommand("density", "Logarithmic density of {n : L(n) < 0}");
  std::uint64_t density_to = 0;
  density_cmd->add_option("--to", density_to, "Upper end of the range")->required();

  // --- eval ----------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a certified series at a point");
  std::string eval_series, eval_x;
  unsigned eval_prec = 128;
  std::size_t eval_max_terms = 4'000'000;
  eval_cmd->add_option("--series", eval_series, "One of: sminus, splus, phi, theta, lambert, lambert-plus")
      ->required()
      ->check(CLI::IsMember({"sminus", "splus", "phi", "theta", "lambert", "lambert-plus"}));
  eval_cmd->add_option("--x", eval_x, "Evaluation point (decimal string)")->required();
  eval_cmd->add_option("--prec", eval_prec, "Precision in bits (>= 53)");
  eval_cmd->add_option("--max-terms", eval_max_terms, "Series term budget");

  // --- crossing ------------------------------------------------------------
  auto* crossing_cmd = app.add_subcommand("crossing", "Certified sign crossing of S+ in [lo, hi]");
  std::string crossing_lo = "0.1", crossing_hi = "0.3";
  unsigned crossing_prec = 128;
  crossing_cmd->add_option("--lo", crossing_lo, "Left endpoint (S+ < 0)");
  crossing_cmd->add_option("--hi", crossing_hi, "Right endpoint (S+ > 0)");
  crossing_cmd->add_option("--prec", crossing_prec, "Precision in bits");

  // --- verify --------------------------------------------------------------
  auto* verify_cmd = app.add_subcommand("verify", "Run certified identity suites");
  std::string verify_suite = "all";
  unsigned verify_prec = 128;
  std::size_t verify_max_terms = 4'000'000;
  bool verify_json = false;
  verify_cmd
      ->add_option("--suite", verify_suite,
                   "step1, step2, theorem1, theta-fe, lemma2, corollary, dirichlet, or all")
      ->check(CLI::IsMember({"step1", "step2", "theorem1", "theta-fe", "lemma2", "corollary",
                             "dirichlet", "all"}));
  verify_cmd->add_option("--prec", verify_prec, "Precision in bits (>= 53)");
  verify_cmd->add_option("--max-terms", verify_max_terms, "Series term budget");
  verify_cmd->add_flag("--json", verify_json, "Include every check in the JSON payload");

  // --- zeta ----------------------------------------------------------------
  auto* zeta_cmd = app.add_subcommand("zeta", "Riemann zeta on the real ray s > 1");
  std::string zeta_s;
  unsigned zeta_prec = 128;
  zeta_cmd->add_option("--s", zeta_s, "Argument (decimal string, > 1 + 1e-6)")->required();
  zeta_cmd->add_option("--prec", zeta_prec, "Precision in bits (>= 53)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cerr << app.help() << std::flush;
    outcome.command = "help";
    outcome.payload["message"] = "help requested";
    return finish(Status::pass);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    outcome.command = "parse";
    outcome.payload["message"] = e.what();
    return finish(Status::error);
  }

  try {
    if (sieve_cmd->parsed()) {
      outcome.command = "sieve";
      outcome.params = {{"lo", std::to_string(sieve_lo)},
                        {"hi", std::to_string(sieve_hi)},
                        {"out", sieve_out}};
      SieveConfig config;
      const SignSegment seg = sieve_segment(sieve_lo, sieve_hi, config);
      std::ofstream out(sieve_out, std::ios::trunc);
      if (!out) throw std::runtime_error("cannot open output file: " + sieve_out);
      write_segment_csv(seg, out);
      if (!out.flush()) throw std::runtime_error("failed writing CSV: " + sieve_out);
      outcome.payload = {{"lo", seg.lo}, {"hi", seg.hi}, {"rows", seg.size()}, {"out", sieve_out}};
      return finish(Status::pass);
    }

    if (scan_cmd->parsed()) {
      outcome.command = "scan";
      unsigned threads = scan_threads;
      if (threads == 0) {
        if (const char* env = std::getenv("NT_THREADS")) threads = static_cast<unsigned>(std::atoi(env));
        if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
      }
      outcome.params = {{"to", std::to_string(scan_to)}, {"threads", std::to_string(threads)}};
      if (!scan_checkpoint.empty()) outcome.params["checkpoint"] = scan_checkpoint;

      std::optional<ScanCheckpoint> resume;
      if (!scan_checkpoint.empty()) {
        if (std::ifstream probe(scan_checkpoint); probe.good()) {
          resume = checkpoint_load_file(scan_checkpoint);
          std::cerr << "resuming from n = " << resume->next_n << "\n";
        }
      }

      ScanOptions options;
      options.threads = threads;
      options.segment_length = scan_segment;
      std::uint64_t next_progress_mark = 10'000'000;
      options.progress = [&](std::uint64_t n_done) {
        if (n_done >= next_progress_mark) {
          std::cerr << "progress: n = " << n_done << "\n";
          while (next_progress_mark <= n_done) next_progress_mark += 10'000'000;
        }
      };
      if (!scan_checkpoint.empty())
        options.checkpoint_sink = [&](const ScanCheckpoint& cp) {
          checkpoint_save_file(cp, scan_checkpoint);
        };

      const ScanReport report = scan_summatory(scan_to, resume, options);

      if (!scan_report.empty()) {
        std::ofstream out(scan_report, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open report file: " + scan_report);
        out << report_to_json(report).dump(2) << "\n";
      }
      if (!scan_events.empty()) {
        std::ofstream out(scan_events, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open events file: " + scan_events);
        write_events_csv(report, out);
      }
      outcome.payload = {{"n_max", report.n_max},
                         {"final_L", report.final_L},
                         {"final_M", report.final_M},
                         {"min_L", report.min_L},
                         {"max_L_on_range", report.max_L_on_range},
                         {"event_count", report.nonneg_events.size()}};
      if (report.first_positive_n) outcome.payload["first_positive_n"] = *report.first_positive_n;
      if (resume) outcome.payload["resumed_from_n"] = resume->next_n;
      return finish(Status::pass);
    }

    if (density_cmd->parsed()) {
      outcome.command = "density";
      outcome.params = {{"to", std::to_string(density_to)}};
      const double d = log_density_negative(density_to);
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.15g", d);
      outcome.payload = {{"n_max", density_to}, {"density", std::string(buf)}};
      return finish(Status::pass);
    }

    if (eval_cmd->parsed()) {
      outcome.command = "eval";
      outcome.params = {{"series", eval_series}, {"x", eval_x}, {"prec", std::to_string(eval_prec)}};
      const PrecisionContext ctx(eval_prec, eval_max_terms);
      ScopedPrecision scope(ctx.working_bits());
      const real_t x(eval_x);
      BoundedValue v;
      if (eval_series == "sminus") v = s_minus(x, ctx);
      else if (eval_series == "splus") v = s_plus(x, ctx);
      else if (eval_series == "phi") v = phi(x, ctx);
      else if (eval_series == "theta") v = theta(x, ctx);
      else if (eval_series == "lambert") v = mobius_lambert_classic(x, ctx);
      else v = mobius_plus_series(x, ctx);
      outcome.payload = {{"series", eval_series},
                         {"x", eval_x},
                         {"value", decimal_string(v.value, ctx)},
                         {"error_bound", detail::sci(v.error_bound)},
                         {"rendered", render_bounded(v, ctx)}};
      return finish(Status::pass);
    }

    if (crossing_cmd->parsed()) {
      outcome.command = "crossing";
      outcome.params = {{"lo", crossing_lo}, {"hi", crossing_hi}, {"prec", std::to_string(crossing_prec)}};
      const PrecisionContext ctx(crossing_prec);
      ScopedPrecision scope(ctx.working_bits());
      const CrossingInterval ci = find_sign_crossing(real_t(crossing_lo), real_t(crossing_hi), ctx);
      outcome.payload = {{"lo", decimal_string(ci.lo, ctx)},
                         {"hi", decimal_string(ci.hi, ctx)},
                         {"width", detail::sci(ci.hi - ci.lo)},
                         {"max_precision_bits_used", ci.max_precision_bits_used}};
      return finish(Status::pass);
    }

    if (verify_cmd->parsed()) {
      outcome.command = "verify";
      outcome.params = {{"suite", verify_suite}, {"prec", std::to_string(verify_prec)}};
      const PrecisionContext ctx(verify_prec, verify_max_terms);
      detail::CheckList checks;
      std::ostream& log = std::cerr;
      log << "suite " << verify_suite << " @ " << verify_prec << " bits\n";
      const bool all = verify_suite == "all";
      if (all || verify_suite == "step1") detail::run_step1_suite(checks, log, ctx);
      if (all || verify_suite == "step2") detail::run_step2_suite(checks, log, ctx);
      if (all || verify_suite == "theorem1") detail::run_theorem1_suite(checks, log, ctx);
      if (all || verify_suite == "theta-fe") detail::run_theta_suite(checks, log, ctx);
      if (all || verify_suite == "lemma2") detail::run_lemma2_suite(checks, log, ctx);
      if (all || verify_suite == "corollary") detail::run_corollary_suite(checks, log, ctx);
      if (all || verify_suite == "dirichlet") detail::run_dirichlet_suite(checks, log, ctx);

      std::size_t failed = 0;
      for (const auto& c : checks)
        if (!c.passed) ++failed;
      log << checks.size() - failed << "/" << checks.size() << " checks passed\n";

      outcome.payload = {{"suite", verify_suite},
                         {"checks_total", checks.size()},
                         {"checks_failed", failed}};
      if (verify_json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : checks)
          arr.push_back({{"name", c.name}, {"passed", c.passed}, {"details", c.details}});
        outcome.payload["checks"] = arr;
      }
      return finish(failed == 0 ? Status::pass : Status::fail);
    }

    if (zeta_cmd->parsed()) {
      outcome.command = "zeta";
      outcome.params = {{"s", zeta_s}, {"prec", std::to_string(zeta_prec)}};
      const PrecisionContext ctx(zeta_prec);
      ScopedPrecision scope(ctx.working_bits());
      const BoundedValue v = zeta_real(real_t(zeta_s), ctx);
      outcome.payload = {{"s", zeta_s},
                         {"value", decimal_string(v.value, ctx)},
                         {"error_bound", detail::sci(v.error_bound)},
                         {"rendered", render_bounded(v, ctx)}};
      return finish(Status::pass);
    }
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    outcome.payload["message"] = e.what();
    return finish(Status::error);
  } catch (const series_budget_error& e) {
    std::cerr << "series budget error: " << e.what() << "\n";
    outcome.payload["message"] = e.what();
    return finish(Status::error);
  } catch (const checkpoint_error& e) {
    std::cerr << "checkpoint error: " << e.what() << "\n";
    outcome.payload["message"] = e.what();
    return finish(Status::error);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    outcome.payload["message"] = e.what();
    return finish(Status::error);
  }

  outcome.payload["message"] = "no subcommand executed";
  return finish(Status::error);
}

}  // namespace polya::cli
