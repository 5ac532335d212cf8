#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "polya/cli.hpp"

using namespace polya;
using cli::CommandOutcome;
using cli::Status;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("eval splus produces the frozen value as a decimal string") {
  const CommandOutcome out = cli::run({"eval", "--series", "splus", "--x", "0.5"});
  CHECK(out.status == Status::pass);
  CHECK(out.exit_code() == 0);
  CHECK(out.command == "eval");
  const auto value = out.payload.at("value").get<std::string>();
  CHECK(value.substr(0, 38) == "0.123312932828575047105777244165625438");
  CHECK(out.payload.at("error_bound").get<std::string>().find("e-") != std::string::npos);
  CHECK(out.params.at("x") == "0.5");
}

TEST_CASE("eval parses x at working precision") {
  // phi(0.9) computed from the string "0.9", not from the nearest double.
  const CommandOutcome out = cli::run({"eval", "--series", "phi", "--x", "0.9", "--prec", "192"});
  CHECK(out.status == Status::pass);
  PrecisionContext ctx(192);
  ScopedPrecision scope(ctx.working_bits());
  const real_t got(out.payload.at("value").get<std::string>());
  const real_t expect = phi(real_t("0.9"), ctx).value;
  CHECK(abs(got - expect) < real_t("1e-50"));
}

TEST_CASE("zeta subcommand wraps zeta_real") {
  const CommandOutcome out = cli::run({"zeta", "--s", "2", "--prec", "128"});
  CHECK(out.exit_code() == 0);
  const auto value = out.payload.at("value").get<std::string>();
  CHECK(value.substr(0, 40) == "1.64493406684822643647241516664602518921");
}

TEST_CASE("crossing subcommand reports a certified interval") {
  const CommandOutcome out = cli::run({"crossing", "--lo", "0.1", "--hi", "0.3"});
  REQUIRE(out.exit_code() == 0);
  PrecisionContext ctx(128);
  ScopedPrecision scope(ctx.working_bits());
  const real_t lo(out.payload.at("lo").get<std::string>());
  const real_t hi(out.payload.at("hi").get<std::string>());
  const real_t reference("0.1718238609720942118392750946100364034");
  CHECK(lo <= reference);
  CHECK(reference <= hi);
  CHECK(hi - lo <= ldexp(real_t(1), -40));
}

TEST_CASE("verify suites pass at default precision") {
  for (const char* suite : {"step1", "theta-fe", "lemma2", "corollary", "dirichlet"}) {
    CAPTURE(suite);
    const CommandOutcome out = cli::run({"verify", "--suite", suite});
    CHECK(out.exit_code() == 0);
    CHECK(out.payload.at("checks_failed").get<std::size_t>() == 0);
    CHECK(out.payload.at("checks_total").get<std::size_t>() >= 1);
  }
}

TEST_CASE("verify --json embeds per-check details") {
  const CommandOutcome out = cli::run({"verify", "--suite", "step2", "--json"});
  CHECK(out.exit_code() == 0);
  REQUIRE(out.payload.contains("checks"));
  const auto& checks = out.payload.at("checks");
  REQUIRE(checks.is_array());
  CHECK(checks.size() == 5);
  for (const auto& c : checks) {
    CHECK(c.at("passed").get<bool>());
    CHECK(c.at("details").contains("residual"));
  }
}

TEST_CASE("a starved corollary verification fails with exit code 1") {
  const CommandOutcome out = cli::run({"verify", "--suite", "corollary", "--max-terms", "150"});
  CHECK(out.status == Status::fail);
  CHECK(out.exit_code() == 1);
  CHECK(out.payload.at("checks_failed").get<std::size_t>() == 1);
}

TEST_CASE("domain errors exit with code 2") {
  const CommandOutcome out = cli::run({"eval", "--series", "phi", "--x", "-1"});
  CHECK(out.status == Status::error);
  CHECK(out.exit_code() == 2);
  CHECK(out.payload.contains("message"));
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(cli::run({"eval", "--series", "nonsense", "--x", "0.5"}).exit_code() == 2);
  CHECK(cli::run({"frobnicate"}).exit_code() == 2);
  CHECK(cli::run({}).exit_code() == 2);
  CHECK(cli::run({"zeta"}).exit_code() == 2);  // missing required --s
}

TEST_CASE("help is not an error") {
  CHECK(cli::run({"--help"}).exit_code() == 0);
}

TEST_CASE("outcome JSON round-trips") {
  const CommandOutcome out = cli::run({"zeta", "--s", "4"});
  const nlohmann::json j = out.to_json();
  const nlohmann::json back = nlohmann::json::parse(j.dump());
  CHECK(back == j);
  CHECK(back.at("command") == "zeta");
  CHECK(back.at("status") == "pass");
  CHECK(back.at("payload").at("s") == "4");
  CHECK(back.contains("elapsed_ms"));
}

TEST_CASE("sieve subcommand writes the CSV") {
  TempFile csv("cli_sieve_out.csv");
  const CommandOutcome out = cli::run({"sieve", "--lo", "1", "--hi", "10", "--out", csv.path});
  CHECK(out.exit_code() == 0);
  CHECK(out.payload.at("rows").get<std::size_t>() == 10);
  CHECK(slurp(csv.path) ==
        "n,lambda,mu\n1,1,1\n2,-1,-1\n3,-1,-1\n4,1,0\n5,-1,-1\n"
        "6,1,1\n7,-1,-1\n8,-1,0\n9,1,0\n10,1,1\n");
}

TEST_CASE("scan subcommand writes report, events, and checkpoint") {
  TempFile report("cli_scan_report.json");
  TempFile events("cli_scan_events.csv");
  TempFile checkpoint("cli_scan_cp.json");

  const CommandOutcome out = cli::run({"scan", "--to", "100000", "--threads", "1",
                                       "--report", report.path, "--events-csv", events.path,
                                       "--checkpoint", checkpoint.path});
  REQUIRE(out.exit_code() == 0);
  CHECK(out.payload.at("final_L").get<long long>() == -288);
  CHECK(out.payload.at("final_M").get<long long>() == -48);
  CHECK(out.payload.at("min_L").get<long long>() == -414);
  CHECK(out.payload.at("event_count").get<std::size_t>() == 9);
  CHECK_FALSE(out.payload.contains("first_positive_n"));

  const ScanReport r = report_from_json(nlohmann::json::parse(slurp(report.path)));
  CHECK(r.final_L == -288);
  CHECK(r.nonneg_events.size() == 9);

  CHECK(slurp(events.path) == "n,L\n2,0\n4,0\n6,0\n10,0\n16,0\n26,0\n40,0\n96,0\n586,0\n");

  const ScanCheckpoint cp = checkpoint_load_file(checkpoint.path);
  CHECK(cp.next_n == 100'001);
  CHECK(cp.running_L == -288);

  // A second run resumes from the finished checkpoint and changes nothing.
  const CommandOutcome again = cli::run({"scan", "--to", "100000", "--threads", "1",
                                         "--checkpoint", checkpoint.path});
  CHECK(again.exit_code() == 0);
  CHECK(again.payload.at("resumed_from_n").get<std::uint64_t>() == 100'001);
  CHECK(again.payload.at("final_L").get<long long>() == -288);
  CHECK(again.payload.at("min_L").get<long long>() == -414);
}

TEST_CASE("corrupt checkpoints are refused with exit code 2") {
  TempFile checkpoint("cli_scan_bad_cp.json");
  {
    std::ofstream out(checkpoint.path);
    out << "{ \"format_version\": 1 }\ncrc32:deadbeef\n";
  }
  const CommandOutcome out = cli::run({"scan", "--to", "1000", "--checkpoint", checkpoint.path});
  CHECK(out.status == Status::error);
  CHECK(out.exit_code() == 2);
}

TEST_CASE("density subcommand reports the frozen estimate") {
  const CommandOutcome out = cli::run({"density", "--to", "10000"});
  REQUIRE(out.exit_code() == 0);
  const double d = std::strtod(out.payload.at("density").get<std::string>().c_str(), nullptr);
  CHECK_THAT(d, Catch::Matchers::WithinAbs(0.828726667130777, 1e-9));
}

TEST_CASE("NT_THREADS steers the default worker count") {
  ::setenv("NT_THREADS", "2", 1);
  const CommandOutcome out = cli::run({"scan", "--to", "50000"});
  ::unsetenv("NT_THREADS");
  REQUIRE(out.exit_code() == 0);
  CHECK(out.params.at("threads") == "2");
  CHECK(out.payload.at("final_L").get<long long>() == -88);
}
