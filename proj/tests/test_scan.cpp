#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <sstream>

#include "polya/scan.hpp"

using namespace polya;

// Frozen summatory values (independent smallest-prime-factor sieve):
//   L(10^3) = -14   M(10^3) = 2      min L on [1,10^3]  = -28
//   L(10^5) = -288  M(10^5) = -48    min L on [1,10^5]  = -414
//   L(10^6) = -530  M(10^6) = 212    min L on [1,10^6]  = -1253
// Events (n >= 2, L(n) >= 0) below 10^6: exactly n in
//   {2, 4, 6, 10, 16, 26, 40, 96, 586}, all with L(n) = 0.
static const std::vector<LEvent> kEarlyEvents = {
    {2, 0}, {4, 0}, {6, 0}, {10, 0}, {16, 0}, {26, 0}, {40, 0}, {96, 0}, {586, 0}};

TEST_CASE("scan to 10^6 reproduces frozen summatory data") {
  const ScanReport r = scan_summatory(1'000'000);
  CHECK(r.n_max == 1'000'000);
  CHECK(r.final_L == -530);
  CHECK(r.final_M == 212);
  CHECK(r.min_L == -1253);
  CHECK(r.max_L_on_range == 1);  // only L(1) = 1 reaches the maximum
  CHECK(r.nonneg_events == kEarlyEvents);
  CHECK_FALSE(r.first_positive_n.has_value());
}

TEST_CASE("scan respects awkward segment boundaries") {
  ScanOptions odd;
  odd.segment_length = 1024;  // minimum; forces many segments, odd final one
  const ScanReport r = scan_summatory(100'000, std::nullopt, odd);
  CHECK(r.final_L == -288);
  CHECK(r.final_M == -48);
  CHECK(r.min_L == -414);
  CHECK(r.nonneg_events == kEarlyEvents);
}

TEST_CASE("parallel scan matches sequential scan exactly") {
  ScanOptions seq;
  seq.threads = 1;
  ScanOptions par;
  par.threads = 3;
  par.segment_length = 4096;
  const ScanReport a = scan_summatory(300'000, std::nullopt, seq);
  const ScanReport b = scan_summatory(300'000, std::nullopt, par);
  CHECK(a.final_L == b.final_L);
  CHECK(a.final_M == b.final_M);
  CHECK(a.min_L == b.min_L);
  CHECK(a.max_L_on_range == b.max_L_on_range);
  CHECK(a.nonneg_events == b.nonneg_events);
  CHECK(report_to_json(a) == report_to_json(b));
}

TEST_CASE("scan domain errors") {
  CHECK_THROWS_AS(scan_summatory(1), std::domain_error);
  ScanCheckpoint ahead = ScanCheckpoint::fresh();
  ahead.next_n = 5000;
  CHECK_THROWS_AS(scan_summatory(100, ahead), std::domain_error);
}

TEST_CASE("fresh checkpoint captures the n = 1 state") {
  const auto cp = ScanCheckpoint::fresh();
  CHECK(cp.format_version == 1);
  CHECK(cp.next_n == 2);
  CHECK(cp.running_L == 1);
  CHECK(cp.running_M == 1);
  CHECK(cp.min_L == 1);
  CHECK(cp.max_L == 1);
  CHECK(cp.nonneg_events.empty());
}

TEST_CASE("checkpoint serialization round-trips with a valid crc footer") {
  ScanCheckpoint cp;
  cp.next_n = 123'457;
  cp.running_L = -99;
  cp.running_M = 17;
  cp.min_L = -321;
  cp.max_L = 1;
  cp.nonneg_events = kEarlyEvents;

  const std::string bytes = checkpoint_serialize(cp);
  CHECK(bytes.find("\"format_version\": 1") != std::string::npos);
  CHECK(bytes.substr(bytes.size() - 16, 7) == "\ncrc32:");

  const ScanCheckpoint back = checkpoint_parse(bytes);
  CHECK(back.next_n == cp.next_n);
  CHECK(back.running_L == cp.running_L);
  CHECK(back.running_M == cp.running_M);
  CHECK(back.min_L == cp.min_L);
  CHECK(back.max_L == cp.max_L);
  CHECK(back.nonneg_events == cp.nonneg_events);
  // Serialization is deterministic.
  CHECK(checkpoint_serialize(back) == bytes);
}

TEST_CASE("checkpoint integrity failures are detected") {
  const std::string good = checkpoint_serialize(ScanCheckpoint::fresh());

  SECTION("flipped payload byte") {
    std::string bad = good;
    bad[bad.find("\"next_n\": 2") + 10] = '7';
    CHECK_THROWS_AS(checkpoint_parse(bad), checkpoint_error);
  }
  SECTION("truncated file") {
    CHECK_THROWS_AS(checkpoint_parse(good.substr(0, good.size() / 2)), checkpoint_error);
  }
  SECTION("missing footer") {
    CHECK_THROWS_AS(checkpoint_parse("{}\n"), checkpoint_error);
  }
  SECTION("version from the future") {
    ScanCheckpoint cp = ScanCheckpoint::fresh();
    cp.format_version = 2;
    CHECK_THROWS_AS(checkpoint_parse(checkpoint_serialize(cp)), checkpoint_error);
  }
}

TEST_CASE("resumed scan is bit-identical to an uninterrupted one") {
  const std::uint64_t n_max = 400'000;
  const ScanReport whole = scan_summatory(n_max);

  // Capture a mid-flight checkpoint, then resume from it.
  ScanOptions capture;
  capture.segment_length = 8192;
  capture.checkpoint_stride = 1;  // every segment
  ScanCheckpoint mid;
  bool captured = false;
  capture.checkpoint_sink = [&](const ScanCheckpoint& cp) {
    if (!captured && cp.next_n > 150'000) {
      mid = cp;
      captured = true;
    }
  };
  scan_summatory(n_max, std::nullopt, capture);
  REQUIRE(captured);
  REQUIRE(mid.next_n > 150'000);

  // Shuttle the state through its serialized form, as a real resume would.
  const ScanCheckpoint restored = checkpoint_parse(checkpoint_serialize(mid));
  ScanOptions resume_opts;
  resume_opts.segment_length = 30'000;  // different segmentation on purpose
  const ScanReport resumed = scan_summatory(n_max, restored, resume_opts);

  CHECK(report_to_json(resumed).dump() == report_to_json(whole).dump());
}

TEST_CASE("resume point in the middle of the event cluster") {
  // Build a checkpoint at n = 49 from a prefix scan; events 96 and 586 must
  // then be discovered after the resume.
  const ScanReport prefix = scan_summatory(49);
  ScanCheckpoint cp;
  cp.next_n = 50;
  cp.running_L = prefix.final_L;
  cp.running_M = prefix.final_M;
  cp.min_L = prefix.min_L;
  cp.max_L = prefix.max_L_on_range;
  cp.nonneg_events = prefix.nonneg_events;
  REQUIRE(cp.nonneg_events == std::vector<LEvent>{{2, 0}, {4, 0}, {6, 0}, {10, 0}, {16, 0}, {26, 0}, {40, 0}});

  const ScanReport resumed = scan_summatory(1000, cp);
  const ScanReport whole = scan_summatory(1000);
  CHECK(report_to_json(resumed).dump() == report_to_json(whole).dump());
  CHECK(resumed.nonneg_events == kEarlyEvents);
}

TEST_CASE("report JSON and events CSV round-trip") {
  const ScanReport r = scan_summatory(1000);
  const ScanReport back = report_from_json(report_to_json(r));
  CHECK(report_to_json(back) == report_to_json(r));

  std::ostringstream csv;
  write_events_csv(r, csv);
  CHECK(csv.str() ==
        "n,L\n2,0\n4,0\n6,0\n10,0\n16,0\n26,0\n40,0\n96,0\n586,0\n");
}

TEST_CASE("log density of negative L matches frozen prefix values") {
  // Frozen: 0.396207545196657 (10), 0.828726667130777 (10^4),
  //         0.862977425125935 (10^5).
  CHECK_THAT(log_density_negative(10), Catch::Matchers::WithinAbs(0.396207545196657, 1e-12));
  CHECK_THAT(log_density_negative(10'000), Catch::Matchers::WithinAbs(0.828726667130777, 1e-12));
  CHECK_THAT(log_density_negative(100'000), Catch::Matchers::WithinAbs(0.862977425125935, 1e-12));
  CHECK_THROWS_AS(log_density_negative(1), std::domain_error);
}
