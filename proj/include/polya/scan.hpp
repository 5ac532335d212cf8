#pragma once

// Streaming scan of the summatory functions
//
//   L(n) = sum_{k<=n} lambda(k)      M(n) = sum_{k<=n} mu(k)
//
// over [1, n_max], recording every n >= 2 with L(n) >= 0. Segments are sieved
// (in parallel when asked) and folded in order by a sequential reducer. Each
// segment carries its lambda/mu totals and the min/max of its internal lambda
// prefix sums, so a segment that provably stays negative folds in O(1); only
// segments that can reach L >= 0 are walked element by element. Progress is
// checkpointable at segment boundaries and a resumed scan is bit-identical to
// an uninterrupted one.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/crc.hpp>
#include <json.hpp>

#include "polya/multiplicative.hpp"

namespace polya {

/// A point n >= 2 where L(n) >= 0 (Polya's conjecture would forbid these).
struct LEvent {
  std::uint64_t n = 0;
  std::int64_t L = 0;

  friend bool operator==(const LEvent& a, const LEvent& b) { return a.n == b.n && a.L == b.L; }
};

struct ScanReport {
  std::uint64_t n_max = 0;
  std::int64_t final_L = 0;
  std::int64_t final_M = 0;
  std::int64_t min_L = 0;
  std::int64_t max_L_on_range = 0;
  std::vector<LEvent> nonneg_events;               // ascending n
  std::optional<std::uint64_t> first_positive_n;   // least n >= 2 with L(n) > 0
};

/// Resumable scan state. `next_n` is the first integer not yet folded in;
/// the running values and extrema cover the prefix [1, next_n - 1].
struct ScanCheckpoint {
  int format_version = 1;
  std::uint64_t next_n = 2;
  std::int64_t running_L = 1;
  std::int64_t running_M = 1;
  std::int64_t min_L = 1;
  std::int64_t max_L = 1;
  std::vector<LEvent> nonneg_events;

  static ScanCheckpoint fresh() { return ScanCheckpoint{}; }
};

class checkpoint_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCheckpointFormatVersion = 1;

// ---------------------------------------------------------------------------
// JSON / CSV serialization
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json events_to_json(const std::vector<LEvent>& events) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : events) arr.push_back({e.n, e.L});
  return arr;
}

inline std::vector<LEvent> events_from_json(const nlohmann::json& arr) {
  std::vector<LEvent> events;
  for (const auto& item : arr) {
    if (!item.is_array() || item.size() != 2) throw checkpoint_error("malformed event entry");
    events.push_back(LEvent{item[0].get<std::uint64_t>(), item[1].get<std::int64_t>()});
  }
  return events;
}

inline std::uint32_t crc32_of(const std::string& bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

inline std::string crc32_hex(std::uint32_t value) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", value);
  return std::string(buf);
}

}  // namespace detail

inline nlohmann::json report_to_json(const ScanReport& r) {
  nlohmann::json j{
      {"n_max", r.n_max},
      {"final_L", r.final_L},
      {"final_M", r.final_M},
      {"min_L", r.min_L},
      {"max_L_on_range", r.max_L_on_range},
      {"nonneg_events", detail::events_to_json(r.nonneg_events)},
  };
  if (r.first_positive_n) j["first_positive_n"] = *r.first_positive_n;
  return j;
}

inline ScanReport report_from_json(const nlohmann::json& j) {
  ScanReport r;
  r.n_max = j.at("n_max").get<std::uint64_t>();
  r.final_L = j.at("final_L").get<std::int64_t>();
  r.final_M = j.at("final_M").get<std::int64_t>();
  r.min_L = j.at("min_L").get<std::int64_t>();
  r.max_L_on_range = j.at("max_L_on_range").get<std::int64_t>();
  r.nonneg_events = detail::events_from_json(j.at("nonneg_events"));
  if (j.contains("first_positive_n")) r.first_positive_n = j.at("first_positive_n").get<std::uint64_t>();
  return r;
}

/// CSV export of the recorded events: header `n,L`, ascending n.
inline void write_events_csv(const ScanReport& r, std::ostream& out) {
  out << "n,L\n";
  for (const auto& e : r.nonneg_events) out << e.n << ',' << e.L << '\n';
}

/// Serialize a checkpoint: pretty JSON document followed by a one-line
/// `crc32:xxxxxxxx` footer over every preceding byte.
inline std::string checkpoint_serialize(const ScanCheckpoint& cp) {
  nlohmann::json j{
      {"format_version", cp.format_version},
      {"next_n", cp.next_n},
      {"running_L", cp.running_L},
      {"running_M", cp.running_M},
      {"min_L", cp.min_L},
      {"max_L", cp.max_L},
      {"nonneg_events", detail::events_to_json(cp.nonneg_events)},
  };
  std::string body = j.dump(2);
  body += '\n';
  body += "crc32:" + detail::crc32_hex(detail::crc32_of(body)) + "\n";
  return body;
}

inline ScanCheckpoint checkpoint_parse(const std::string& bytes) {
  const auto footer_pos = bytes.rfind("crc32:");
  if (footer_pos == std::string::npos || footer_pos == 0)
    throw checkpoint_error("checkpoint is missing its crc32 footer");
  const std::string body = bytes.substr(0, footer_pos);
  std::string footer = bytes.substr(footer_pos + 6);
  while (!footer.empty() && (footer.back() == '\n' || footer.back() == '\r')) footer.pop_back();
  if (footer.size() != 8 || footer != detail::crc32_hex(detail::crc32_of(body)))
    throw checkpoint_error("checkpoint crc32 mismatch; file is corrupted or truncated");

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw checkpoint_error(std::string("checkpoint body is not valid JSON: ") + e.what());
  }
  ScanCheckpoint cp;
  try {
    cp.format_version = j.at("format_version").get<int>();
    if (cp.format_version != kCheckpointFormatVersion)
      throw checkpoint_error("unsupported checkpoint format_version " + std::to_string(cp.format_version));
    cp.next_n = j.at("next_n").get<std::uint64_t>();
    cp.running_L = j.at("running_L").get<std::int64_t>();
    cp.running_M = j.at("running_M").get<std::int64_t>();
    cp.min_L = j.at("min_L").get<std::int64_t>();
    cp.max_L = j.at("max_L").get<std::int64_t>();
    cp.nonneg_events = detail::events_from_json(j.at("nonneg_events"));
  } catch (const nlohmann::json::exception& e) {
    throw checkpoint_error(std::string("checkpoint body is missing fields: ") + e.what());
  }
  if (cp.next_n < 2) throw checkpoint_error("checkpoint next_n must be >= 2");
  return cp;
}

inline void checkpoint_save_file(const ScanCheckpoint& cp, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open checkpoint file for writing: " + tmp);
    out << checkpoint_serialize(cp);
    if (!out.flush()) throw std::runtime_error("failed writing checkpoint file: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("failed to move checkpoint into place: " + path);
}

inline ScanCheckpoint checkpoint_load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw checkpoint_error("cannot open checkpoint file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_parse(buf.str());
}

// ---------------------------------------------------------------------------
// Scan engine
// ---------------------------------------------------------------------------

struct ScanOptions {
  unsigned threads = 1;
  std::size_t segment_length = std::size_t{1} << 22;
  /// Called after each folded segment with the last n folded in.
  std::function<void(std::uint64_t)> progress;
  /// When set, receives a consistent checkpoint roughly every
  /// `checkpoint_stride` integers (and once at the end of the scan).
  std::function<void(const ScanCheckpoint&)> checkpoint_sink;
  std::uint64_t checkpoint_stride = std::uint64_t{1} << 25;
};

namespace detail {

struct SegmentSummary {
  std::uint64_t lo = 0, hi = 0;
  std::vector<std::int8_t> lambda, mu;
  std::int64_t lambda_sum = 0;
  std::int64_t mu_sum = 0;
  std::int64_t min_prefix = 0;  // min over i of lambda[lo..lo+i] partial sums
  std::int64_t max_prefix = 0;
};

inline SegmentSummary summarize_segment(std::uint64_t lo, std::uint64_t hi,
                                        const std::vector<std::uint64_t>& primes) {
  SegmentSummary s;
  s.lo = lo;
  s.hi = hi;
  const auto len = static_cast<std::size_t>(hi - lo + 1);
  s.lambda.resize(len);
  s.mu.resize(len);
  sieve_segment_dispatch(lo, hi, primes, s.lambda.data(), s.mu.data());
  std::int64_t run = 0;
  std::int64_t mn = std::numeric_limits<std::int64_t>::max(), mx = std::numeric_limits<std::int64_t>::min();
  for (std::size_t i = 0; i < len; ++i) {
    run += s.lambda[i];
    mn = std::min(mn, run);
    mx = std::max(mx, run);
    s.mu_sum += s.mu[i];
  }
  s.lambda_sum = run;
  s.min_prefix = mn;
  s.max_prefix = mx;
  return s;
}

}  // namespace detail

/// Scan [resume point, n_max], returning the full report over [1, n_max].
/// With no checkpoint the scan starts fresh at n = 2 (L(1) = M(1) = 1).
inline ScanReport scan_summatory(std::uint64_t n_max, std::optional<ScanCheckpoint> resume = std::nullopt,
                                 const ScanOptions& options = {}) {
  if (n_max < 2) throw std::domain_error("scan_summatory: n_max must be >= 2");
  if (n_max > (std::uint64_t{1} << 62)) throw std::domain_error("scan_summatory: n_max exceeds 2^62");

  ScanCheckpoint state = resume ? *resume : ScanCheckpoint::fresh();
  if (state.next_n > n_max + 1)
    throw std::domain_error("scan_summatory: checkpoint is ahead of n_max (next_n = " +
                            std::to_string(state.next_n) + ")");

  const std::size_t seglen = std::max<std::size_t>(options.segment_length, 1024);
  const unsigned threads = std::max(1u, options.threads);
  const auto primes = primes_up_to(isqrt_u64(n_max));

  std::uint64_t next_checkpoint_mark =
      options.checkpoint_sink ? ((state.next_n / options.checkpoint_stride) + 1) * options.checkpoint_stride
                              : std::uint64_t(-1);

  // Fold one summarized segment into the running state.
  auto fold = [&](const detail::SegmentSummary& s) {
    const bool may_touch_zero = state.running_L + s.max_prefix >= 0;
    if (!may_touch_zero) {
      state.min_L = std::min(state.min_L, state.running_L + s.min_prefix);
      state.max_L = std::max(state.max_L, state.running_L + s.max_prefix);
      state.running_L += s.lambda_sum;
      state.running_M += s.mu_sum;
    } else {
      std::int64_t L = state.running_L, M = state.running_M;
      for (std::size_t i = 0; i < s.lambda.size(); ++i) {
        L += s.lambda[i];
        M += s.mu[i];
        if (L >= 0) state.nonneg_events.push_back(LEvent{s.lo + i, L});
        state.min_L = std::min(state.min_L, L);
        state.max_L = std::max(state.max_L, L);
      }
      state.running_L = L;
      state.running_M = M;
    }
    state.next_n = s.hi + 1;
    if (options.progress) options.progress(s.hi);
    if (options.checkpoint_sink && s.hi >= next_checkpoint_mark) {
      options.checkpoint_sink(state);
      next_checkpoint_mark = ((s.hi / options.checkpoint_stride) + 1) * options.checkpoint_stride;
    }
  };

  if (state.next_n <= n_max) {
    if (threads == 1) {
      for (std::uint64_t lo = state.next_n; lo <= n_max; lo = state.next_n) {
        const std::uint64_t hi = std::min(n_max, lo + seglen - 1);
        fold(detail::summarize_segment(lo, hi, primes));
      }
    } else {
      // Workers sieve ahead of the reducer; results fold strictly in order.
      std::deque<std::future<detail::SegmentSummary>> window;
      std::uint64_t issue_lo = state.next_n;
      auto issue = [&]() {
        if (issue_lo > n_max) return false;
        const std::uint64_t lo = issue_lo;
        const std::uint64_t hi = std::min(n_max, lo + seglen - 1);
        issue_lo = hi + 1;
        window.push_back(std::async(std::launch::async,
                                    [lo, hi, &primes] { return detail::summarize_segment(lo, hi, primes); }));
        return true;
      };
      for (unsigned i = 0; i < threads && issue(); ++i) {
      }
      while (!window.empty()) {
        detail::SegmentSummary s = window.front().get();
        window.pop_front();
        issue();
        fold(s);
      }
    }
  }

  if (options.checkpoint_sink) options.checkpoint_sink(state);

  ScanReport report;
  report.n_max = n_max;
  report.final_L = state.running_L;
  report.final_M = state.running_M;
  report.min_L = state.min_L;
  report.max_L_on_range = state.max_L;
  report.nonneg_events = std::move(state.nonneg_events);
  for (const auto& e : report.nonneg_events) {
    if (e.L > 0) {
      report.first_positive_n = e.n;
      break;
    }
  }
  return report;
}

/// Estimated logarithmic density of {n : L(n) < 0} in [2, n_max]:
///   (1 / log n_max) * sum over n in [2, n_max] with L(n) < 0 of 1/n,
/// accumulated with Kahan compensation.
inline double log_density_negative(std::uint64_t n_max, const ScanOptions& options = {}) {
  if (n_max < 2) throw std::domain_error("log_density_negative: n_max must be >= 2");
  const std::size_t seglen = std::max<std::size_t>(options.segment_length, 1024);
  const auto primes = primes_up_to(isqrt_u64(n_max));
  std::vector<std::int8_t> lam(seglen), mu(seglen);

  std::int64_t L = 1;  // L(1)
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t lo = 2; lo <= n_max; lo += seglen) {
    const std::uint64_t hi = std::min(n_max, lo + seglen - 1);
    const auto len = static_cast<std::size_t>(hi - lo + 1);
    detail::sieve_segment_dispatch(lo, hi, primes, lam.data(), mu.data());
    for (std::size_t i = 0; i < len; ++i) {
      L += lam[i];
      if (L < 0) {
        const double term = 1.0 / static_cast<double>(lo + i);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
      }
    }
    if (options.progress) options.progress(hi);
  }
  return sum / std::log(static_cast<double>(n_max));
}

}  // namespace polya
