#pragma once

// Point evaluation and bulk segmented sieving of Omega(n), lambda(n), mu(n).
//
//   Omega(n)  = number of prime factors of n counted with multiplicity
//   lambda(n) = (-1)^Omega(n)          (completely multiplicative)
//   mu(n)     = lambda(n) if n is squarefree, 0 otherwise
//
// Bulk values come from a segmented sieve: for every prime power q = p^k with
// p <= sqrt(hi), one pass over the multiples of q divides p out of a residual
// cofactor and flips a parity bit. A residual left > 1 after all passes is a
// single prime > sqrt(hi) and contributes one more factor.

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace polya {

/// A value of lambda or mu: always one of {-1, 0, +1}.
struct SignValue {
  std::int8_t value = 0;

  friend bool operator==(SignValue a, SignValue b) { return a.value == b.value; }
  friend SignValue operator*(SignValue a, SignValue b) {
    return SignValue{static_cast<std::int8_t>(a.value * b.value)};
  }
};

inline unsigned omega(std::uint64_t n) {
  if (n == 0) throw std::domain_error("omega: n must be >= 1");
  unsigned count = 0;
  while ((n & 1) == 0) {
    n >>= 1;
    ++count;
  }
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    while (n % d == 0) {
      n /= d;
      ++count;
    }
  }
  if (n > 1) ++count;
  return count;
}

inline SignValue lambda_point(std::uint64_t n) {
  return SignValue{static_cast<std::int8_t>((omega(n) & 1u) ? -1 : +1)};
}

inline SignValue mu_point(std::uint64_t n) {
  if (n == 0) throw std::domain_error("mu: n must be >= 1");
  unsigned count = 0;
  if (n % 2 == 0) {
    n /= 2;
    ++count;
    if (n % 2 == 0) return SignValue{0};
  }
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) {
      n /= d;
      ++count;
      if (n % d == 0) return SignValue{0};
    }
  }
  if (n > 1) ++count;
  return SignValue{static_cast<std::int8_t>((count & 1u) ? -1 : +1)};
}

struct SieveConfig {
  std::size_t max_segment_length = std::size_t{1} << 24;
};

/// lambda and mu over a contiguous block [lo, hi].
struct SignSegment {
  std::uint64_t lo = 1;
  std::uint64_t hi = 1;
  std::vector<std::int8_t> lambda_vals;
  std::vector<std::int8_t> mu_vals;

  std::size_t size() const { return lambda_vals.size(); }
  bool contains(std::uint64_t n) const { return n >= lo && n <= hi; }
  std::int8_t lambda_at(std::uint64_t n) const { return lambda_vals[static_cast<std::size_t>(n - lo)]; }
  std::int8_t mu_at(std::uint64_t n) const { return mu_vals[static_cast<std::size_t>(n - lo)]; }
};

/// All primes p <= limit, by a plain sieve of Eratosthenes.
inline std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  std::vector<char> composite(static_cast<std::size_t>(limit) + 1, 0);
  for (std::uint64_t i = 2; i * i <= limit; ++i)
    if (!composite[static_cast<std::size_t>(i)])
      for (std::uint64_t j = i * i; j <= limit; j += i) composite[static_cast<std::size_t>(j)] = 1;
  for (std::uint64_t i = 2; i <= limit; ++i)
    if (!composite[static_cast<std::size_t>(i)]) primes.push_back(i);
  return primes;
}

inline std::uint64_t isqrt_u64(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

namespace detail {

// One segment of the sieve. `primes` must cover every prime <= sqrt(hi).
// Residual is uint32_t when hi fits, halving memory traffic and division cost.
template <typename Residual>
void sieve_segment_into(std::uint64_t lo, std::uint64_t hi, const std::vector<std::uint64_t>& primes,
                        std::int8_t* lambda_out, std::int8_t* mu_out) {
  const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
  std::vector<Residual> residual(len);
  std::vector<std::uint8_t> flags(len, 0);  // bit0: Omega parity, bit1: divisible by a square
  for (std::size_t i = 0; i < len; ++i) residual[i] = static_cast<Residual>(lo + i);

  for (std::uint64_t p : primes) {
    if (p * p > hi) break;
    bool power_pass = false;  // true once q >= p^2
    for (std::uint64_t q = p;;) {
      std::uint64_t m = ((lo + q - 1) / q) * q;
      const auto rp = static_cast<Residual>(p);
      for (; m <= hi; m += q) {
        const std::size_t i = static_cast<std::size_t>(m - lo);
        residual[i] /= rp;
        flags[i] ^= 1;
        if (power_pass) flags[i] |= 2;
      }
      if (q > hi / p) break;
      q *= p;
      power_pass = true;
    }
  }

  for (std::size_t i = 0; i < len; ++i) {
    unsigned parity = flags[i] & 1u;
    if (residual[i] > 1) parity ^= 1u;  // one leftover prime > sqrt(hi)
    const std::int8_t lam = parity ? -1 : +1;
    lambda_out[i] = lam;
    mu_out[i] = (flags[i] & 2u) ? 0 : lam;
  }
}

inline void sieve_segment_dispatch(std::uint64_t lo, std::uint64_t hi, const std::vector<std::uint64_t>& primes,
                                   std::int8_t* lambda_out, std::int8_t* mu_out) {
  if (hi <= std::uint64_t{0xFFFFFFFFu})
    sieve_segment_into<std::uint32_t>(lo, hi, primes, lambda_out, mu_out);
  else
    sieve_segment_into<std::uint64_t>(lo, hi, primes, lambda_out, mu_out);
}

}  // namespace detail

inline SignSegment sieve_segment(std::uint64_t lo, std::uint64_t hi, const SieveConfig& config = {}) {
  if (lo < 1) throw std::domain_error("sieve_segment: lo must be >= 1");
  if (hi < lo) throw std::domain_error("sieve_segment: range is inverted");
  if (hi > (std::uint64_t{1} << 62)) throw std::domain_error("sieve_segment: hi exceeds 2^62");
  const std::uint64_t len = hi - lo + 1;
  if (len > config.max_segment_length)
    throw std::length_error("sieve_segment: segment longer than configured maximum (" +
                            std::to_string(config.max_segment_length) + ")");

  SignSegment seg;
  seg.lo = lo;
  seg.hi = hi;
  seg.lambda_vals.resize(static_cast<std::size_t>(len));
  seg.mu_vals.resize(static_cast<std::size_t>(len));
  const auto primes = primes_up_to(isqrt_u64(hi));
  detail::sieve_segment_dispatch(lo, hi, primes, seg.lambda_vals.data(), seg.mu_vals.data());
  return seg;
}

/// CSV export: header `n,lambda,mu`, one row per n, ascending.
inline void write_segment_csv(const SignSegment& seg, std::ostream& out) {
  out << "n,lambda,mu\n";
  for (std::size_t i = 0; i < seg.size(); ++i) {
    out << (seg.lo + i) << ',' << int(seg.lambda_vals[i]) << ',' << int(seg.mu_vals[i]) << '\n';
  }
}

}  // namespace polya
