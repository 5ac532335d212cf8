#pragma once

// Weighted means of the Liouville function against exponential kernels:
//
//   S-(x) = sum_{n>=1} lambda(n) / (e^(n pi x) - 1)   = phi(x)              (x > 0)
//   S+(x) = sum_{n>=1} lambda(n) / (e^(n pi x) + 1)   = phi(x) - 2 phi(2x)
//
// with phi the Gaussian theta tail from theta.hpp. As x -> 0+ the right side
// of the S+ identity behaves like 1/2 - c/sqrt(x) + O(x-exponential) with
// c = (sqrt(2) - 1)/2 > 0, so S+(x) is eventually negative on its way down —
// the quantitative "negative bias" of lambda. All evaluations carry certified
// truncation + rounding bounds; the sign-crossing search below only ever
// reports a sign it can prove.

#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "polya/multiplicative.hpp"
#include "polya/precision.hpp"
#include "polya/theta.hpp"
#include "polya/zeta.hpp"

namespace polya {

enum class MeanKind { minus, plus };

namespace detail {

/// Shared cache of lambda values on [1, n], grown geometrically.
inline std::shared_ptr<const SignSegment> sign_table(std::uint64_t upto) {
  static std::mutex mutex;
  static std::shared_ptr<const SignSegment> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (cache && cache->hi >= upto) return cache;
  std::uint64_t target = cache ? cache->hi : 4096;
  while (target < upto) target *= 2;
  SieveConfig config;
  config.max_segment_length = std::size_t{1} << 27;
  cache = std::make_shared<const SignSegment>(sieve_segment(1, target, config));
  return cache;
}

/// Terms needed so the geometric tail clears 2^-(prec+8):
///   N = ceil(((prec+8) ln 2 + ln(1/(1-e^(-pi x)))) / (pi x)).
inline std::uint64_t mean_term_count(const real_t& x, const PrecisionContext& ctx) {
  const real_t pix = const_pi() * x;
  const real_t need = (real_t(ctx.precision_bits) + 8) * const_ln2() - log(1 - exp(-pix));
  auto n = static_cast<std::uint64_t>(static_cast<unsigned long long>(need / pix)) + 1;
  return n;
}

}  // namespace detail

/// S-(x) or S+(x) with a certified truncation + rounding bound.
inline BoundedValue weighted_mean(const real_t& x_in, MeanKind kind, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  const real_t x = snap(x_in);
  if (!(x > 0)) throw std::domain_error("weighted_mean: x must be > 0");

  BoundCalc bc(ctx);
  const std::uint64_t N = detail::mean_term_count(x, ctx);
  if (N > ctx.max_terms)
    throw series_budget_error("weighted_mean: needs " + std::to_string(N) + " terms, max_terms = " +
                              std::to_string(ctx.max_terms));
  const auto lam = detail::sign_table(N);

  const BoundedValue one = bc.exact(1L);
  const BoundedValue pix = bc.mul(bc.pi(), bc.exact(x));
  BoundedValue acc = bc.exact(0L);
  for (std::uint64_t n = 1; n <= N; ++n) {
    const BoundedValue grow = bc.exp_of(bc.mul(bc.exact(static_cast<long>(n)), pix));
    const BoundedValue den = (kind == MeanKind::minus) ? bc.sub(grow, one) : bc.add(grow, one);
    const BoundedValue term = bc.div(one, den);
    acc = (lam->lambda_at(n) > 0) ? bc.add(acc, term) : bc.sub(acc, term);
  }

  // Geometric tail from term N+1, at the low edge of the enclosure of pi x:
  //   minus kind: sum_{n>N} 1/(e^(n pi x)-1) <= 2 e^(-(N+1) pi x) / (1 - e^(-pi x))
  //   (each term <= 2 e^(-n pi x) since e^(-(N+1) pi x) <= 1/2 by choice of N);
  //   plus kind drops the factor 2.
  const real_t pix_low = pix.value - pix.error_bound;
  const real_t q = exp(-real_t(static_cast<unsigned long long>(N + 1)) * pix_low);
  real_t tail = q / (1 - exp(-pix_low));
  if (kind == MeanKind::minus) tail = ldexp(tail, 1);
  acc.error_bound = bc.inflated(acc.error_bound + tail);
  return acc;
}

inline BoundedValue s_minus(const real_t& x, const PrecisionContext& ctx) {
  return weighted_mean(x, MeanKind::minus, ctx);
}

inline BoundedValue s_plus(const real_t& x, const PrecisionContext& ctx) {
  return weighted_mean(x, MeanKind::plus, ctx);
}

/// S-(x) - phi(x): certified enclosure of an identically-zero quantity.
inline BoundedValue step1_residual(const real_t& x_in, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  const real_t x = snap(x_in);
  BoundCalc bc(ctx);
  return bc.sub(s_minus(x, ctx), phi(x, ctx));
}

/// S+(x) - (phi(x) - 2 phi(2x)): certified enclosure of zero.
inline BoundedValue step2_residual(const real_t& x_in, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  const real_t x = snap(x_in);
  BoundCalc bc(ctx);
  const BoundedValue rhs = bc.sub(phi(x, ctx), bc.scale2(phi(ldexp(x, 1), ctx), 1));
  return bc.sub(s_plus(x, ctx), rhs);
}

/// Constants of the small-x asymptotic S+(x) ~ 1/2 - c / sqrt(x).
struct Theorem1Constants {
  BoundedValue half;  // exact 1/2
  BoundedValue c;     // (sqrt(2) - 1)/2
};

inline Theorem1Constants theorem1_constants(const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  BoundCalc bc(ctx);
  Theorem1Constants k;
  k.half = bc.exact(real_t(0.5));
  k.c = bc.scale2(bc.sub(bc.sqrt_of(bc.exact(2L)), bc.exact(1L)), -1);
  return k;
}

/// S+(x) - (1/2 - c/sqrt(x)) on 0 < x <= 1. The exact gap equals
/// theta-series remainders bounded by remainder_bound(x) (theta.hpp).
inline BoundedValue theorem1_residual(const real_t& x_in, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  const real_t x = snap(x_in);
  if (!(x > 0) || x > 1) throw std::domain_error("theorem1_residual: x must lie in (0, 1]");
  BoundCalc bc(ctx);
  const Theorem1Constants k = theorem1_constants(ctx);
  const BoundedValue main = bc.sub(k.half, bc.div(k.c, bc.sqrt_of(bc.exact(x))));
  return bc.sub(s_plus(x, ctx), main);
}

/// An interval of width <= 2^-40 on which S+ provably changes sign.
struct CrossingInterval {
  real_t lo;
  real_t hi;
  unsigned max_precision_bits_used = 0;
};

/// Certified bisection for the sign change of S+ in [lo, hi] (0 < lo < hi <= 1).
/// Every midpoint sign is certified from the enclosure; when an enclosure
/// straddles zero the working precision doubles, up to three times.
inline CrossingInterval find_sign_crossing(const real_t& lo_in, const real_t& hi_in,
                                           const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  real_t a = snap(lo_in), b = snap(hi_in);
  if (!(a > 0) || !(a < b) || b > 1)
    throw std::domain_error("find_sign_crossing: need 0 < lo < hi <= 1");

  unsigned max_bits = ctx.precision_bits;
  auto certified_sign_at = [&](const real_t& x) {
    PrecisionContext local = ctx;
    for (int escalation = 0; escalation <= 3; ++escalation) {
      const int sign = s_plus(x, local).certified_sign();
      if (sign != 0) {
        max_bits = std::max(max_bits, local.precision_bits);
        return sign;
      }
      local.precision_bits *= 2;
    }
    throw std::runtime_error("find_sign_crossing: sign not certifiable at x = " + x.str(25));
  };

  if (certified_sign_at(a) >= 0 || certified_sign_at(b) <= 0)
    throw std::domain_error("find_sign_crossing: endpoints must satisfy S+(lo) < 0 < S+(hi)");

  const real_t width_target = ldexp(real_t(1), -40);
  while (b - a > width_target) {
    const real_t mid = ldexp(a + b, -1);
    (certified_sign_at(mid) < 0 ? a : b) = mid;
  }
  return CrossingInterval{a, b, max_bits};
}

/// Partial Dirichlet sum sum_{n<=N} lambda(n) n^-s against zeta(2s)/zeta(s).
struct DirichletCheck {
  BoundedValue partial;
  real_t tail_bound;     // |sum_{n>N} lambda(n) n^-s| <= N^(1-s)/(s-1)
  BoundedValue quotient; // zeta(2s)/zeta(s)
  BoundedValue difference;
};

inline DirichletCheck dirichlet_quotient_check(const real_t& s_in, std::uint64_t n_terms,
                                               const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  const real_t s = snap(s_in);
  if (!(s > real_t(1) + real_t("1e-6")))
    throw std::domain_error("dirichlet_quotient_check: s must exceed 1 + 1e-6");
  if (n_terms < 1) throw std::domain_error("dirichlet_quotient_check: n_terms must be >= 1");
  if (n_terms > ctx.max_terms)
    throw series_budget_error("dirichlet_quotient_check: n_terms exceeds max_terms");

  BoundCalc bc(ctx);
  const auto lam = detail::sign_table(n_terms);
  BoundedValue acc = bc.exact(1L);  // n = 1
  for (std::uint64_t n = 2; n <= n_terms; ++n) {
    const BoundedValue term = bc.rounded(pow(real_t(static_cast<unsigned long>(n)), -s));
    acc = (lam->lambda_at(n) > 0) ? bc.add(acc, term) : bc.sub(acc, term);
  }

  DirichletCheck check;
  check.partial = acc;
  check.tail_bound = pow(real_t(static_cast<unsigned long>(n_terms)), 1 - s) / (s - 1);
  check.quotient = bc.div(zeta_real(2 * s, ctx), zeta_real(s, ctx));
  check.difference = bc.sub(check.partial, check.quotient);
  return check;
}

}  // namespace polya
