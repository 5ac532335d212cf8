#pragma once

// Lambert-type series over the Moebius function.
//
// The engine is the partial-fraction identity (exact over the rationals)
//
//   1/(z + 1) = 1/(z - 1) - 2/(z^2 - 1)         (z != +-1)
//
// applied to z = x^-n and summed against mu, which turns the classical
//
//   sum_{n>=1} mu(n) x^n / (1 - x^n) = x                      (|x| < 1)
//
// into
//
//   sum_{n>=1} mu(n) x^n / (x^n + 1) = x - 2 x^2,
//
// and, at x = 1/2, into the curiosity sum_{n>=1} mu(n) / (2^n + 1) = 0.
// Series here converge geometrically; every evaluation carries a certified
// truncation + rounding bound.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "polya/means.hpp"
#include "polya/multiplicative.hpp"
#include "polya/precision.hpp"

namespace polya {

/// An exact rational, used where floating point would beg the question.
struct RationalValue {
  rational_t value;
};

/// Both sides of 1/(z+1) = 1/(z-1) - 2/(z^2-1), computed exactly.
struct PartialFractionCheck {
  rational_t lhs;
  rational_t rhs;
  bool equal() const { return lhs == rhs; }
};

inline PartialFractionCheck partial_fraction_identity_exact(const rational_t& z) {
  if (z == 1 || z == -1)
    throw std::domain_error("partial_fraction_identity_exact: z must differ from +-1");
  PartialFractionCheck check;
  check.lhs = rational_t(1) / (z + 1);
  check.rhs = rational_t(1) / (z - 1) - rational_t(2) / (z * z - 1);
  return check;
}

namespace detail {

enum class LambertKind { classic, plus };

// Geometric term count: |x|^(N+1) < 2^-(prec+8).
inline std::uint64_t lambert_term_count(const real_t& abs_x, const PrecisionContext& ctx) {
  const real_t need = (real_t(ctx.precision_bits) + 8) * const_ln2();
  const real_t denom = -log(abs_x);  // > 0 for |x| < 1
  return static_cast<std::uint64_t>(static_cast<unsigned long long>(need / denom)) + 1;
}

inline BoundedValue lambert_series(const real_t& x_in, LambertKind kind, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  const real_t x = snap(x_in);
  BoundCalc bc(ctx);
  if (x == 0) return bc.exact(0L);
  const real_t ax = abs(x);
  if (!(ax < 1 - real_t("1e-6")))
    throw std::domain_error("lambert_series: |x| must be < 1 - 1e-6");

  const std::uint64_t N = lambert_term_count(ax, ctx);
  if (N > ctx.max_terms)
    throw series_budget_error("lambert_series: needs " + std::to_string(N) + " terms, max_terms = " +
                              std::to_string(ctx.max_terms));
  const auto table = detail::sign_table(N);

  const BoundedValue one = bc.exact(1L);
  const BoundedValue xb = bc.exact(x);
  BoundedValue xpow = one;
  BoundedValue acc = bc.exact(0L);
  for (std::uint64_t n = 1; n <= N; ++n) {
    xpow = bc.mul(xpow, xb);
    const int mu = table->mu_at(n);
    if (mu == 0) continue;
    const BoundedValue den = (kind == LambertKind::classic) ? bc.sub(one, xpow) : bc.add(xpow, one);
    const BoundedValue term = bc.div(xpow, den);
    acc = (mu > 0) ? bc.add(acc, term) : bc.sub(acc, term);
  }

  // Tail over n > N, denominators bounded away from zero by 1 - |x|^N:
  //   classic: |x|^(N+1) / ((1 - |x|) (1 - |x|^(N+1)))
  //   plus:    |x|^(N+1) / ((1 - |x|) (1 - |x|^N))
  const real_t axN = pow(ax, static_cast<int>(N));
  const real_t axN1 = axN * ax;
  const real_t tail =
      (kind == LambertKind::classic) ? axN1 / ((1 - ax) * (1 - axN1)) : axN1 / ((1 - ax) * (1 - axN));
  acc.error_bound = bc.inflated(acc.error_bound + tail);
  return acc;
}

}  // namespace detail

/// sum mu(n) x^n / (1 - x^n)  (= x on |x| < 1).
inline BoundedValue mobius_lambert_classic(const real_t& x, const PrecisionContext& ctx) {
  return detail::lambert_series(x, detail::LambertKind::classic, ctx);
}

/// sum mu(n) x^n / (x^n + 1)  (= x - 2 x^2 on |x| < 1).
inline BoundedValue mobius_plus_series(const real_t& x, const PrecisionContext& ctx) {
  return detail::lambert_series(x, detail::LambertKind::plus, ctx);
}

/// Evaluate the plus-series at each probe point on the way up to 1;
/// against x - 2x^2 these exhibit the limit value -1.
inline std::vector<BoundedValue> limit_probe(const std::vector<real_t>& probes,
                                             const PrecisionContext& ctx) {
  std::vector<BoundedValue> out;
  out.reserve(probes.size());
  for (const auto& x : probes) {
    if (!(x > 0) || !(x < 1 - real_t("1e-6")))
      throw std::domain_error("limit_probe: probes must lie in (0, 1 - 1e-6)");
    out.push_back(mobius_plus_series(x, ctx));
  }
  return out;
}

/// Partial sum of sum_{n>=1} mu(n) / (2^n + 1) (= 0 exactly) over
/// n <= min(precision_bits + 32, max_terms), with tail bound 2^-N.
inline BoundedValue corollary_half(const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  BoundCalc bc(ctx);
  const auto N = static_cast<std::uint64_t>(
      std::min<std::size_t>(ctx.precision_bits + 32, ctx.max_terms));
  const auto table = detail::sign_table(N);

  const BoundedValue one = bc.exact(1L);
  BoundedValue acc = bc.exact(0L);
  for (std::uint64_t n = 1; n <= N; ++n) {
    const int mu = table->mu_at(n);
    if (mu == 0) continue;
    const BoundedValue den = bc.add(bc.exact(ldexp(real_t(1), static_cast<int>(n))), one);
    const BoundedValue term = bc.div(one, den);
    acc = (mu > 0) ? bc.add(acc, term) : bc.sub(acc, term);
  }
  acc.error_bound = bc.inflated(acc.error_bound + ldexp(real_t(1), -static_cast<int>(N)));
  return acc;
}

}  // namespace polya
