#pragma once

// Jacobi theta on the positive real axis and its Gaussian-tail remainder.
//
//   phi(x)   = sum_{k>=1} exp(-k^2 pi x)        (x > 0)
//   theta(x) = 1 + 2 phi(x)
//
// The series converges super-exponentially for moderate x. For tiny x it is
// nearly useless directly, but theta satisfies the modular identity
// theta(x) = x^(-1/2) theta(1/x), so phi(x) is evaluated through theta(1/x)
// once x drops below 1e-4. The residual check evaluates both sides of the
// identity directly (no rerouting), which is what makes it a test at all.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "polya/precision.hpp"

namespace polya {

struct ThetaArgument {
  real_t x;  // > 0
};

namespace detail {

// Truncation index: exp(-(K+1)^2 pi x) < 2^-(prec+8).
inline std::size_t phi_cutoff(const real_t& x, const PrecisionContext& ctx) {
  const real_t need = (real_t(ctx.precision_bits) + 8) * const_ln2();
  const real_t k = sqrt(need / (const_pi() * x));
  return static_cast<std::size_t>(static_cast<unsigned long>(k)) + 1;
}

// phi at an enclosed argument t (t.value > 0). Input error propagates through
// each exp term; the truncation tail is widened by the worst-case drift
// exp((K+1)^2 pi * t.error_bound). Assumes a ScopedPrecision is active.
inline BoundedValue phi_direct(const BoundedValue& t, const PrecisionContext& ctx) {
  BoundCalc bc(ctx);
  const std::size_t K = phi_cutoff(t.value, ctx);
  if (K > ctx.max_terms)
    throw series_budget_error("phi: needs " + std::to_string(K) + " terms, max_terms = " +
                              std::to_string(ctx.max_terms));

  const BoundedValue pit = bc.mul(bc.pi(), t);
  BoundedValue acc = bc.exact(0L);
  for (std::size_t k = 1; k <= K; ++k) {
    const auto k2 = static_cast<long>(k) * static_cast<long>(k);
    acc = bc.add(acc, bc.exp_of(bc.neg(bc.mul(bc.exact(k2), pit))));
  }

  // Tail: sum_{k>K} e^(-k^2 pi t) <= e^(-(K+1)^2 pi t) / (1 - e^(-(2K+3) pi t)),
  // consecutive exponents stepping by at least (2K+3) pi t, taken at the low
  // edge of the enclosure of t.
  const real_t kp1 = real_t(static_cast<unsigned long>(K) + 1);
  const real_t t_low = t.value - t.error_bound;
  if (!(t_low > 0)) throw std::domain_error("phi: argument enclosure touches zero");
  const real_t pi_v = const_pi();
  const real_t head = exp(-kp1 * kp1 * pi_v * t_low);
  const real_t gap = 1 - exp(-(2 * kp1 + 1) * pi_v * t_low);
  acc.error_bound = bc.inflated(acc.error_bound + head / gap);
  return acc;
}

}  // namespace detail

/// phi(x) with certified bound; reroutes through the modular identity when
/// x < 1e-4 (where the direct series needs ~1/sqrt(x) terms).
inline BoundedValue phi(const real_t& x_in, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  const real_t x = snap(x_in);
  if (!(x > 0)) throw std::domain_error("phi: x must be > 0");
  BoundCalc bc(ctx);
  if (x >= real_t("1e-4")) return detail::phi_direct(bc.exact(x), ctx);

  // phi(x) = ((1 + 2 phi(1/x)) / sqrt(x) - 1) / 2
  const BoundedValue far = detail::phi_direct(bc.div(bc.exact(1L), bc.exact(x)), ctx);
  const BoundedValue theta_far = bc.add(bc.exact(1L), bc.scale2(far, 1));
  const BoundedValue theta_here = bc.div(theta_far, bc.sqrt_of(bc.exact(x)));
  return bc.scale2(bc.sub(theta_here, bc.exact(1L)), -1);
}

/// theta(x) = 1 + 2 phi(x).
inline BoundedValue theta(const real_t& x_in, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  BoundCalc bc(ctx);
  const BoundedValue p = phi(x_in, ctx);
  return bc.add(bc.exact(1L), bc.scale2(p, 1));
}

/// theta(x) - x^(-1/2) theta(1/x), both sides evaluated by the direct series.
inline BoundedValue theta_functional_residual(const real_t& x_in, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  const real_t x = snap(x_in);
  if (!(x > 0)) throw std::domain_error("theta_functional_residual: x must be > 0");

  BoundCalc bc(ctx);
  auto theta_direct = [&](const BoundedValue& t) {
    return bc.add(bc.exact(1L), bc.scale2(detail::phi_direct(t, ctx), 1));
  };
  const BoundedValue lhs = theta_direct(bc.exact(x));
  const BoundedValue rhs_theta = theta_direct(bc.div(bc.exact(1L), bc.exact(x)));
  const BoundedValue rhs = bc.div(rhs_theta, bc.sqrt_of(bc.exact(x)));
  return bc.sub(lhs, rhs);
}

/// Closed-form tail bound 3 e^(-pi/(2x)) / sqrt(x) for the weighted-mean
/// identities' remainder on 0 < x <= 1.
inline real_t remainder_bound(const real_t& x_in, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  const real_t x = snap(x_in);
  if (!(x > 0) || x > 1) throw std::domain_error("remainder_bound: x must lie in (0, 1]");
  return 3 * exp(-const_pi() / (2 * x)) / sqrt(x);
}

}  // namespace polya
