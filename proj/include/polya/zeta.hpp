#pragma once

// Riemann zeta on the real ray s > 1, by Euler-Maclaurin:
//
//   zeta(s) = sum_{n<N} n^-s + N^(1-s)/(s-1) + N^-s/2
//           + sum_{j=1}^{J} B_{2j}/(2j)! * s(s+1)...(s+2j-2) * N^(-s-2j+1) + R_J
//
// For real s > 0 the correction terms alternate and envelope the remainder,
// so |R_J| is at most the first omitted term. N starts at max(20, precision)
// and J grows until the next term clears the error target; if the asymptotic
// tail starts diverging first, N doubles and the evaluation restarts.
//
// Bernoulli numbers are computed once as exact rationals via the defining
// recurrence  B_m = -1/(m+1) * sum_{k<m} C(m+1,k) B_k  and cached.

#include <mutex>
#include <stdexcept>
#include <vector>

#include "polya/precision.hpp"

namespace polya {

namespace detail {

/// B_0, B_1, ... as exact rationals (B_1 = -1/2). Thread-safe, cached.
inline const std::vector<rational_t>& bernoulli_table(std::size_t upto_index) {
  static std::mutex mutex;
  static std::vector<rational_t> table{rational_t(1)};  // B_0
  std::lock_guard<std::mutex> lock(mutex);
  while (table.size() <= upto_index) {
    const std::size_t m = table.size();
    rational_t acc(0);
    integer_t binom(1);  // C(m+1, k), updated incrementally
    for (std::size_t k = 0; k < m; ++k) {
      acc += rational_t(binom) * table[k];
      binom = binom * static_cast<long>(m + 1 - k) / static_cast<long>(k + 1);
    }
    table.push_back(-acc / static_cast<long>(m + 1));
  }
  return table;
}

inline rational_t bernoulli_rational(unsigned n) { return bernoulli_table(n)[n]; }

}  // namespace detail

/// zeta(s) for real s > 1 + 1e-6, with a certified error bound.
inline BoundedValue zeta_real(const real_t& s_in, const PrecisionContext& ctx) {
  ScopedPrecision scope(ctx.working_bits());
  const real_t s = snap(s_in);
  if (!(s > real_t(1) + real_t("1e-6")))
    throw std::domain_error("zeta_real: s must exceed 1 + 1e-6");

  BoundCalc bc(ctx);
  const BoundedValue s_exact = bc.exact(s);

  unsigned long N = std::max<unsigned long>(20, ctx.precision_bits);
  const unsigned kMaxCorrectionTerms = 400;

  for (int attempt = 0; attempt < 4; ++attempt, N *= 2) {
    // Direct block sum_{n=1}^{N-1} n^-s.
    BoundedValue acc = bc.exact(1L);
    for (unsigned long n = 2; n < N; ++n)
      acc = bc.add(acc, bc.rounded(pow(real_t(n), -s)));

    // Integral and half-sample corrections.
    const BoundedValue n_to_minus_s = bc.rounded(pow(real_t(N), -s));
    const BoundedValue integral =
        bc.div(bc.rounded(pow(real_t(N), 1 - s)), bc.sub(s_exact, bc.exact(1L)));
    acc = bc.add(acc, integral);
    acc = bc.add(acc, bc.scale2(n_to_minus_s, -1));

    const real_t target = ldexp(abs(acc.value), -static_cast<int>(ctx.precision_bits) - 10);

    // Bernoulli corrections: term_j = B_2j/(2j)! * (s)_(2j-1) * N^(1-s-2j).
    BoundedValue rising = s_exact;                                   // (s)_1
    BoundedValue npow = bc.div(n_to_minus_s, bc.exact(long(N)));     // N^(-s-1)
    const BoundedValue inv_n2 = bc.div(bc.exact(1L), bc.exact(long(N) * long(N)));
    integer_t factorial(2);  // (2j)!
    real_t prev_mag;
    bool converged = false;

    for (unsigned j = 1; j <= kMaxCorrectionTerms; ++j) {
      if (j > 1) {
        factorial *= static_cast<long>(2 * j - 1);
        factorial *= static_cast<long>(2 * j);
        rising = bc.mul(rising, bc.add(s_exact, bc.exact(long(2 * j - 3))));
        rising = bc.mul(rising, bc.add(s_exact, bc.exact(long(2 * j - 2))));
        npow = bc.mul(npow, inv_n2);
      }
      const rational_t coeff = detail::bernoulli_rational(2 * j) / rational_t(factorial);
      const BoundedValue term = bc.mul(bc.from_rational(coeff), bc.mul(rising, npow));
      const real_t mag = abs(term.value) + term.error_bound;

      if (mag <= target) {
        // Stop before adding term_j; the remainder is bounded by it.
        acc.error_bound = bc.inflated(acc.error_bound + mag);
        converged = true;
        break;
      }
      if (j > 1 && mag > prev_mag) break;  // asymptotic divergence: restart with larger N
      prev_mag = mag;
      acc = bc.add(acc, term);
    }
    if (converged) return acc;
  }
  throw series_budget_error("zeta_real: Euler-Maclaurin failed to reach the error target");
}

}  // namespace polya
