#pragma once

// Certified extended-precision arithmetic.
//
// Values are MPFR floats (via Boost.Multiprecision, expression templates off)
// paired with an explicit error bound: a BoundedValue (v, e) asserts that the
// true quantity lies in [v - e, v + e]. Arithmetic propagates bounds affinely
// and charges each operation one rounding term of eps = 2^(1 - w) relative,
// where w is the working precision in bits. All internal evaluation runs at
// the requested precision plus 16 guard bits; the bound arithmetic itself is
// inflated by a factor (1 + 2^-20), which dominates its own rounding error by
// orders of magnitude.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace polya {

using real_t = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                              boost::multiprecision::et_off>;
using rational_t = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                                 boost::multiprecision::et_off>;
using integer_t = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                                boost::multiprecision::et_off>;

inline constexpr unsigned kGuardBits = 16;

/// Precision and truncation budget for every series evaluation.
struct PrecisionContext {
  unsigned precision_bits = 128;
  std::size_t max_terms = 4'000'000;

  PrecisionContext() = default;
  PrecisionContext(unsigned bits, std::size_t terms = 4'000'000) : precision_bits(bits), max_terms(terms) {
    if (precision_bits < 53) throw std::domain_error("PrecisionContext: precision_bits must be >= 53");
    if (max_terms < 1) throw std::domain_error("PrecisionContext: max_terms must be >= 1");
  }

  unsigned working_bits() const { return precision_bits + kGuardBits; }
};

/// Thrown when a series would need more than max_terms terms to meet its
/// error target.
class series_budget_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Decimal digits that guarantee at least `bits` bits of mantissa once Boost
// converts back (conversion rounds the bit count up, so +2 digits suffice).
inline unsigned digits10_for_bits(unsigned bits) {
  return static_cast<unsigned>(static_cast<double>(bits) * 0.30103) + 2;
}

}  // namespace detail

/// RAII guard: sets the thread's default MPFR precision so that fresh
/// real_t temporaries carry at least `bits` bits, restoring on destruction.
class ScopedPrecision {
 public:
  explicit ScopedPrecision(unsigned bits) : saved_(real_t::default_precision()) {
    real_t::default_precision(detail::digits10_for_bits(bits));
  }
  ~ScopedPrecision() { real_t::default_precision(saved_); }
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;

 private:
  unsigned saved_;
};

/// Re-round a value to the current default precision (copies preserve the
/// source's precision, so inputs from other scopes must be snapped).
inline real_t snap(const real_t& x) {
  real_t r = x;
  r.precision(real_t::default_precision());
  return r;
}

/// pi at the current default precision, via MPFR's built-in constant.
inline real_t const_pi() {
  real_t p;
  mpfr_const_pi(p.backend().data(), MPFR_RNDN);
  return p;
}

inline real_t const_ln2() {
  real_t l;
  mpfr_const_log2(l.backend().data(), MPFR_RNDN);
  return l;
}

/// A value together with a certified absolute error bound.
struct BoundedValue {
  real_t value;
  real_t error_bound;  // >= 0

  bool certainly_positive() const { return value - error_bound > 0; }
  bool certainly_negative() const { return value + error_bound < 0; }
  /// +1 / -1 when the sign is certified, 0 when the enclosure straddles zero.
  int certified_sign() const { return certainly_positive() ? +1 : (certainly_negative() ? -1 : 0); }
};

/// Bound-propagating arithmetic at one fixed working precision. Construct it
/// inside a ScopedPrecision covering ctx.working_bits().
class BoundCalc {
 public:
  explicit BoundCalc(const PrecisionContext& ctx)
      : eps_(ldexp(real_t(1), 1 - static_cast<int>(ctx.working_bits()))),
        inflate_(real_t(1) + ldexp(real_t(1), -20)) {}

  const real_t& eps() const { return eps_; }

  /// Inflate a bound computed in rounded arithmetic so it stays an upper bound.
  real_t inflated(const real_t& raw_bound) const { return raw_bound * inflate_; }

  BoundedValue exact(long v) const { return {real_t(v), real_t(0)}; }
  BoundedValue exact(const real_t& v) const { return {v, real_t(0)}; }

  /// A value already rounded once at working precision (e.g. an MPFR
  /// elementary-function result): charge one eps.
  BoundedValue rounded(const real_t& v) const { return {v, inflated(eps_ * abs(v))}; }

  /// Parse a decimal literal; the binary conversion is one rounding.
  BoundedValue parse(const std::string& decimal) const { return rounded(real_t(decimal)); }

  BoundedValue from_rational(const rational_t& q) const { return rounded(static_cast<real_t>(q)); }

  BoundedValue pi() const { return rounded(const_pi()); }

  BoundedValue neg(const BoundedValue& a) const { return {-a.value, a.error_bound}; }

  BoundedValue add(const BoundedValue& a, const BoundedValue& b) const {
    real_t v = a.value + b.value;
    return {v, inflated(a.error_bound + b.error_bound + eps_ * abs(v))};
  }

  BoundedValue sub(const BoundedValue& a, const BoundedValue& b) const {
    real_t v = a.value - b.value;
    return {v, inflated(a.error_bound + b.error_bound + eps_ * abs(v))};
  }

  BoundedValue mul(const BoundedValue& a, const BoundedValue& b) const {
    real_t v = a.value * b.value;
    real_t raw = abs(a.value) * b.error_bound + abs(b.value) * a.error_bound +
                 a.error_bound * b.error_bound + eps_ * abs(v);
    return {v, inflated(raw)};
  }

  /// Multiplication by an exact power of two is a single exact scaling.
  BoundedValue scale2(const BoundedValue& a, int k) const {
    return {ldexp(a.value, k), ldexp(a.error_bound, k)};
  }

  BoundedValue div(const BoundedValue& a, const BoundedValue& b) const {
    real_t denom_low = abs(b.value) - b.error_bound;
    if (!(denom_low > 0)) throw std::domain_error("BoundCalc::div: divisor enclosure touches zero");
    real_t v = a.value / b.value;
    real_t raw = (a.error_bound + abs(v) * b.error_bound) / denom_low + eps_ * abs(v);
    return {v, inflated(raw)};
  }

  BoundedValue sqrt_of(const BoundedValue& a) const {
    real_t low = a.value - a.error_bound;
    if (low < 0) throw std::domain_error("BoundCalc::sqrt: enclosure extends below zero");
    real_t v = sqrt(a.value);
    real_t raw = (low > 0) ? a.error_bound / (2 * sqrt(low)) : sqrt(a.error_bound);
    return {v, inflated(raw + eps_ * abs(v))};
  }

  /// exp with |input error| <= 1/2 handled by e^d - 1 <= d + d^2; larger
  /// input errors fall back to the exact expm1 of the bound.
  BoundedValue exp_of(const BoundedValue& a) const {
    real_t v = exp(a.value);
    real_t growth;
    if (a.error_bound <= real_t(0.5))
      growth = a.error_bound + a.error_bound * a.error_bound;
    else
      growth = exp(a.error_bound) - 1;
    return {v, inflated(v * growth + eps_ * v)};
  }

  BoundedValue abs_of(const BoundedValue& a) const { return {abs(a.value), a.error_bound}; }

 private:
  real_t eps_;
  real_t inflate_;
};

/// Human-readable rendering: value to the context's decimal width, bound in
/// two-digit scientific notation, e.g. "0.123313 ± 3.1e-38".
inline std::string render_bounded(const BoundedValue& bv, const PrecisionContext& ctx) {
  const auto digits = static_cast<std::streamsize>(static_cast<double>(ctx.precision_bits) * 0.30103) + 1;
  std::string out = bv.value.str(digits);
  out += " ± ";
  out += bv.error_bound.str(2, std::ios_base::scientific);
  return out;
}

/// Full-precision decimal string of a real (round-trips through parsing).
inline std::string decimal_string(const real_t& x, const PrecisionContext& ctx) {
  const auto digits = static_cast<std::streamsize>(static_cast<double>(ctx.precision_bits) * 0.30103) + 3;
  return x.str(digits);
}

}  // namespace polya
