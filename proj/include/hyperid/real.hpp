#pragma once

#include <mpfr.h>

#include <algorithm>
#include <string>
#include <utility>

#include "rational.hpp"

namespace hyperid {

// Arbitrary-precision real. Precision is a per-value property fixed at
// construction; binary operations compute at the wider of the two operands.
class Real {
public:
  explicit Real(mpfr_prec_t prec = 128) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Real(long n, mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_si(v_, n, MPFR_RNDN);
  }
  Real(const Rat& q, mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_q(v_, q.raw().get_mpq_t(), MPFR_RNDN);
  }
  Real(const Real& o) {
    mpfr_init2(v_, o.prec());
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, o.prec());
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sgn() const { return mpfr_sgn(v_); }
  double approx() const { return mpfr_get_d(v_, MPFR_RNDN); }

  // 2^e at the given precision (exact).
  static Real pow2(long e, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
    return r;
  }
  // 10^e at the given precision.
  static Real pow10(long e, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_ui_pow_ui(r.v_, 10, static_cast<unsigned long>(e < 0 ? -e : e), MPFR_RNDN);
    if (e < 0)
      mpfr_ui_div(r.v_, 1, r.v_, MPFR_RNDN);
    return r;
  }

  Real abs() const {
    Real r(prec());
    mpfr_abs(r.v_, v_, MPFR_RNDN);
    return r;
  }
  Real operator-() const {
    Real r(prec());
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
  }

#define HYPERID_REAL_BINOP(op, fn)                                             \
  friend Real operator op(const Real& a, const Real& b) {                     \
    Real r(std::max(a.prec(), b.prec()));                                     \
    fn(r.v_, a.v_, b.v_, MPFR_RNDN);                                          \
    return r;                                                                 \
  }                                                                           \
  Real& operator op##=(const Real& b) {                                       \
    fn(v_, v_, b.v_, MPFR_RNDN);                                              \
    return *this;                                                             \
  }
  HYPERID_REAL_BINOP(+, mpfr_add)
  HYPERID_REAL_BINOP(-, mpfr_sub)
  HYPERID_REAL_BINOP(*, mpfr_mul)
#undef HYPERID_REAL_BINOP

  friend Real operator/(const Real& a, const Real& b) {
    if (b.is_zero())
      throw Error("Real division by zero");
    Real r(std::max(a.prec(), b.prec()));
    mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  Real& operator/=(const Real& b) {
    if (b.is_zero())
      throw Error("Real division by zero");
    mpfr_div(v_, v_, b.v_, MPFR_RNDN);
    return *this;
  }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
  friend bool operator!=(const Real& a, const Real& b) { return !(a == b); }
  friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }

  // Decimal rendering with an explicit digit count (scientific form).
  std::string str(int digits = 20) const {
    char* s = nullptr;
    if (mpfr_asprintf(&s, "%.*Re", digits > 1 ? digits - 1 : 1, v_) < 0)
      throw Error("Real formatting failed");
    std::string out(s);
    mpfr_free_str(s);
    return out;
  }

private:
  mpfr_t v_;
};

namespace detail {
// True when x is within 2^(-3p/4) of an integer <= 0.
inline bool near_nonpositive_integer(const Real& x) {
  if (mpfr_sgn(x.raw()) > 0 && mpfr_cmp_ui(x.raw(), 1) >= 0)
    return false;
  mpfr_prec_t p = x.prec();
  Real r(p), d(p);
  mpfr_round(r.raw(), x.raw());
  if (mpfr_sgn(r.raw()) > 0)
    return false;
  mpfr_sub(d.raw(), x.raw(), r.raw(), MPFR_RNDN);
  mpfr_abs(d.raw(), d.raw(), MPFR_RNDN);
  Real tol = Real::pow2(-static_cast<long>((3 * p) / 4), p);
  return mpfr_cmp(d.raw(), tol.raw()) < 0;
}
} // namespace detail

inline Real gamma(const Real& x) {
  if (detail::near_nonpositive_integer(x))
    throw PoleError("gamma evaluated too close to a nonpositive integer: " + x.str(8));
  Real r(x.prec());
  mpfr_gamma(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

inline Real gamma(const Rat& q, mpfr_prec_t prec) {
  if (q.is_nonpositive_integer())
    throw PoleError("gamma pole at " + q.str());
  return gamma(Real(q, prec));
}

// |a - b| <= 10^-digits * max(|b|, 10^-digits)
inline bool agree_to_digits(const Real& a, const Real& b, unsigned digits) {
  mpfr_prec_t p = std::max(a.prec(), b.prec());
  Real tol = Real::pow10(-static_cast<long>(digits), p);
  Real scale = b.abs();
  if (scale < tol)
    scale = tol;
  return (a - b).abs() <= tol * scale;
}

} // namespace hyperid
