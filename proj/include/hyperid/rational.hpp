#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include "errors.hpp"

namespace hyperid {

// Arbitrary-precision rational, always in lowest terms with positive
// denominator. Thin wrapper over mpq_class so equality is structural.
class Rat {
public:
  Rat() : q_(0) {}
  Rat(long n) : q_(n) {}
  Rat(long num, long den) {
    if (den == 0)
      throw Error("Rat: zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }
  explicit Rat(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

  // Accepts "p", "-p", "p/q", "-p/q" with decimal digits only.
  static Rat parse(const std::string& s) {
    const char* p = s.c_str();
    const char* begin = p;
    if (*p == '-')
      ++p;
    if (!is_digits(p))
      throw ParseError("bad rational: '" + s + "'");
    while (*p >= '0' && *p <= '9')
      ++p;
    if (*p == '/') {
      ++p;
      if (!is_digits(p))
        throw ParseError("bad rational: '" + s + "'");
      while (*p >= '0' && *p <= '9')
        ++p;
    }
    if (*p != '\0')
      throw ParseError("bad rational: '" + s + "'");
    mpq_class q;
    if (q.set_str(std::string(begin), 10) != 0)
      throw ParseError("bad rational: '" + s + "'");
    if (q.get_den() == 0)
      throw ParseError("zero denominator: '" + s + "'");
    q.canonicalize();
    return Rat(std::move(q), already_canonical{});
  }

  std::string str() const { return q_.get_str(); }

  const mpz_class& num() const { return q_.get_num(); }
  const mpz_class& den() const { return q_.get_den(); }
  double approx() const { return q_.get_d(); }

  bool is_zero() const { return sgn(q_) == 0; }
  bool is_integer() const { return q_.get_den() == 1; }
  bool is_nonpositive_integer() const {
    return is_integer() && sgn(q_) <= 0;
  }
  // True when this is an integer in {0, -1, ..., -(n-1)}: the set of bases
  // whose Pochhammer symbol of length n vanishes.
  bool kills_pochhammer(unsigned n) const {
    if (n == 0 || !is_integer() || sgn(q_) > 0)
      return false;
    return q_ >= -mpq_class(static_cast<long>(n) - 1);
  }

  // If *this = (m/k)^2 for rational m/k >= 0, returns m/k.
  std::optional<Rat> sqrt_exact() const {
    if (sgn(q_) < 0)
      return std::nullopt;
    if (mpz_perfect_square_p(q_.get_num().get_mpz_t()) == 0 ||
        mpz_perfect_square_p(q_.get_den().get_mpz_t()) == 0)
      return std::nullopt;
    mpz_class n, d;
    mpz_sqrt(n.get_mpz_t(), q_.get_num().get_mpz_t());
    mpz_sqrt(d.get_mpz_t(), q_.get_den().get_mpz_t());
    return Rat(mpq_class(n, d));
  }

  friend Rat operator+(const Rat& a, const Rat& b) { return Rat(mpq_class(a.q_ + b.q_), already_canonical{}); }
  friend Rat operator-(const Rat& a, const Rat& b) { return Rat(mpq_class(a.q_ - b.q_), already_canonical{}); }
  friend Rat operator*(const Rat& a, const Rat& b) { return Rat(mpq_class(a.q_ * b.q_), already_canonical{}); }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.is_zero())
      throw Error("Rat: division by zero");
    return Rat(mpq_class(a.q_ / b.q_), already_canonical{});
  }
  Rat operator-() const { return Rat(mpq_class(-q_), already_canonical{}); }

  Rat& operator+=(const Rat& b) { q_ += b.q_; return *this; }
  Rat& operator-=(const Rat& b) { q_ -= b.q_; return *this; }
  Rat& operator*=(const Rat& b) { q_ *= b.q_; return *this; }
  Rat& operator/=(const Rat& b) {
    if (b.is_zero())
      throw Error("Rat: division by zero");
    q_ /= b.q_;
    return *this;
  }

  friend bool operator==(const Rat& a, const Rat& b) { return mpq_equal(a.q_.get_mpq_t(), b.q_.get_mpq_t()) != 0; }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) { return mpq_cmp(a.q_.get_mpq_t(), b.q_.get_mpq_t()) < 0; }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

  friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.q_; }

  Rat abs() const { return sgn(q_) < 0 ? -*this : *this; }

  const mpq_class& raw() const { return q_; }

private:
  struct already_canonical {};
  Rat(mpq_class q, already_canonical) : q_(std::move(q)) {}

  static bool is_digits(const char* p) { return *p >= '0' && *p <= '9'; }

  mpq_class q_;
};

inline Rat half(const Rat& r) { return r / Rat(2); }

// Conjugate pair x +- lambda, stored via lambda^2 so the pair product stays
// rational whatever the sign of lambda^2.
struct SurdPairBase {
  Rat center;
  Rat lambda_sq;
  friend bool operator==(const SurdPairBase&, const SurdPairBase&) = default;
};

// (a)_n = a (a+1) ... (a+n-1); exact, zero when a is a nonpositive integer
// with -a < n.
inline Rat pochhammer(const Rat& a, unsigned n) {
  Rat r(1);
  Rat f = a;
  for (unsigned j = 0; j < n; ++j) {
    r *= f;
    f += Rat(1);
  }
  return r;
}

// (x+lambda)_n (x-lambda)_n = prod_{j<n} ((x+j)^2 - lambda^2).
inline Rat paired_pochhammer(const SurdPairBase& base, unsigned n) {
  Rat r(1);
  Rat f = base.center;
  for (unsigned j = 0; j < n; ++j) {
    r *= f * f - base.lambda_sq;
    f += Rat(1);
  }
  return r;
}

// (g+1)_N / (g)_N = (g+N)/g, with the pole check taken on (g)_N itself.
inline Rat shifted_quotient(const Rat& g, unsigned N) {
  if (N == 0)
    return Rat(1);
  if (g.kills_pochhammer(N))
    throw PoleError("shifted_quotient: (g)_N = 0 for g = " + g.str());
  return (g + Rat(static_cast<long>(N))) / g;
}

} // namespace hyperid
