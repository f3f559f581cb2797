#pragma once

#include <optional>
#include <utility>

#include "rational.hpp"

namespace hyperid {

// Auxiliary scalars attached to a concrete identity instance. Fields are
// populated per identity family; construction code rejects the exceptional
// loci (zero denominators, vanishing values that poison shifted quotients).
struct DerivedParams {
  std::optional<Rat> g, h, k, A, B, D, A_prime, c, lambda_sq;
};

namespace detail {
inline Rat guarded_ratio(const Rat& num, const Rat& den, const char* what) {
  if (den.is_zero())
    throw DegenerateParams(std::string(what) + ": zero denominator");
  Rat v = num / den;
  if (v.is_zero())
    throw DegenerateParams(std::string(what) + ": value is zero");
  return v;
}
} // namespace detail

// g for the extended Saalschutz-type sum.
inline Rat g_ext_saalschutz(const Rat& a, const Rat& b, const Rat& c, const Rat& f) {
  return detail::guarded_ratio(f * (Rat(1) + b - c) * (Rat(1) + a - c),
                               a * b - f * (Rat(1) + a + b - c), "g");
}

// g for the very-well-poised 7F6 -> shifted-quotient sum.
inline Rat g_vwp5f4(const Rat& a, const Rat& b, const Rat& d, const Rat& f) {
  return detail::guarded_ratio(f * (b + d - a) * (f - a), f * (a - f) - d * b, "g");
}

// h entering the two-a parameter 9F8 -> 5F4 transformation.
inline Rat h_whipple_ext(const Rat& f, const Rat& p, const Rat& a1, const Rat& a2) {
  return detail::guarded_ratio(p * (a1 + a2 - f + Rat(1)) * (p - f + Rat(1)),
                               p * (f - p - Rat(1)) - a1 * a2, "h");
}

// h for the closed-form 9F8 sum; equals h_whipple_ext at
// a2 = 2f - 2 - d1 - d2 - a1 + N.
inline Rat h_dougall_ext(const Rat& f, const Rat& p, const Rat& a1, const Rat& d1,
                         const Rat& d2, const Rat& N) {
  return detail::guarded_ratio(
      p * (f - Rat(1) - d1 - d2 + N) * (p - f + Rat(1)),
      p * (f - p - Rat(1)) - a1 * (Rat(2) * f - Rat(2) - d1 - d2 - a1 + N), "h");
}

// k as a fixed scalar built from h.
inline Rat k_quotient_params(const Rat& h, const Rat& a1, const Rat& d1, const Rat& d2,
                             const Rat& f) {
  return detail::guarded_ratio(
      h * (Rat(1) + d1 + a1 - f) * (Rat(1) + d2 + a1 - f),
      d1 * d2 - h * (Rat(1) + d1 + d2 + a1 - f), "k");
}

// Core quantities of the three-term transformation family.
struct BaileyCore {
  Rat A, B, D, c, lambda_sq;
};

inline BaileyCore bailey_BDA(const Rat& f, const Rat& p, const Rat& a1, const Rat& d1,
                             const Rat& d2) {
  const Rat c = Rat(2) * f - Rat(2) - d1 - d2 - a1;
  const Rat A = f - d1 - d2 - Rat(1);
  const Rat P = p * (Rat(1) - f + p);
  const Rat G = Rat(1) + a1 + d1 + d2 - f;
  const Rat den = P * G + d1 * d2 * a1;
  if (den.is_zero())
    throw DegenerateParams("B,D: shared denominator vanishes");
  const Rat B = (d1 * d2 * (P + a1 * c) + P * A * G) / den;
  const Rat D = -(P * (Rat(1) + a1 + d1 - f) * (Rat(1) + a1 + d2 - f)) / den;
  if (A.is_zero())
    throw DegenerateParams("A = f-d1-d2-1 is zero");
  if (D.is_zero())
    throw DegenerateParams("D is zero");
  if (B.is_nonpositive_integer())
    throw DegenerateParams("B is a nonpositive integer: " + B.str());
  return BaileyCore{A, B, D, c, c * c / Rat(4) - A * D};
}

// Linear constraints fixing c and b3 for the three-term transformation.
inline std::pair<Rat, Rat> solve_2_7_constraints(const Rat& f, const Rat& a1, const Rat& d1,
                                                 const Rat& d2, const Rat& b1, const Rat& b2,
                                                 const Rat& N) {
  Rat c = Rat(2) * f - Rat(2) - d1 - d2 - a1;
  Rat b3 = Rat(3) * f - Rat(2) - b1 - b2 - a1 - d1 - d2 + N;
  return {c, b3};
}

// Coefficient of the correction series in the three-term transformation.
inline Rat a_prime_2_7(const BaileyCore& core, const Rat& f, const Rat& a1, const Rat& d1,
                       const Rat& d2, const Rat& b1, const Rat& b2, const Rat& b3,
                       const Rat& N) {
  const Rat& c = core.c;
  const Rat num = c * (Rat(1) + half(c)) * b1 * b2 * b3 * (f - a1 - d2 - Rat(1)) *
                  (f - a1 - d1 - Rat(1)) * core.A * (core.B + Rat(1)) * (-N);
  const Rat den = half(c) * (Rat(1) + c - b1) * (Rat(1) + c - b2) * (Rat(1) + c - b3) *
                  (f - d1) * (f - d2) * (f - a1) * core.B * (Rat(1) + c + N);
  if (den.is_zero())
    throw DegenerateParams("A': zero denominator");
  return num / den;
}

// n-dependent reading of k used inside the transform-derivation checks.
inline Rat k_of_n(const BaileyCore& core, const Rat& n) {
  if ((core.B + n).is_zero())
    throw DegenerateParams("k(n): B + n vanishes");
  Rat v = core.D * (core.A + n) / (core.B + n);
  if (v.is_zero())
    throw DegenerateParams("k(n) is zero");
  return v;
}

} // namespace hyperid
