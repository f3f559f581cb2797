#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "derived.hpp"
#include "rational.hpp"

namespace hyperid {

// Finite-support transform engine: four memoized term generators and the
// cutoff R with delta(r) = 0 for r > R.
class BaileySetup {
public:
  using Gen = std::function<Rat(unsigned)>;

  BaileySetup(Gen alpha, Gen delta, Gen u, Gen v, unsigned cutoff)
      : alpha_(std::move(alpha)), delta_(std::move(delta)), u_(std::move(u)),
        v_(std::move(v)), cutoff_(cutoff) {}

  Rat alpha(unsigned r) const { return get(am_, alpha_, r); }
  Rat delta(unsigned r) const { return get(dm_, delta_, r); }
  Rat u(unsigned r) const { return get(um_, u_, r); }
  Rat v(unsigned r) const { return get(vm_, v_, r); }
  unsigned cutoff() const { return cutoff_; }

private:
  static Rat get(std::vector<std::optional<Rat>>& memo, const Gen& g, unsigned r) {
    if (memo.size() <= r)
      memo.resize(r + 1);
    if (!memo[r])
      memo[r] = g(r);
    return *memo[r];
  }
  Gen alpha_, delta_, u_, v_;
  mutable std::vector<std::optional<Rat>> am_, dm_, um_, vm_;
  unsigned cutoff_;
};

inline Rat beta(const BaileySetup& s, unsigned n) {
  Rat acc(0);
  for (unsigned r = 0; r <= n; ++r)
    acc += s.alpha(r) * s.u(n - r) * s.v(n + r);
  return acc;
}

inline Rat gamma(const BaileySetup& s, unsigned n) {
  Rat acc(0);
  for (unsigned r = n; r <= s.cutoff(); ++r)
    acc += s.delta(r) * s.u(r - n) * s.v(r + n);
  return acc;
}

// Both sides of the transform identity over the finite support.
inline std::pair<Rat, Rat> transform_sides(const BaileySetup& s) {
  Rat lhs(0), rhs(0);
  for (unsigned n = 0; n <= s.cutoff(); ++n) {
    lhs += s.alpha(n) * gamma(s, n);
    rhs += beta(s, n) * s.delta(n);
  }
  return {lhs, rhs};
}

inline bool transform_check(const BaileySetup& s) {
  auto [lhs, rhs] = transform_sides(s);
  return lhs == rhs;
}

namespace detail {
// prod (nums)_r / (prod (dens)_r [r!]) with optional (-1)^r; throws PoleError
// on vanishing denominator Pochhammers.
inline Rat poch_kernel(const std::vector<Rat>& nums, const std::vector<Rat>& dens,
                       unsigned r, bool with_factorial, int sign = 1) {
  Rat den(1);
  for (const Rat& b : dens) {
    Rat p = pochhammer(b, r);
    if (p.is_zero())
      throw PoleError("Pochhammer (" + b.str() + ")_" + std::to_string(r) + " vanishes");
    den *= p;
  }
  if (with_factorial)
    den *= pochhammer(Rat(1), r);
  Rat v(1);
  for (const Rat& a : nums)
    v *= pochhammer(a, r);
  v /= den;
  if (sign < 0 && (r & 1u))
    v = -v;
  return v;
}
} // namespace detail

// A concrete instantiation: the transform data plus the displayed closed
// forms its beta and gamma are asserted to equal.
struct DerivationSetup {
  BaileySetup setup;
  std::function<Rat(unsigned)> beta_closed;
  std::function<Rat(unsigned)> gamma_closed;
  std::function<Rat(unsigned)> beta_closed_alt; // second factorization; may be empty
};

// First instantiation: very-well-poised kernel against a balanced
// (Saalschutz-summable) delta; u_r = 1/r!, v_r = 1/(f)_r.
inline DerivationSetup section3_setup_first(const Rat& f, const Rat& p, const Rat& a1,
                                            const Rat& a2, const Rat& d1, const Rat& d2,
                                            unsigned N) {
  using detail::poch_kernel;
  const Rat h = h_whipple_ext(f, p, a1, a2); // throws DegenerateParams on the bad locus
  const Rat NN(static_cast<long>(N));
  const Rat gpre_den = pochhammer(f, N) * pochhammer(f - d1 - d2, N);
  if (gpre_den.is_zero())
    throw DegenerateParams("gamma prefactor denominator vanishes");
  const Rat gpre = pochhammer(f - d1, N) * pochhammer(f - d2, N) / gpre_den;

  auto alpha = [=](unsigned r) {
    return poch_kernel({f - Rat(1), half(f + Rat(1)), a1, a2, f - p, p + Rat(1)},
                       {half(f - Rat(1)), f - a1, f - a2, p, f - p - Rat(1)}, r, true, -1);
  };
  auto delta = [=](unsigned r) {
    return poch_kernel({d1, d2, -NN}, {Rat(1) + d1 + d2 - f - NN}, r, false);
  };
  auto u = [](unsigned r) { return detail::poch_kernel({}, {}, r, true); };
  auto v = [=](unsigned r) { return detail::poch_kernel({}, {f}, r, false); };

  DerivationSetup out{BaileySetup(alpha, delta, u, v, N), nullptr, nullptr, nullptr};
  out.beta_closed = [=](unsigned n) {
    return poch_kernel({f - a1 - a2 - Rat(1), h + Rat(1)}, {f - a1, f - a2, h}, n, true);
  };
  out.gamma_closed = [=](unsigned n) {
    return gpre * poch_kernel({d1, d2, -NN}, {f - d1, f - d2, f + NN}, n, false, -1);
  };
  return out;
}

// Second instantiation: very-well-poised kernel with the extra d-columns,
// u_r = (A)_r/r!, v_r = (c)_r/(f)_r, delta the closed-form-9F8 kernel, under
// the c and b3 linear constraints.
inline DerivationSetup section3_setup_second(const Rat& f, const Rat& p, const Rat& a1,
                                             const Rat& d1, const Rat& d2, const Rat& b1,
                                             const Rat& b2, const Rat& b3, unsigned N) {
  using detail::poch_kernel;
  const Rat NN(static_cast<long>(N));
  auto [c_expect, b3_expect] = solve_2_7_constraints(f, a1, d1, d2, b1, b2, NN);
  if (b3 != b3_expect)
    throw DegenerateParams("b3 violates the linear constraint: expected " + b3_expect.str());
  const BaileyCore core = bailey_BDA(f, p, a1, d1, d2);
  const Rat c = core.c;
  if (c != c_expect)
    throw DegenerateParams("c mismatch"); // cannot happen; same formula
  // the closed beta forms divide by (A+n) resp. (A+1)_n
  if (core.A.is_integer() && core.A <= Rat(0) && -core.A <= NN)
    throw DegenerateParams("A is a nonpositive integer within the cutoff");

  auto alpha = [=](unsigned r) {
    return poch_kernel({f - Rat(1), half(f + Rat(1)), a1, d1, d2, f - p, p + Rat(1)},
                       {half(f - Rat(1)), f - a1, f - d1, f - d2, p, f - p - Rat(1)}, r,
                       true);
  };
  auto delta = [=](unsigned r) {
    return poch_kernel(
        {Rat(1) + half(c), b1, b2, b3, -NN},
        {half(c), Rat(1) + c - b1, Rat(1) + c - b2, Rat(1) + c - b3, Rat(1) + c + NN}, r,
        false);
  };
  const Rat ubase = f - a1 - d1 - d2 - Rat(1);
  auto u = [=](unsigned r) { return poch_kernel({ubase}, {}, r, true); };
  auto v = [=](unsigned r) { return poch_kernel({c}, {f}, r, false); };

  const Rat mpre_den = pochhammer(Rat(1) + c - b1, N) * pochhammer(Rat(1) + c - b2, N) *
                       pochhammer(Rat(1) + c - b3, N) *
                       pochhammer(Rat(1) + c - b1 - b2 - b3, N);
  if (mpre_den.is_zero())
    throw DegenerateParams("gamma prefactor denominator vanishes");
  const Rat mpre = pochhammer(Rat(1) + c, N) * pochhammer(Rat(1) + c - b1 - b2, N) *
                   pochhammer(Rat(1) + c - b1 - b3, N) *
                   pochhammer(Rat(1) + c - b2 - b3, N) / mpre_den;

  DerivationSetup out{BaileySetup(alpha, delta, u, v, N), nullptr, nullptr, nullptr};
  auto beta_base = [=](unsigned n) {
    return poch_kernel({c, f - d1 - d2, f - a1 - d1 - Rat(1), f - a1 - d2 - Rat(1)},
                       {f - a1, f - d2, f - d1}, n, true);
  };
  out.beta_closed = [=](unsigned n) {
    Rat nn(static_cast<long>(n));
    Rat k = core.D * (core.A + nn) / (core.B + nn);
    if (k.is_zero())
      throw PoleError("k(n) vanishes at n = " + std::to_string(n));
    return beta_base(n) * (k + nn) / k;
  };
  out.beta_closed_alt = [=](unsigned n) {
    Rat pa1 = pochhammer(core.A + Rat(1), n);
    Rat ppd = paired_pochhammer({half(c), core.lambda_sq}, n);
    if (pa1.is_zero() || ppd.is_zero())
      throw PoleError("factorized closed form hits a vanishing factor at n = " +
                      std::to_string(n));
    return beta_base(n) * pochhammer(core.A, n) / pa1 *
           paired_pochhammer({Rat(1) + half(c), core.lambda_sq}, n) / ppd;
  };
  out.gamma_closed = [=](unsigned n) {
    return mpre * poch_kernel({b1, b2, b3, -NN}, {f - b1, f - b2, f - b3, f + NN}, n, false);
  };
  return out;
}

} // namespace hyperid
