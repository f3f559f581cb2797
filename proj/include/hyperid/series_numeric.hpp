#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "real.hpp"
#include "series.hpp"

namespace hyperid {

inline mpfr_prec_t working_precision(unsigned target_digits) {
  mpfr_prec_t p = static_cast<mpfr_prec_t>(std::ceil(3.4 * target_digits)) + 64;
  return std::max<mpfr_prec_t>(192, p);
}

// ---------------------------------------------------------------------------
// Gamma products
// ---------------------------------------------------------------------------

struct GammaProduct {
  std::vector<Rat> numerator_args;
  std::vector<Rat> denominator_args;
};

// Evaluate prod Gamma(num_i) / prod Gamma(den_j). Exact simplifications are
// applied first: identical arguments cancel, and functional-equation pairs
// (x over x+1, or x+1 over x) collapse to the exact rational 1/x resp. x —
// this keeps quotients like the trailing k-factor finite even when k sits on
// a gamma pole.
inline Real eval_gamma_product(const GammaProduct& gp, unsigned digits,
                               mpfr_prec_t prec_override = 0) {
  const mpfr_prec_t p = prec_override ? prec_override : working_precision(digits);
  std::vector<Rat> num = gp.numerator_args;
  std::vector<Rat> den = gp.denominator_args;
  Rat scale(1);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = num.begin(); it != num.end() && !changed; ++it) {
      for (auto jt = den.begin(); jt != den.end(); ++jt) {
        if (*it == *jt) {
          num.erase(it);
          den.erase(jt);
          changed = true;
          break;
        }
        if (*jt == *it + Rat(1)) {
          if (it->is_zero())
            throw PoleError("gamma quotient Gamma(0)/Gamma(1) has no finite value");
          scale /= *it;
          num.erase(it);
          den.erase(jt);
          changed = true;
          break;
        }
        if (*it == *jt + Rat(1)) {
          scale *= *jt;
          num.erase(it);
          den.erase(jt);
          changed = true;
          break;
        }
      }
    }
  }
  Real out(scale, p);
  for (const Rat& a : num)
    out *= gamma(a, p);
  for (const Rat& b : den)
    out /= gamma(b, p);
  return out;
}

// ---------------------------------------------------------------------------
// Non-terminating evaluation
// ---------------------------------------------------------------------------

namespace detail {

// Index of the last nonzero term when some numerator factor hits zero,
// i.e. the series is secretly terminating.
inline std::optional<unsigned long> effective_termination(const SeriesSpec& spec) {
  std::optional<unsigned long> best;
  auto keep_min = [&](unsigned long v) {
    if (!best || v < *best)
      best = v;
  };
  for (const auto& a : spec.numerators) {
    if (!entry_is_pair(a)) {
      const Rat& x = std::get<Rat>(a);
      if (x.is_nonpositive_integer())
        keep_min(mpz_get_ui(mpz_class(-x.num()).get_mpz_t()));
    } else {
      const auto& pr = std::get<SurdPairBase>(a);
      if (auto lam = pr.lambda_sq.sqrt_exact()) {
        for (const Rat& root : {-pr.center + *lam, -pr.center - *lam})
          if (root.is_integer() && root >= Rat(0))
            keep_min(mpz_get_ui(root.num().get_mpz_t()));
      }
    }
  }
  return best;
}

} // namespace detail

// Truncated summation with tail control at z = +-1. Converges when the
// parametric excess s has s > 0 (z=1) or s > -1 (z=-1); campaign samplers
// keep s >= 5 so the budget below is generous.
inline Real eval_nonterminating(const SeriesSpec& spec, unsigned target_digits,
                                mpfr_prec_t prec_override = 0,
                                unsigned long* truncation_out = nullptr) {
  detail::require_unit_argument(spec.z);
  const mpfr_prec_t p = prec_override ? prec_override : working_precision(target_digits);

  auto delegate = [&](unsigned long N) {
    SeriesSpec t = spec;
    t.termination = static_cast<unsigned>(N);
    if (truncation_out)
      *truncation_out = N;
    return Real(eval_terminating(t), p);
  };
  if (spec.termination)
    return delegate(*spec.termination);
  if (auto eff = detail::effective_termination(spec))
    return delegate(*eff);

  auto v = validate(spec);
  if (!v.ok())
    throw PoleError(v.errors.front());

  const Rat excess = classify(spec).parametric_excess;
  const bool alternating = spec.z == Rat(-1);
  if (!alternating && !(excess > Rat(0)))
    throw ConvergenceError("series at z=1 requires positive parametric excess, got " + excess.str());
  if (alternating && !(excess > Rat(-1)))
    throw ConvergenceError("series at z=-1 requires parametric excess > -1, got " + excess.str());

  // Per-entry running factors a+n (pairs keep (x+n, lambda^2)).
  struct Running {
    Real cur;
    bool pair;
    Real lam2;
  };
  auto start = [&](const SeriesEntry& e) {
    if (entry_is_pair(e)) {
      const auto& pr = std::get<SurdPairBase>(e);
      return Running{Real(pr.center, p), true, Real(pr.lambda_sq, p)};
    }
    return Running{Real(std::get<Rat>(e), p), false, Real(0L, p)};
  };
  std::vector<Running> nums, dens;
  for (const auto& a : spec.numerators)
    nums.push_back(start(a));
  for (const auto& b : spec.denominators)
    dens.push_back(start(b));
  auto factor = [&](Running& r) {
    if (!r.pair)
      return r.cur;
    return r.cur * r.cur - r.lam2;
  };

  const Real one(1L, p);
  const Real tol = Real::pow10(-static_cast<long>(target_digits) - 2, p);
  const unsigned long budget = 10000000;
  Real t(1L, p), sum(0L, p), prev_sum(0L, p), prev_abs_t(0L, p);
  bool have_checkpoint = false;
  unsigned long checkpoint = 64;
  unsigned monotone_run = 0;
  const bool excess_gt1 = excess > Rat(1);
  const Real tail_coeff = excess_gt1 ? one / Real(excess - Rat(1), p) : Real(0L, p);

  for (unsigned long n = 0; n <= budget; ++n) {
    sum += t;
    // advance t -> t_{n+1}
    Real fn(1L, p), fd(1L, p);
    for (auto& r : nums) {
      fn *= factor(r);
      r.cur += one;
    }
    for (auto& r : dens) {
      Real f = factor(r);
      if (f.is_zero())
        throw PoleError("denominator Pochhammer vanishes at n = " + std::to_string(n + 1));
      fd *= f;
      r.cur += one;
    }
    t = t * fn / (fd * Real(static_cast<long>(n) + 1, p));
    if (alternating)
      t = -t;
    Real abs_t = t.abs();
    if (n > 0 && abs_t < prev_abs_t)
      ++monotone_run;
    else
      monotone_run = 0;
    prev_abs_t = abs_t;

    if (n + 1 == checkpoint) {
      Real est(0L, p);
      bool est_valid = false;
      if (!alternating && excess_gt1) {
        est = abs_t * Real(static_cast<long>(n + 1), p) * tail_coeff;
        est_valid = true;
      } else if (alternating && monotone_run >= 64) {
        est = abs_t;
        est_valid = true;
      }
      if (have_checkpoint && est_valid) {
        Real drift = (sum - prev_sum).abs();
        if (est + drift < tol) {
          if (truncation_out)
            *truncation_out = n + 1;
          return sum;
        }
      }
      prev_sum = sum;
      have_checkpoint = true;
      checkpoint *= 2;
    }
  }
  throw ConvergenceError("tail bound not met within " + std::to_string(budget) + " terms");
}

// ---------------------------------------------------------------------------
// Series-vs-gamma-product comparison with the two-rung precision ladder
// ---------------------------------------------------------------------------

struct NumericCheck {
  bool pass = false;
  Real lhs{192};
  Real rhs{192};
  unsigned long truncation_index = 0;
  unsigned digits = 0;
};

// Compares a convergent series against scale * (gamma product) at precision
// p and again at p+64; passes only if both rungs agree to `digits` digits.
inline NumericCheck check_series_vs_gamma(const SeriesSpec& lhs, const GammaProduct& rhs,
                                          const Rat& scale, unsigned digits) {
  const mpfr_prec_t p = working_precision(digits);
  NumericCheck out;
  out.digits = digits;
  bool ok = true;
  for (mpfr_prec_t rung : {p, static_cast<mpfr_prec_t>(p + 64)}) {
    unsigned long trunc = 0;
    Real l = eval_nonterminating(lhs, digits, rung, &trunc);
    Real r = eval_gamma_product(rhs, digits, rung) * Real(scale, rung);
    if (!agree_to_digits(l, r, digits))
      ok = false;
    if (rung == p) {
      out.lhs = l;
      out.rhs = r;
      out.truncation_index = trunc;
    }
  }
  out.pass = ok;
  return out;
}

} // namespace hyperid
