#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rational.hpp"

namespace hyperid {

// A parameter slot: either a plain rational or a conjugate pair x +- lambda
// (which occupies two slots of the parameter list).
using SeriesEntry = std::variant<Rat, SurdPairBase>;

inline bool entry_is_pair(const SeriesEntry& e) { return e.index() == 1; }
inline unsigned entry_slots(const SeriesEntry& e) { return entry_is_pair(e) ? 2 : 1; }
inline Rat entry_sum(const SeriesEntry& e) {
  return entry_is_pair(e) ? Rat(2) * std::get<SurdPairBase>(e).center
                          : std::get<Rat>(e);
}
// Factor contributed at summation index n (the ratio (..)_{n+1}/(..)_n).
inline Rat entry_factor(const SeriesEntry& e, unsigned n) {
  if (entry_is_pair(e)) {
    const auto& p = std::get<SurdPairBase>(e);
    Rat x = p.center + Rat(static_cast<long>(n));
    return x * x - p.lambda_sq;
  }
  return std::get<Rat>(e) + Rat(static_cast<long>(n));
}
// Full Pochhammer product of length n for this entry.
inline Rat entry_pochhammer(const SeriesEntry& e, unsigned n) {
  if (entry_is_pair(e))
    return paired_pochhammer(std::get<SurdPairBase>(e), n);
  return pochhammer(std::get<Rat>(e), n);
}

struct SeriesSpec {
  std::vector<SeriesEntry> numerators;
  std::vector<SeriesEntry> denominators;
  Rat z{1};
  std::optional<unsigned> termination;
};

inline SeriesSpec make_spec(std::vector<Rat> nums, std::vector<Rat> dens, Rat z,
                            std::optional<unsigned> N = std::nullopt) {
  SeriesSpec s;
  for (auto& a : nums)
    s.numerators.emplace_back(std::move(a));
  for (auto& b : dens)
    s.denominators.emplace_back(std::move(b));
  s.z = std::move(z);
  s.termination = N;
  return s;
}

struct Classification {
  Rat parametric_excess;
  bool is_balanced = false;
  bool is_well_poised = false;
  bool is_very_well_poised = false;
};

struct ValidationResult {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

namespace detail {
inline void require_unit_argument(const Rat& z) {
  if (z != Rat(1) && z != Rat(-1))
    throw Error("series argument must be 1 or -1, got " + z.str());
}
} // namespace detail

// Exact n-th summand prod (a_i)_n / (prod (b_j)_n n!) z^n.
inline Rat term(const SeriesSpec& spec, unsigned n) {
  detail::require_unit_argument(spec.z);
  Rat den(1);
  for (const auto& b : spec.denominators) {
    Rat pb = entry_pochhammer(b, n);
    if (pb.is_zero())
      throw PoleError("denominator Pochhammer vanishes at n = " + std::to_string(n));
    den *= pb;
  }
  Rat num(1);
  for (const auto& a : spec.numerators)
    num *= entry_pochhammer(a, n);
  Rat zn = (spec.z == Rat(-1) && (n & 1u)) ? Rat(-1) : Rat(1);
  return num / (den * pochhammer(Rat(1), n)) * zn;
}

// Terminating sum via the term-ratio recurrence
// t_{n+1} = t_n prod(a_i+n)/prod(b_j+n) z/(n+1).
inline Rat eval_terminating(const SeriesSpec& spec) {
  detail::require_unit_argument(spec.z);
  if (!spec.termination)
    throw Error("eval_terminating requires a termination index");
  const unsigned N = *spec.termination;
  Rat sum(0), t(1);
  for (unsigned n = 0;; ++n) {
    sum += t;
    if (n == N)
      break;
    Rat fac(1);
    for (const auto& a : spec.numerators)
      fac *= entry_factor(a, n);
    for (const auto& b : spec.denominators) {
      Rat fb = entry_factor(b, n);
      if (fb.is_zero())
        throw PoleError("denominator Pochhammer vanishes at n = " + std::to_string(n + 1));
      fac /= fb;
    }
    t *= fac * spec.z / Rat(static_cast<long>(n) + 1);
  }
  return sum;
}

// Structure classification. The first numerator slot is the distinguished
// parameter for (very) well-poisedness; conjugate pairs count as two slots
// with sum 2x and must match an opposite pair with the same lambda^2.
inline Classification classify(const SeriesSpec& spec) {
  Classification c;
  Rat s(0);
  unsigned nslots = 0, dslots = 0;
  for (const auto& b : spec.denominators) {
    s += entry_sum(b);
    dslots += entry_slots(b);
  }
  for (const auto& a : spec.numerators) {
    s -= entry_sum(a);
    nslots += entry_slots(a);
  }
  c.parametric_excess = s;
  c.is_balanced = (s == Rat(1));
  c.is_well_poised = false;
  c.is_very_well_poised = false;
  if (nslots != dslots + 1 || spec.numerators.empty() ||
      entry_is_pair(spec.numerators.front()))
    return c;
  const Rat a1 = std::get<Rat>(spec.numerators.front());
  const Rat target = Rat(1) + a1;
  std::map<Rat, int> den_rat;
  std::map<std::pair<Rat, Rat>, int> den_pair;
  for (const auto& b : spec.denominators) {
    if (entry_is_pair(b)) {
      const auto& p = std::get<SurdPairBase>(b);
      ++den_pair[{p.center, p.lambda_sq}];
    } else {
      ++den_rat[std::get<Rat>(b)];
    }
  }
  bool wp = true;
  bool has_vwp_numerator = false;
  for (size_t i = 1; i < spec.numerators.size() && wp; ++i) {
    const auto& a = spec.numerators[i];
    if (entry_is_pair(a)) {
      const auto& p = std::get<SurdPairBase>(a);
      auto it = den_pair.find({target - p.center, p.lambda_sq});
      if (it == den_pair.end() || it->second == 0)
        wp = false;
      else
        --it->second;
    } else {
      const Rat& x = std::get<Rat>(a);
      if (x == Rat(1) + half(a1))
        has_vwp_numerator = true;
      auto it = den_rat.find(target - x);
      if (it == den_rat.end() || it->second == 0)
        wp = false;
      else
        --it->second;
    }
  }
  c.is_well_poised = wp;
  c.is_very_well_poised = wp && has_vwp_numerator;
  return c;
}

inline ValidationResult validate(const SeriesSpec& spec) {
  ValidationResult r;
  if (spec.z != Rat(1) && spec.z != Rat(-1))
    r.errors.push_back("argument must be 1 or -1, got " + spec.z.str());
  auto pair_vanishes_at = [](const SurdPairBase& p, unsigned j) {
    Rat x = p.center + Rat(static_cast<long>(j));
    return x * x == p.lambda_sq;
  };
  if (spec.termination) {
    const unsigned N = *spec.termination;
    for (const auto& b : spec.denominators) {
      if (entry_is_pair(b)) {
        const auto& p = std::get<SurdPairBase>(b);
        for (unsigned j = 0; j < N; ++j)
          if (pair_vanishes_at(p, j)) {
            r.errors.push_back("DenominatorPole: conjugate-pair denominator vanishes at index " + std::to_string(j));
            break;
          }
      } else if (std::get<Rat>(b).kills_pochhammer(N)) {
        r.errors.push_back("DenominatorPole: denominator " + std::get<Rat>(b).str() +
                           " lies in {0,-1,...,-(N-1)}");
      }
    }
    bool has_terminator = false;
    bool early_numerator = false;
    const Rat minusN(-static_cast<long>(N));
    for (const auto& a : spec.numerators) {
      if (!entry_is_pair(a)) {
        const Rat& x = std::get<Rat>(a);
        if (x == minusN)
          has_terminator = true;
        else if (x.kills_pochhammer(N))
          early_numerator = true;
      } else {
        const auto& p = std::get<SurdPairBase>(a);
        for (unsigned j = 0; j < N; ++j)
          if (pair_vanishes_at(p, j)) {
            early_numerator = true;
            break;
          }
      }
    }
    if (!has_terminator)
      r.errors.push_back("MissingTerminator: no numerator equals -" + std::to_string(N));
    if (early_numerator)
      r.warnings.push_back("a numerator Pochhammer vanishes before n = N; trailing terms are zero");
  } else {
    for (const auto& b : spec.denominators) {
      if (entry_is_pair(b)) {
        const auto& p = std::get<SurdPairBase>(b);
        // zero at (x+j)^2 = lambda^2 for integer j >= 0
        if (auto lam = p.lambda_sq.sqrt_exact()) {
          for (const Rat& root : {-p.center + *lam, -p.center - *lam})
            if (root.is_integer() && root >= Rat(0)) {
              r.errors.push_back("DenominatorPole: conjugate-pair denominator vanishes at index " + root.str());
              break;
            }
        }
      } else if (std::get<Rat>(b).is_nonpositive_integer()) {
        r.errors.push_back("DenominatorPole: denominator " + std::get<Rat>(b).str() +
                           " is a nonpositive integer");
      }
    }
  }
  return r;
}

// --- text format: rationals as "p/q", conjugate pairs as "x~L" ---

inline SeriesEntry parse_series_entry(const std::string& s) {
  auto tilde = s.find('~');
  if (tilde == std::string::npos)
    return Rat::parse(s);
  return SurdPairBase{Rat::parse(s.substr(0, tilde)), Rat::parse(s.substr(tilde + 1))};
}

inline std::vector<SeriesEntry> parse_entry_list(const std::string& s) {
  std::vector<SeriesEntry> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos)
      comma = s.size();
    out.push_back(parse_series_entry(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

inline std::string entry_str(const SeriesEntry& e) {
  if (entry_is_pair(e)) {
    const auto& p = std::get<SurdPairBase>(e);
    return p.center.str() + "~" + p.lambda_sq.str();
  }
  return std::get<Rat>(e).str();
}

} // namespace hyperid
