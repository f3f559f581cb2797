#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bailey.hpp"
#include "derived.hpp"
#include "series.hpp"
#include "series_numeric.hpp"

namespace hyperid {

enum class IdentityKind { TerminatingExact, NonterminatingNumeric };

inline const char* kind_str(IdentityKind k) {
  return k == IdentityKind::TerminatingExact ? "terminating-exact" : "nonterminating-numeric";
}

struct Assignment {
  std::map<std::string, Rat> vals;
  std::optional<unsigned> N;
  const Rat& at(const std::string& k) const {
    auto it = vals.find(k);
    if (it == vals.end())
      throw Error("assignment is missing parameter '" + k + "'");
    return it->second;
  }
};

// One side contribution: coefficient * series value.
struct WeightedSeries {
  Rat coefficient;
  SeriesSpec spec;
};

// Everything needed to evaluate and admissibility-check one instance.
struct Materialized {
  std::vector<WeightedSeries> lhs, rhs;
  Rat rhs_constant{0};
  bool has_rhs_constant = false;
  std::optional<GammaProduct> rhs_gamma; // numeric entries
  std::vector<Rat> gamma_check_args;     // must avoid nonpositive integers
  std::vector<std::pair<Rat, unsigned>> poch_checks; // prefactor bases with lengths

  // Pochhammer-ratio prefactor; records every base for the admissibility scan.
  Rat ratio(std::vector<Rat> num, std::vector<Rat> den, unsigned len) {
    Rat v(1);
    for (const Rat& b : den) {
      poch_checks.emplace_back(b, len);
      Rat p = pochhammer(b, len);
      if (p.is_zero())
        throw DegenerateParams("prefactor Pochhammer (" + b.str() + ")_" +
                               std::to_string(len) + " vanishes");
      v /= p;
    }
    for (const Rat& a : num) {
      poch_checks.emplace_back(a, len);
      v *= pochhammer(a, len);
    }
    return v;
  }
};

// Expected structure of the LHS series (checked by tests and shown by list).
struct StructureAssertion {
  std::optional<bool> well_poised, very_well_poised, balanced;
  std::optional<Rat> excess_equals;
  std::string label; // human-readable summary for the list command
};

struct NumericTwin { // full non-terminating form of a classical baseline
  std::vector<std::string> params;
  std::function<std::pair<SeriesSpec, GammaProduct>(const Assignment&)> build;
};

struct IdentityDef {
  std::string id;
  std::string tag; // display anchor, e.g. "2.4"; empty for baselines
  IdentityKind kind;
  std::vector<std::string> params; // free rational parameters, fixed order
  bool has_N = false;
  std::function<DerivedParams(const Assignment&)> derive;
  std::function<Materialized(const Assignment&, const DerivedParams&)> materialize;
  StructureAssertion structure;
  std::optional<NumericTwin> twin;
};

struct IdentityInstance {
  std::string def_id;
  Assignment assignment;
  DerivedParams derived;
};

// ---------------------------------------------------------------------------
// Admissibility
// ---------------------------------------------------------------------------

namespace detail {

inline void require_clean_series(const SeriesSpec& s) {
  auto v = validate(s);
  if (!v.ok())
    throw DegenerateParams("series: " + v.errors.front());
  if (!v.warnings.empty())
    throw DegenerateParams("series: " + v.warnings.front());
}

inline void require_admissible(const Materialized& m) {
  for (const auto& t : m.lhs)
    require_clean_series(t.spec);
  for (const auto& t : m.rhs)
    require_clean_series(t.spec);
  for (const auto& [base, len] : m.poch_checks)
    if (base.kills_pochhammer(len))
      throw DegenerateParams("prefactor Pochhammer (" + base.str() + ")_" +
                             std::to_string(len) + " vanishes");
  for (const Rat& x : m.gamma_check_args)
    if (x.is_nonpositive_integer())
      throw DegenerateParams("gamma argument " + x.str() + " is a nonpositive integer");
}

inline void reject_danger(const std::optional<Rat>& v, const char* name) {
  if (v && v->is_nonpositive_integer())
    throw DegenerateParams(std::string(name) + " = " + v->str() +
                           " lies in the nonpositive-integer danger set");
}

inline void reject_dangerous_derived(const DerivedParams& d) {
  reject_danger(d.g, "g");
  reject_danger(d.h, "h");
  reject_danger(d.k, "k");
  reject_danger(d.B, "B");
}

inline Rat need_N(const Assignment& a) {
  if (!a.N)
    throw Error("assignment is missing N");
  return Rat(static_cast<long>(*a.N));
}

} // namespace detail

// ---------------------------------------------------------------------------
// Catalog definitions
// ---------------------------------------------------------------------------

namespace defs {

using A = const Assignment&;
using D = const DerivedParams&;

inline Rat one() { return Rat(1); }

// shared prefactor of the closed-form 9F8 family
inline Rat closed_9f8_prefactor(Materialized& m, const Rat& f, const Rat& a1, const Rat& d1,
                                const Rat& d2, unsigned N) {
  return m.ratio({f, f - d1 - d2, f - a1 - d1 - Rat(1), f - a1 - d2 - Rat(1)},
                 {f - d1, f - d2, f - a1, f - a1 - d1 - d2 - Rat(1)}, N);
}

// shared prefactor of the three-term-transformation family
inline Rat transform_prefactor(Materialized& m, const Rat& c, const Rat& b1, const Rat& b2,
                               const Rat& b3, unsigned N) {
  return m.ratio({Rat(1) + c, Rat(1) + c - b1 - b2, Rat(1) + c - b1 - b3,
                  Rat(1) + c - b2 - b3},
                 {Rat(1) + c - b1, Rat(1) + c - b2, Rat(1) + c - b3,
                  Rat(1) + c - b1 - b2 - b3},
                 N);
}

// shared gamma-quotient of the limit entries, divided by k via the exact
// Gamma(k)/Gamma(k+1) pair
inline GammaProduct limit_gamma(Materialized& m, const Rat& f, const Rat& a1, const Rat& d1,
                                const Rat& d2, const Rat& k) {
  GammaProduct gp{{f - d1, f - d2, f - a1, f - a1 - d1 - d2 - Rat(1)},
                  {f, f - d1 - d2, f - a1 - d1 - Rat(1), f - a1 - d2 - Rat(1)}};
  m.gamma_check_args = gp.numerator_args;
  for (const Rat& x : gp.denominator_args)
    m.gamma_check_args.push_back(x);
  gp.numerator_args.push_back(k);
  gp.denominator_args.push_back(k + Rat(1));
  return gp;
}

inline std::vector<IdentityDef> make_all() {
  std::vector<IdentityDef> out;

  // --- ext.saalschutz_rr -------------------------------------------------
  {
    IdentityDef e;
    e.id = "ext.saalschutz_rr";
    e.tag = "1.5";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"a", "b", "c", "f"};
    e.has_N = true;
    e.derive = [](A a) {
      DerivedParams d;
      d.g = g_ext_saalschutz(a.at("a"), a.at("b"), a.at("c"), a.at("f"));
      detail::reject_dangerous_derived(d);
      return d;
    };
    e.materialize = [](A a, D d) {
      Materialized m;
      const Rat aa = a.at("a"), b = a.at("b"), c = a.at("c"), f = a.at("f");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      m.lhs.push_back({Rat(1), make_spec({aa, b, f + Rat(1), -N},
                                         {c, f, Rat(2) + aa + b - c - N}, Rat(1), n)});
      Rat coef = m.ratio({c - aa - Rat(1), c - b - Rat(1)},
                         {c, c - aa - b - Rat(1)}, n);
      m.rhs_constant = coef * shifted_quotient(*d.g, n);
      m.has_rhs_constant = true;
      return m;
    };
    e.structure.balanced = true;
    e.structure.excess_equals = Rat(1);
    e.structure.label = "balanced (excess 1)";
    out.push_back(std::move(e));
  }

  // --- classic.whipple_7f6_4f3 -------------------------------------------
  {
    IdentityDef e;
    e.id = "classic.whipple_7f6_4f3";
    e.tag = "1.4";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"a", "b", "c", "d", "e"};
    e.has_N = true;
    e.derive = [](A) { return DerivedParams{}; };
    e.materialize = [](A a, D) {
      Materialized m;
      const Rat aa = a.at("a"), b = a.at("b"), c = a.at("c"), dd = a.at("d"), ee = a.at("e");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      m.lhs.push_back(
          {Rat(1), make_spec({aa, Rat(1) + half(aa), b, c, dd, ee, -N},
                             {half(aa), Rat(1) + aa - b, Rat(1) + aa - c, Rat(1) + aa - dd,
                              Rat(1) + aa - ee, Rat(1) + aa + N},
                             Rat(1), n)});
      Rat coef = m.ratio({Rat(1) + aa - dd - ee, Rat(1) + aa},
                         {Rat(1) + aa - dd, Rat(1) + aa - ee}, n);
      m.rhs.push_back(
          {coef, make_spec({Rat(1) + aa - b - c, dd, ee, -N},
                           {Rat(1) + aa - b, Rat(1) + aa - c, dd + ee - aa - N}, Rat(1), n)});
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    out.push_back(std::move(e));
  }

  // --- ext.vwp_7f6_sum ----------------------------------------------------
  {
    IdentityDef e;
    e.id = "ext.vwp_7f6_sum";
    e.tag = "2.1";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"a", "b", "d", "f"};
    e.has_N = true;
    e.derive = [](A a) {
      DerivedParams d;
      d.g = g_vwp5f4(a.at("a"), a.at("b"), a.at("d"), a.at("f"));
      detail::reject_dangerous_derived(d);
      return d;
    };
    e.materialize = [](A a, D d) {
      Materialized m;
      const Rat aa = a.at("a"), b = a.at("b"), dd = a.at("d"), f = a.at("f");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      m.lhs.push_back(
          {Rat(1), make_spec({aa, Rat(1) + half(aa), b, aa - f + Rat(1), dd, f + Rat(1), -N},
                             {half(aa), Rat(1) + aa - b, f, Rat(1) + aa - dd, aa - f,
                              Rat(1) + aa + N},
                             Rat(1), n)});
      Rat coef = m.ratio({Rat(1) + aa, aa - b - dd}, {Rat(1) + aa - b, Rat(1) + aa - dd}, n);
      m.rhs_constant = coef * shifted_quotient(*d.g, n);
      m.has_rhs_constant = true;
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    out.push_back(std::move(e));
  }

  // --- ext.whipple_9f8_5f4 --------------------------------------------------
  {
    IdentityDef e;
    e.id = "ext.whipple_9f8_5f4";
    e.tag = "2.2";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"f", "p", "a1", "a2", "d1", "d2"};
    e.has_N = true;
    e.derive = [](A a) {
      DerivedParams d;
      d.h = h_whipple_ext(a.at("f"), a.at("p"), a.at("a1"), a.at("a2"));
      detail::reject_dangerous_derived(d);
      return d;
    };
    e.materialize = [](A a, D d) {
      Materialized m;
      const Rat f = a.at("f"), p = a.at("p"), a1 = a.at("a1"), a2 = a.at("a2"),
                d1 = a.at("d1"), d2 = a.at("d2");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      const Rat h = *d.h;
      m.lhs.push_back(
          {Rat(1),
           make_spec({f - Rat(1), half(f + Rat(1)), a1, a2, f - p, p + Rat(1), d1, d2, -N},
                     {half(f - Rat(1)), f - a1, f - a2, p, f - p - Rat(1), f - d1, f - d2,
                      f + N},
                     Rat(1), n)});
      Rat coef = m.ratio({f, f - d1 - d2}, {f - d1, f - d2}, n);
      m.rhs.push_back(
          {coef, make_spec({d1, d2, f - a1 - a2 - Rat(1), h + Rat(1), -N},
                           {f - a1, f - a2, Rat(1) + d1 + d2 - f - N, h}, Rat(1), n)});
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    out.push_back(std::move(e));
  }

  // --- ext.dougall_9f8_sum --------------------------------------------------
  {
    IdentityDef e;
    e.id = "ext.dougall_9f8_sum";
    e.tag = "2.4";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"f", "p", "a1", "d1", "d2"};
    e.has_N = true;
    e.derive = [](A a) {
      DerivedParams d;
      const Rat f = a.at("f"), p = a.at("p"), a1 = a.at("a1"), d1 = a.at("d1"),
                d2 = a.at("d2");
      const Rat N = detail::need_N(a);
      d.h = h_dougall_ext(f, p, a1, d1, d2, N);
      d.k = k_quotient_params(*d.h, a1, d1, d2, f);
      d.c = Rat(2) * f - Rat(2) - d1 - d2 - a1;
      detail::reject_dangerous_derived(d);
      return d;
    };
    e.materialize = [](A a, D d) {
      Materialized m;
      const Rat f = a.at("f"), p = a.at("p"), a1 = a.at("a1"), d1 = a.at("d1"),
                d2 = a.at("d2");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      const Rat c = *d.c;
      m.lhs.push_back(
          {Rat(1),
           make_spec({f - Rat(1), half(f + Rat(1)), a1, f - p, p + Rat(1), d1, d2, c + N, -N},
                     {half(f - Rat(1)), f - a1, p, f - p - Rat(1), f - d1, f - d2,
                      Rat(2) + a1 + d1 + d2 - f - N, f + N},
                     Rat(1), n)});
      m.rhs_constant =
          closed_9f8_prefactor(m, f, a1, d1, d2, n) * shifted_quotient(*d.k, n);
      m.has_rhs_constant = true;
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    out.push_back(std::move(e));
  }

  // --- ext.bailey_form1 -------------------------------------------------------
  auto transform_derive = [](A a) {
    DerivedParams d;
    const Rat f = a.at("f"), p = a.at("p"), a1 = a.at("a1"), d1 = a.at("d1"),
              d2 = a.at("d2");
    const Rat N = detail::need_N(a);
    BaileyCore core = bailey_BDA(f, p, a1, d1, d2);
    auto [c, b3] = solve_2_7_constraints(f, a1, d1, d2, a.at("b1"), a.at("b2"), N);
    d.A = core.A;
    d.B = core.B;
    d.D = core.D;
    d.c = core.c;
    d.lambda_sq = core.lambda_sq;
    d.A_prime = a_prime_2_7(core, f, a1, d1, d2, a.at("b1"), a.at("b2"), b3, N);
    detail::reject_dangerous_derived(d);
    // closed beta form divides by A+n and D; keep A off integers in range
    if (d.A->is_integer() && *d.A <= Rat(0) && -*d.A <= N)
      throw DegenerateParams("A is a nonpositive integer within the cutoff");
    return d;
  };
  auto transform_lhs = [](Materialized& m, A a, D d) {
    const Rat f = a.at("f"), p = a.at("p"), a1 = a.at("a1"), d1 = a.at("d1"),
              d2 = a.at("d2"), b1 = a.at("b1"), b2 = a.at("b2");
    const Rat N = detail::need_N(a);
    const unsigned n = *a.N;
    const Rat b3 = solve_2_7_constraints(f, a1, d1, d2, b1, b2, N).second;
    Rat mpre = transform_prefactor(m, *d.c, b1, b2, b3, n);
    m.lhs.push_back(
        {mpre, make_spec({f - Rat(1), half(f + Rat(1)), a1, f - p, p + Rat(1), d1, d2, b1,
                          b2, b3, -N},
                         {half(f - Rat(1)), f - a1, p, f - p - Rat(1), f - d1, f - d2,
                          f - b1, f - b2, f - b3, f + N},
                         Rat(1), n)});
    return b3;
  };
  {
    IdentityDef e;
    e.id = "ext.bailey_form1";
    e.tag = "2.7";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"f", "p", "a1", "d1", "d2", "b1", "b2"};
    e.has_N = true;
    e.derive = transform_derive;
    e.materialize = [transform_lhs](A a, D d) {
      Materialized m;
      const Rat f = a.at("f"), a1 = a.at("a1"), d1 = a.at("d1"), d2 = a.at("d2"),
                b1 = a.at("b1"), b2 = a.at("b2");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      const Rat b3 = transform_lhs(m, a, d);
      const Rat c = *d.c;
      m.rhs.push_back(
          {Rat(1),
           make_spec({c, Rat(1) + half(c), b1, b2, b3, f - a1 - d2 - Rat(1),
                      f - a1 - d1 - Rat(1), f - d1 - d2, -N},
                     {half(c), Rat(1) + c - b1, Rat(1) + c - b2, Rat(1) + c - b3, f - d1,
                      f - d2, f - a1, Rat(1) + c + N},
                     Rat(1), n)});
      if (n >= 1) {
        Rat coef = *d.A_prime * *d.B / (*d.A * *d.D);
        m.rhs.push_back(
            {coef, make_spec({c + Rat(1), Rat(2) + half(c), b1 + Rat(1), b2 + Rat(1),
                              b3 + Rat(1), f - a1 - d2, f - a1 - d1, *d.A + Rat(1),
                              *d.B + Rat(2), -(N - Rat(1))},
                             {Rat(1) + half(c), Rat(2) + c - b1, Rat(2) + c - b2,
                              Rat(2) + c - b3, Rat(1) + f - d1, Rat(1) + f - d2,
                              Rat(1) + f - a1, *d.B + Rat(1), Rat(2) + c + N},
                             Rat(1), n - 1)});
      }
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    out.push_back(std::move(e));
  }

  // --- ext.bailey_form2 -------------------------------------------------------
  {
    IdentityDef e;
    e.id = "ext.bailey_form2";
    e.tag = "2.7";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"f", "p", "a1", "d1", "d2", "b1", "b2"};
    e.has_N = true;
    e.derive = transform_derive;
    e.materialize = [transform_lhs](A a, D d) {
      Materialized m;
      const Rat f = a.at("f"), a1 = a.at("a1"), d1 = a.at("d1"), d2 = a.at("d2"),
                b1 = a.at("b1"), b2 = a.at("b2");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      const Rat b3 = transform_lhs(m, a, d);
      const Rat c = *d.c;
      SeriesSpec last;
      for (const Rat& x : {c, Rat(1) + half(c), b1, b2, b3, f - a1 - d2 - Rat(1),
                           f - a1 - d1 - Rat(1), f - d1 - d2 - Rat(1), -N})
        last.numerators.emplace_back(x);
      last.numerators.emplace_back(SurdPairBase{Rat(1) + half(c), *d.lambda_sq});
      for (const Rat& x : {half(c), Rat(1) + c - b1, Rat(1) + c - b2, Rat(1) + c - b3,
                           f - d1, f - d2, f - a1, Rat(1) + c + N})
        last.denominators.emplace_back(x);
      last.denominators.emplace_back(SurdPairBase{half(c), *d.lambda_sq});
      last.z = Rat(1);
      last.termination = n;
      m.rhs.push_back({Rat(1), std::move(last)});
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    out.push_back(std::move(e));
  }

  // --- classic.bailey_9f8 -----------------------------------------------------
  {
    IdentityDef e;
    e.id = "classic.bailey_9f8";
    e.tag = "2.12";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"f", "a1", "d1", "d2", "b1", "b2"};
    e.has_N = true;
    e.derive = [](A a) {
      DerivedParams d;
      d.c = Rat(2) * a.at("f") - Rat(2) - a.at("d1") - a.at("d2") - a.at("a1");
      return d;
    };
    e.materialize = [](A a, D d) {
      Materialized m;
      const Rat f = a.at("f"), a1 = a.at("a1"), d1 = a.at("d1"), d2 = a.at("d2"),
                b1 = a.at("b1"), b2 = a.at("b2");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      const Rat c = *d.c;
      const Rat b3 = solve_2_7_constraints(f, a1, d1, d2, b1, b2, N).second;
      Rat mpre = transform_prefactor(m, c, b1, b2, b3, n);
      m.lhs.push_back(
          {mpre, make_spec({f - Rat(1), half(f + Rat(1)), a1 + Rat(1), d1, d2, b1, b2, b3, -N},
                           {half(f - Rat(1)), f - a1 - Rat(1), f - d1, f - d2, f - b1,
                            f - b2, f - b3, f + N},
                           Rat(1), n)});
      m.rhs.push_back(
          {Rat(1),
           make_spec({c, Rat(1) + half(c), b1, b2, b3, f - a1 - d2 - Rat(1),
                      f - a1 - d1 - Rat(1), f - d1 - d2, -N},
                     {half(c), Rat(1) + c - b1, Rat(1) + c - b2, Rat(1) + c - b3, f - d1,
                      f - d2, f - a1 - Rat(1), Rat(1) + c + N},
                     Rat(1), n)});
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    out.push_back(std::move(e));
  }

  // --- contiguous.rainville ----------------------------------------------------
  {
    IdentityDef e;
    e.id = "contiguous.rainville";
    e.tag = "2.11";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"a1", "a2", "b1", "b2"};
    e.has_N = true;
    e.derive = [](A a) {
      if (a.at("b1") == Rat(1))
        throw DegenerateParams("lowered denominator parameter b1-1 vanishes");
      if (a.at("b1").is_zero() || a.at("b2").is_zero())
        throw DegenerateParams("denominator parameter is zero");
      return DerivedParams{};
    };
    e.materialize = [](A a, D) {
      Materialized m;
      const Rat a1 = a.at("a1"), a2 = a.at("a2"), b1 = a.at("b1"), b2 = a.at("b2");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      m.lhs.push_back({Rat(1), make_spec({a1, a2, -N}, {b1 - Rat(1), b2}, Rat(1), n)});
      m.rhs.push_back({Rat(1), make_spec({a1, a2, -N}, {b1, b2}, Rat(1), n)});
      if (n >= 1) {
        Rat coef = a1 * a2 * (-N) / (b1 * b2) / (b1 - Rat(1));
        m.rhs.push_back(
            {coef, make_spec({a1 + Rat(1), a2 + Rat(1), -(N - Rat(1))},
                             {b1 + Rat(1), b2 + Rat(1)}, Rat(1), n - 1)});
      }
      return m;
    };
    e.structure.label = "-";
    out.push_back(std::move(e));
  }

  // --- special.4_1 ------------------------------------------------------------
  {
    IdentityDef e;
    e.id = "special.4_1";
    e.tag = "4.1";
    e.kind = IdentityKind::NonterminatingNumeric;
    e.params = {"f", "p", "a1", "d1", "d2"};
    e.derive = [](A a) {
      DerivedParams d;
      const Rat f = a.at("f"), p = a.at("p"), a1 = a.at("a1");
      d.h = detail::guarded_ratio(p * (f - p - Rat(1)), a1, "h");
      d.k = k_quotient_params(*d.h, a1, a.at("d1"), a.at("d2"), f);
      detail::reject_dangerous_derived(d);
      return d;
    };
    e.materialize = [](A a, D d) {
      Materialized m;
      const Rat f = a.at("f"), p = a.at("p"), a1 = a.at("a1"), d1 = a.at("d1"),
                d2 = a.at("d2");
      m.lhs.push_back(
          {Rat(1), make_spec({f - Rat(1), half(f + Rat(1)), a1, f - p, p + Rat(1), d1, d2},
                             {half(f - Rat(1)), f - a1, p, f - p - Rat(1), f - d1, f - d2},
                             Rat(1))});
      m.rhs_gamma = limit_gamma(m, f, a1, d1, d2, *d.k);
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    out.push_back(std::move(e));
  }

  // --- special.4_2 --------------------------------------------------------------
  {
    IdentityDef e;
    e.id = "special.4_2";
    e.tag = "4.2";
    e.kind = IdentityKind::NonterminatingNumeric;
    e.params = {"f", "p", "a1", "d2"};
    e.derive = [](A a) {
      DerivedParams d;
      const Rat f = a.at("f"), p = a.at("p"), a1 = a.at("a1"), d2 = a.at("d2");
      d.h = detail::guarded_ratio(p * (f - p - Rat(1)), a1, "h");
      d.k = detail::guarded_ratio(*d.h * (Rat(1) + d2 + a1 - f), d2 - *d.h, "k");
      detail::reject_dangerous_derived(d);
      return d;
    };
    e.materialize = [](A a, D d) {
      Materialized m;
      const Rat f = a.at("f"), p = a.at("p"), a1 = a.at("a1"), d2 = a.at("d2");
      m.lhs.push_back(
          {Rat(1), make_spec({f - Rat(1), half(f + Rat(1)), a1, f - p, p + Rat(1), d2},
                             {half(f - Rat(1)), f - a1, p, f - p - Rat(1), f - d2},
                             Rat(-1))});
      GammaProduct gp{{f - a1, f - d2}, {f, f - a1 - d2 - Rat(1)}};
      m.gamma_check_args = gp.numerator_args;
      for (const Rat& x : gp.denominator_args)
        m.gamma_check_args.push_back(x);
      gp.numerator_args.push_back(*d.k);
      gp.denominator_args.push_back(*d.k + Rat(1));
      m.rhs_gamma = gp;
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    out.push_back(std::move(e));
  }

  // --- special.4_3 --------------------------------------------------------------
  {
    IdentityDef e;
    e.id = "special.4_3";
    e.tag = "4.3";
    e.kind = IdentityKind::NonterminatingNumeric;
    e.params = {"f", "p", "a1", "d2"};
    e.derive = [](A a) {
      DerivedParams d;
      const Rat f = a.at("f"), p = a.at("p"), a1 = a.at("a1"), d2 = a.at("d2");
      d.h = detail::guarded_ratio(p * (f - p - Rat(1)), a1, "h");
      d.k = k_quotient_params(*d.h, a1, half(f), d2, f);
      detail::reject_dangerous_derived(d);
      return d;
    };
    e.materialize = [](A a, D d) {
      Materialized m;
      const Rat f = a.at("f"), p = a.at("p"), a1 = a.at("a1"), d2 = a.at("d2");
      m.lhs.push_back(
          {Rat(1), make_spec({f - Rat(1), half(f + Rat(1)), a1, f - p, p + Rat(1), d2},
                             {half(f - Rat(1)), f - a1, p, f - p - Rat(1), f - d2},
                             Rat(1))});
      GammaProduct gp{{half(f), f - d2, f - a1, half(f) - a1 - d2 - Rat(1)},
                      {f, half(f) - d2, half(f) - a1 - Rat(1), f - a1 - d2 - Rat(1)}};
      m.gamma_check_args = gp.numerator_args;
      for (const Rat& x : gp.denominator_args)
        m.gamma_check_args.push_back(x);
      gp.numerator_args.push_back(*d.k);
      gp.denominator_args.push_back(*d.k + Rat(1));
      m.rhs_gamma = gp;
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    out.push_back(std::move(e));
  }

  // --- special.4_5 --------------------------------------------------------------
  {
    IdentityDef e;
    e.id = "special.4_5";
    e.tag = "4.5";
    e.kind = IdentityKind::NonterminatingNumeric;
    e.params = {"f", "p", "a1"};
    e.derive = [](A a) {
      DerivedParams d;
      const Rat f = a.at("f"), p = a.at("p"), a1 = a.at("a1");
      d.h = detail::guarded_ratio(p * (f - p - Rat(1)), a1, "h");
      d.k = detail::guarded_ratio(*d.h * (Rat(1) + a1 - half(f)), half(f) - *d.h, "k");
      detail::reject_dangerous_derived(d);
      return d;
    };
    e.materialize = [](A a, D d) {
      Materialized m;
      const Rat f = a.at("f"), p = a.at("p"), a1 = a.at("a1");
      m.lhs.push_back({Rat(1), make_spec({f - Rat(1), half(f + Rat(1)), a1, f - p, p + Rat(1)},
                                         {half(f - Rat(1)), f - a1, p, f - p - Rat(1)},
                                         Rat(-1))});
      GammaProduct gp{{half(f), f - a1}, {f, half(f) - a1 - Rat(1)}};
      m.gamma_check_args = gp.numerator_args;
      for (const Rat& x : gp.denominator_args)
        m.gamma_check_args.push_back(x);
      gp.numerator_args.push_back(*d.k);
      gp.denominator_args.push_back(*d.k + Rat(1));
      m.rhs_gamma = gp;
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    out.push_back(std::move(e));
  }

  // --- special.4_7 --------------------------------------------------------------
  {
    IdentityDef e;
    e.id = "special.4_7";
    e.tag = "4.7";
    e.kind = IdentityKind::NonterminatingNumeric;
    e.params = {"f", "p", "a1", "d1"};
    e.derive = [](A a) {
      DerivedParams d;
      const Rat f = a.at("f"), p = a.at("p"), a1 = a.at("a1"), d1 = a.at("d1");
      d.h = detail::guarded_ratio(p * (f - p - Rat(1)), a1, "h");
      d.k = k_quotient_params(*d.h, a1, d1, half(f - Rat(1)), f);
      detail::reject_dangerous_derived(d);
      return d;
    };
    e.materialize = [](A a, D d) {
      Materialized m;
      const Rat f = a.at("f"), p = a.at("p"), a1 = a.at("a1"), d1 = a.at("d1");
      m.lhs.push_back({Rat(1), make_spec({f - Rat(1), a1, f - p, p + Rat(1), d1},
                                         {f - a1, p, f - p - Rat(1), f - d1}, Rat(1))});
      const Rat hf = half(f);
      GammaProduct gp{{f - d1, hf + Rat(1, 2), f - a1, hf - a1 - d1 - Rat(1, 2)},
                      {f, hf - d1 + Rat(1, 2), f - a1 - d1 - Rat(1), hf - a1 - Rat(1, 2)}};
      m.gamma_check_args = gp.numerator_args;
      for (const Rat& x : gp.denominator_args)
        m.gamma_check_args.push_back(x);
      gp.numerator_args.push_back(*d.k);
      gp.denominator_args.push_back(*d.k + Rat(1));
      m.rhs_gamma = gp;
      return m;
    };
    e.structure.label = "-";
    out.push_back(std::move(e));
  }

  // --- special.4_9 ----------------------------------------------------------------
  {
    IdentityDef e;
    e.id = "special.4_9";
    e.tag = "4.9";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"f", "a1", "d1", "d2"};
    e.has_N = true;
    e.derive = [](A a) {
      DerivedParams d;
      const Rat f = a.at("f"), a1 = a.at("a1"), d1 = a.at("d1"), d2 = a.at("d2");
      const Rat N = detail::need_N(a);
      d.h = h_dougall_ext(f, half(f), a1, d1, d2, N);
      d.k = k_quotient_params(*d.h, a1, d1, d2, f);
      d.c = Rat(2) * f - Rat(2) - d1 - d2 - a1;
      detail::reject_dangerous_derived(d);
      return d;
    };
    e.materialize = [](A a, D d) {
      Materialized m;
      const Rat f = a.at("f"), a1 = a.at("a1"), d1 = a.at("d1"), d2 = a.at("d2");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      const Rat c = *d.c;
      m.lhs.push_back(
          {Rat(1),
           make_spec({f - Rat(1), half(f + Rat(1)), a1, half(f) + Rat(1), d1, d2, c + N, -N},
                     {half(f - Rat(1)), f - a1, half(f) - Rat(1), f - d1, f - d2,
                      Rat(2) + a1 + d1 + d2 - f - N, f + N},
                     Rat(1), n)});
      m.rhs_constant =
          closed_9f8_prefactor(m, f, a1, d1, d2, n) * shifted_quotient(*d.k, n);
      m.has_rhs_constant = true;
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    out.push_back(std::move(e));
  }

  // --- special.4_12 ----------------------------------------------------------------
  {
    IdentityDef e;
    e.id = "special.4_12";
    e.tag = "4.12";
    e.kind = IdentityKind::NonterminatingNumeric;
    e.params = {"f", "a1", "d1", "d2"};
    e.derive = [](A a) {
      DerivedParams d;
      const Rat f = a.at("f"), a1 = a.at("a1");
      d.h = detail::guarded_ratio(half(f) * (half(f) - Rat(1)), a1, "h");
      d.k = k_quotient_params(*d.h, a1, a.at("d1"), a.at("d2"), f);
      detail::reject_dangerous_derived(d);
      return d;
    };
    e.materialize = [](A a, D d) {
      Materialized m;
      const Rat f = a.at("f"), a1 = a.at("a1"), d1 = a.at("d1"), d2 = a.at("d2");
      m.lhs.push_back(
          {Rat(1), make_spec({f - Rat(1), half(f + Rat(1)), a1, half(f) + Rat(1), d1, d2},
                             {half(f - Rat(1)), f - a1, half(f) - Rat(1), f - d1, f - d2},
                             Rat(1))});
      m.rhs_gamma = limit_gamma(m, f, a1, d1, d2, *d.k);
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    out.push_back(std::move(e));
  }

  // --- special.4_15 ----------------------------------------------------------------
  {
    IdentityDef e;
    e.id = "special.4_15";
    e.tag = "4.15";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"f", "a1", "d1", "d2"};
    e.has_N = true;
    e.derive = [](A a) {
      DerivedParams d;
      const Rat f = a.at("f"), a1 = a.at("a1"), d1 = a.at("d1"), d2 = a.at("d2");
      const Rat N = detail::need_N(a);
      d.h = h_dougall_ext(f, half(f + Rat(1)), a1, d1, d2, N);
      d.k = k_quotient_params(*d.h, a1, d1, d2, f);
      d.c = Rat(2) * f - Rat(2) - d1 - d2 - a1;
      detail::reject_dangerous_derived(d);
      return d;
    };
    e.materialize = [](A a, D d) {
      Materialized m;
      const Rat f = a.at("f"), a1 = a.at("a1"), d1 = a.at("d1"), d2 = a.at("d2");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      const Rat c = *d.c;
      m.lhs.push_back(
          {Rat(1), make_spec({f - Rat(1), half(f) + Rat(3, 2), a1, d1, d2, c + N, -N},
                             {half(f) - Rat(3, 2), f - a1, f - d1, f - d2,
                              Rat(2) + a1 + d1 + d2 - f - N, f + N},
                             Rat(1), n)});
      m.rhs_constant =
          closed_9f8_prefactor(m, f, a1, d1, d2, n) * shifted_quotient(*d.k, n);
      m.has_rhs_constant = true;
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = false;
    e.structure.label = "well-poised (not very well-poised)";
    out.push_back(std::move(e));
  }

  // --- special.4_18 ----------------------------------------------------------------
  {
    IdentityDef e;
    e.id = "special.4_18";
    e.tag = "4.18";
    e.kind = IdentityKind::NonterminatingNumeric;
    e.params = {"f", "a1", "d1", "d2"};
    e.derive = [](A a) {
      DerivedParams d;
      const Rat f = a.at("f"), a1 = a.at("a1");
      d.h = detail::guarded_ratio((half(f) + Rat(1, 2)) * (half(f) - Rat(3, 2)), a1, "h");
      d.k = k_quotient_params(*d.h, a1, a.at("d1"), a.at("d2"), f);
      detail::reject_dangerous_derived(d);
      return d;
    };
    e.materialize = [](A a, D d) {
      Materialized m;
      const Rat f = a.at("f"), a1 = a.at("a1"), d1 = a.at("d1"), d2 = a.at("d2");
      m.lhs.push_back({Rat(1), make_spec({f - Rat(1), half(f) + Rat(3, 2), a1, d1, d2},
                                         {half(f) - Rat(3, 2), f - a1, f - d1, f - d2},
                                         Rat(1))});
      m.rhs_gamma = limit_gamma(m, f, a1, d1, d2, *d.k);
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = false;
    e.structure.label = "well-poised (not very well-poised)";
    out.push_back(std::move(e));
  }

  // --- special.4_21 ----------------------------------------------------------------
  {
    IdentityDef e;
    e.id = "special.4_21";
    e.tag = "4.21";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"f", "a1", "d1", "d2"};
    e.has_N = true;
    e.derive = [](A a) {
      DerivedParams d;
      const Rat f = a.at("f"), a1 = a.at("a1"), d1 = a.at("d1"), d2 = a.at("d2");
      const Rat N = detail::need_N(a);
      Rat h = Rat(1) - f + d1 + d2 - N;
      if (h.is_zero())
        throw DegenerateParams("h: value is zero");
      d.h = h;
      d.k = k_quotient_params(h, a1, d1, d2, f);
      d.c = Rat(2) * f - Rat(2) - d1 - d2 - a1;
      detail::reject_dangerous_derived(d);
      return d;
    };
    e.materialize = [](A a, D d) {
      Materialized m;
      const Rat f = a.at("f"), a1 = a.at("a1"), d1 = a.at("d1"), d2 = a.at("d2");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      const Rat c = *d.c;
      m.lhs.push_back(
          {Rat(1), make_spec({f - Rat(1), half(f + Rat(1)), a1, d1, d2, c + N, -N},
                             {half(f - Rat(1)), f - a1, f - d1, f - d2,
                              Rat(2) + a1 + d1 + d2 - f - N, f + N},
                             Rat(1), n)});
      m.rhs_constant =
          closed_9f8_prefactor(m, f, a1, d1, d2, n) * shifted_quotient(*d.k, n);
      m.has_rhs_constant = true;
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    out.push_back(std::move(e));
  }

  // --- baselines --------------------------------------------------------------------
  {
    IdentityDef e;
    e.id = "baseline.saalschutz";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"a", "b", "c"};
    e.has_N = true;
    e.derive = [](A) { return DerivedParams{}; };
    e.materialize = [](A a, D) {
      Materialized m;
      const Rat aa = a.at("a"), b = a.at("b"), c = a.at("c");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      m.lhs.push_back({Rat(1), make_spec({aa, b, -N},
                                         {c, Rat(1) + aa + b - c - N}, Rat(1), n)});
      m.rhs_constant = m.ratio({c - aa, c - b}, {c, c - aa - b}, n);
      m.has_rhs_constant = true;
      return m;
    };
    e.structure.balanced = true;
    e.structure.excess_equals = Rat(1);
    e.structure.label = "balanced (excess 1)";
    out.push_back(std::move(e));
  }
  {
    IdentityDef e;
    e.id = "baseline.dougall_7f6";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"a", "b", "c", "d"};
    e.has_N = true;
    e.derive = [](A) { return DerivedParams{}; };
    e.materialize = [](A a, D) {
      Materialized m;
      const Rat aa = a.at("a"), b = a.at("b"), c = a.at("c"), dd = a.at("d");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      const Rat ee = Rat(1) + Rat(2) * aa - b - c - dd + N;
      m.lhs.push_back(
          {Rat(1), make_spec({aa, Rat(1) + half(aa), b, c, dd, ee, -N},
                             {half(aa), Rat(1) + aa - b, Rat(1) + aa - c, Rat(1) + aa - dd,
                              Rat(1) + aa - ee, Rat(1) + aa + N},
                             Rat(1), n)});
      m.rhs_constant = m.ratio(
          {Rat(1) + aa, Rat(1) + aa - b - c, Rat(1) + aa - b - dd, Rat(1) + aa - c - dd},
          {Rat(1) + aa - b, Rat(1) + aa - c, Rat(1) + aa - dd, Rat(1) + aa - b - c - dd}, n);
      m.has_rhs_constant = true;
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    out.push_back(std::move(e));
  }
  {
    IdentityDef e;
    e.id = "baseline.vwp_5f4";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"a", "b", "c"};
    e.has_N = true;
    e.derive = [](A) { return DerivedParams{}; };
    e.materialize = [](A a, D) {
      Materialized m;
      const Rat aa = a.at("a"), b = a.at("b"), c = a.at("c");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      m.lhs.push_back(
          {Rat(1), make_spec({aa, Rat(1) + half(aa), b, c, -N},
                             {half(aa), Rat(1) + aa - b, Rat(1) + aa - c, Rat(1) + aa + N},
                             Rat(1), n)});
      m.rhs_constant = m.ratio({Rat(1) + aa, Rat(1) + aa - b - c},
                               {Rat(1) + aa - b, Rat(1) + aa - c}, n);
      m.has_rhs_constant = true;
      return m;
    };
    e.structure.well_poised = true;
    e.structure.very_well_poised = true;
    e.structure.label = "very well-poised";
    e.twin = NumericTwin{
        {"a", "b", "c", "d"}, [](A a) {
          const Rat aa = a.at("a"), b = a.at("b"), c = a.at("c"), dd = a.at("d");
          SeriesSpec s = make_spec({aa, Rat(1) + half(aa), b, c, dd},
                                   {half(aa), Rat(1) + aa - b, Rat(1) + aa - c,
                                    Rat(1) + aa - dd},
                                   Rat(1));
          GammaProduct gp{{Rat(1) + aa - b, Rat(1) + aa - c, Rat(1) + aa - dd,
                           Rat(1) + aa - b - c - dd},
                          {Rat(1) + aa, Rat(1) + aa - b - c, Rat(1) + aa - b - dd,
                           Rat(1) + aa - c - dd}};
          return std::make_pair(s, gp);
        }};
    out.push_back(std::move(e));
  }
  {
    IdentityDef e;
    e.id = "baseline.gauss";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"a", "c"};
    e.has_N = true;
    e.derive = [](A) { return DerivedParams{}; };
    e.materialize = [](A a, D) {
      Materialized m;
      const Rat aa = a.at("a"), c = a.at("c");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      m.lhs.push_back({Rat(1), make_spec({aa, -N}, {c}, Rat(1), n)});
      m.rhs_constant = m.ratio({c - aa}, {c}, n);
      m.has_rhs_constant = true;
      return m;
    };
    e.structure.label = "-";
    e.twin = NumericTwin{{"a", "b", "c"}, [](A a) {
                           const Rat aa = a.at("a"), b = a.at("b"), c = a.at("c");
                           SeriesSpec s = make_spec({aa, b}, {c}, Rat(1));
                           GammaProduct gp{{c, c - aa - b}, {c - aa, c - b}};
                           return std::make_pair(s, gp);
                         }};
    out.push_back(std::move(e));
  }
  {
    IdentityDef e;
    e.id = "baseline.kummer";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"a"};
    e.has_N = true;
    e.derive = [](A) { return DerivedParams{}; };
    e.materialize = [](A a, D) {
      Materialized m;
      const Rat aa = a.at("a");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      m.lhs.push_back({Rat(1), make_spec({aa, -N}, {Rat(1) + aa + N}, Rat(-1), n)});
      m.rhs_constant = m.ratio({Rat(1) + aa}, {Rat(1) + half(aa)}, n);
      m.has_rhs_constant = true;
      return m;
    };
    e.structure.well_poised = true;
    e.structure.label = "well-poised";
    e.twin = NumericTwin{{"a", "b"}, [](A a) {
                           const Rat aa = a.at("a"), b = a.at("b");
                           SeriesSpec s = make_spec({aa, b}, {Rat(1) + aa - b}, Rat(-1));
                           GammaProduct gp{{Rat(1) + aa - b, Rat(1) + half(aa)},
                                           {Rat(1) + aa, Rat(1) + half(aa) - b}};
                           return std::make_pair(s, gp);
                         }};
    out.push_back(std::move(e));
  }
  {
    IdentityDef e;
    e.id = "baseline.dixon";
    e.kind = IdentityKind::TerminatingExact;
    e.params = {"a", "b"};
    e.has_N = true;
    e.derive = [](A) { return DerivedParams{}; };
    e.materialize = [](A a, D) {
      Materialized m;
      const Rat aa = a.at("a"), b = a.at("b");
      const Rat N = detail::need_N(a);
      const unsigned n = *a.N;
      m.lhs.push_back({Rat(1), make_spec({aa, b, -N},
                                         {Rat(1) + aa - b, Rat(1) + aa + N}, Rat(1), n)});
      m.rhs_constant = m.ratio({Rat(1) + aa, Rat(1) + half(aa) - b},
                               {Rat(1) + half(aa), Rat(1) + aa - b}, n);
      m.has_rhs_constant = true;
      return m;
    };
    e.structure.well_poised = true;
    e.structure.label = "well-poised";
    e.twin = NumericTwin{
        {"a", "b", "c"}, [](A a) {
          const Rat aa = a.at("a"), b = a.at("b"), c = a.at("c");
          SeriesSpec s = make_spec({aa, b, c}, {Rat(1) + aa - b, Rat(1) + aa - c}, Rat(1));
          GammaProduct gp{{Rat(1) + half(aa), Rat(1) + half(aa) - b - c, Rat(1) + aa - b,
                           Rat(1) + aa - c},
                          {Rat(1) + aa, Rat(1) + aa - b - c, Rat(1) + half(aa) - b,
                           Rat(1) + half(aa) - c}};
          return std::make_pair(s, gp);
        }};
    out.push_back(std::move(e));
  }

  return out;
}

} // namespace defs

inline const std::vector<IdentityDef>& catalog() {
  static const std::vector<IdentityDef> all = defs::make_all();
  return all;
}

inline const IdentityDef& find_def(const std::string& id) {
  for (const auto& d : catalog())
    if (d.id == id)
      return d;
  throw UnknownIdentity("unknown identity id: " + id);
}

// ---------------------------------------------------------------------------
// build / verify / sample
// ---------------------------------------------------------------------------

inline IdentityInstance build_instance(const std::string& def_id, const Assignment& a) {
  const IdentityDef& def = find_def(def_id);
  for (const auto& p : def.params)
    a.at(p); // throws on missing
  if (def.has_N && !a.N)
    throw Error("identity requires N");
  DerivedParams d = def.derive(a);
  Materialized m = def.materialize(a, d);
  detail::require_admissible(m);
  return IdentityInstance{def.id, a, d};
}

struct VerifyOutcome {
  bool pass = false;
  std::string lhs_value, rhs_value;
  unsigned long truncation_index = 0;
};

inline VerifyOutcome verify(const IdentityInstance& inst, unsigned numeric_digits = 12) {
  const IdentityDef& def = find_def(inst.def_id);
  Materialized m = def.materialize(inst.assignment, inst.derived);
  VerifyOutcome out;
  if (def.kind == IdentityKind::TerminatingExact) {
    Rat lhs(0), rhs = m.has_rhs_constant ? m.rhs_constant : Rat(0);
    for (const auto& t : m.lhs)
      lhs += t.coefficient * eval_terminating(t.spec);
    for (const auto& t : m.rhs)
      rhs += t.coefficient * eval_terminating(t.spec);
    out.pass = (lhs == rhs);
    out.lhs_value = lhs.str();
    out.rhs_value = rhs.str();
    return out;
  }
  // numeric: two-rung precision ladder, |lhs-rhs| <= 10^-digits * max(1,|rhs|)
  const mpfr_prec_t p = working_precision(numeric_digits);
  bool ok = true;
  for (mpfr_prec_t rung : {p, static_cast<mpfr_prec_t>(p + 64)}) {
    unsigned long trunc = 0;
    Real rhs = eval_gamma_product(*m.rhs_gamma, numeric_digits, rung);
    // The comparison is relative, so for values far above 1 the absolute
    // truncation target may be relaxed by the value's magnitude; it always
    // stays two orders below the allowed error.
    unsigned target = numeric_digits;
    if (!rhs.is_zero()) {
      long e10 = static_cast<long>(static_cast<double>(mpfr_get_exp(rhs.raw())) *
                                   0.30102999566398);
      if (e10 >= static_cast<long>(numeric_digits))
        target = 1;
      else if (e10 > 0)
        target = numeric_digits - static_cast<unsigned>(e10);
    }
    Real lhs = Real(m.lhs.front().coefficient, rung) *
               eval_nonterminating(m.lhs.front().spec, target, rung, &trunc);
    Real tol = Real::pow10(-static_cast<long>(numeric_digits), rung);
    Real scale = rhs.abs();
    if (scale < Real(1L, rung))
      scale = Real(1L, rung);
    if (!((lhs - rhs).abs() <= tol * scale))
      ok = false;
    if (rung == p) {
      out.lhs_value = lhs.str(static_cast<int>(numeric_digits) + 4);
      out.rhs_value = rhs.str(static_cast<int>(numeric_digits) + 4);
      out.truncation_index = trunc;
    }
  }
  out.pass = ok;
  return out;
}

namespace detail {

inline Rat draw_rat(std::mt19937_64& g) {
  long num = static_cast<long>(g() % 61) - 30;
  long den = 1 + static_cast<long>(g() % 12);
  return Rat(num, den);
}

inline Assignment draw_assignment(const IdentityDef& def, std::mt19937_64& g,
                                  unsigned max_n) {
  Assignment a;
  for (const auto& p : def.params)
    a.vals[p] = draw_rat(g);
  if (def.has_N)
    a.N = static_cast<unsigned>(g() % (max_n + 1));
  return a;
}

inline Rat lhs_excess(const Materialized& m) {
  return classify(m.lhs.front().spec).parametric_excess;
}

} // namespace detail

// Draw one admissible instance with the trial-local generator; counts
// rejections into *rejections. Throws SamplerExhausted after 10^4 consecutive
// rejected draws.
inline IdentityInstance sample_one(const IdentityDef& def, std::mt19937_64& g,
                                   unsigned max_n, long* rejections) {
  for (int consecutive = 0;;) {
    Assignment a = detail::draw_assignment(def, g, max_n);
    try {
      DerivedParams d = def.derive(a);
      Materialized m = def.materialize(a, d);
      detail::require_admissible(m);
      if (def.kind == IdentityKind::NonterminatingNumeric &&
          detail::lhs_excess(m) < Rat(5))
        throw DegenerateParams("parametric excess below the sampling floor");
      return IdentityInstance{def.id, a, d};
    } catch (const DegenerateParams&) {
    } catch (const PoleError&) {
    }
    if (rejections)
      ++*rejections;
    if (++consecutive >= 10000)
      throw SamplerExhausted("no admissible instance for " + def.id +
                             " after 10000 consecutive rejections");
  }
}

inline std::vector<IdentityInstance> sample(const std::string& def_id, unsigned long seed,
                                            int count, unsigned max_n = 20,
                                            long* rejections = nullptr) {
  const IdentityDef& def = find_def(def_id);
  std::vector<IdentityInstance> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::mt19937_64 g(seed + static_cast<unsigned long>(i));
    out.push_back(sample_one(def, g, max_n, rejections));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verification campaign (seeded, deterministic, optionally multi-threaded)
// ---------------------------------------------------------------------------

struct FailureRecord {
  Assignment assignment;
  std::string lhs_value, rhs_value;
};

struct VerificationReport {
  std::string def_id;
  unsigned long seed = 0;
  int trials = 0;
  int passes = 0;
  long rejected_degenerate = 0;
  std::vector<FailureRecord> failures;
  DerivedParams derived_sample; // derived values of trial 0
  long elapsed_ms = 0;
};

struct CampaignConfig {
  unsigned long seed = 1;
  int trials = 100;
  unsigned digits = 12;
  unsigned max_n = 20;
  int workers = 1;
};

inline VerificationReport run_campaign(const std::string& def_id, const CampaignConfig& cfg) {
  const IdentityDef& def = find_def(def_id);
  const auto t0 = std::chrono::steady_clock::now();

  struct Trial {
    bool pass = false;
    long rejections = 0;
    Assignment assignment;
    DerivedParams derived;
    std::string lhs, rhs;
    std::string fatal; // SamplerExhausted message, if any
  };
  std::vector<Trial> trials(static_cast<size_t>(cfg.trials));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= cfg.trials)
        return;
      Trial& t = trials[static_cast<size_t>(i)];
      std::mt19937_64 g(cfg.seed + static_cast<unsigned long>(i));
      try {
        IdentityInstance inst = sample_one(def, g, cfg.max_n, &t.rejections);
        t.assignment = inst.assignment;
        t.derived = inst.derived;
        try {
          VerifyOutcome v = verify(inst, cfg.digits);
          t.pass = v.pass;
          t.lhs = v.lhs_value;
          t.rhs = v.rhs_value;
        } catch (const Error& e) {
          t.pass = false;
          t.lhs = std::string("verification-error: ") + e.what();
          t.rhs = "";
        }
      } catch (const SamplerExhausted& e) {
        t.fatal = e.what();
      }
    }
  };
  int nworkers = std::max(1, std::min(cfg.workers, cfg.trials));
  if (nworkers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nworkers; ++w)
      pool.emplace_back(worker);
    for (auto& th : pool)
      th.join();
  }

  for (const auto& t : trials)
    if (!t.fatal.empty())
      throw SamplerExhausted(t.fatal);

  VerificationReport rep;
  rep.def_id = def.id;
  rep.seed = cfg.seed;
  rep.trials = cfg.trials;
  for (const auto& t : trials) {
    rep.rejected_degenerate += t.rejections;
    if (t.pass)
      ++rep.passes;
    else
      rep.failures.push_back({t.assignment, t.lhs, t.rhs});
  }
  if (!trials.empty())
    rep.derived_sample = trials.front().derived;
  rep.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return rep;
}

// ---------------------------------------------------------------------------
// Contiguous-relation check and the derivation chain
// ---------------------------------------------------------------------------

// Verifies F(..., b_k - 1, ...) = F(..., b_k, ...) +
//   (1/(b_k-1)) (prod numerators) z / (prod denominators) F(all+1) exactly.
inline bool check_contiguous(const SeriesSpec& spec, size_t k_index) {
  if (!spec.termination)
    throw Error("check_contiguous requires a terminating series");
  if (k_index >= spec.denominators.size() || entry_is_pair(spec.denominators[k_index]))
    throw Error("k_index must name a rational denominator parameter");
  const unsigned N = *spec.termination;
  const Rat bk = std::get<Rat>(spec.denominators[k_index]);
  if (bk == Rat(1))
    throw PoleError("b_k - 1 vanishes");

  SeriesSpec lowered = spec;
  lowered.denominators[k_index] = bk - Rat(1);
  Rat lhs = eval_terminating(lowered);

  Rat rhs = eval_terminating(spec);
  if (N >= 1) {
    Rat coef = spec.z / (bk - Rat(1));
    for (const auto& e : spec.numerators) {
      if (entry_is_pair(e)) {
        const auto& pr = std::get<SurdPairBase>(e);
        coef *= pr.center * pr.center - pr.lambda_sq;
      } else {
        coef *= std::get<Rat>(e);
      }
    }
    for (const auto& e : spec.denominators) {
      Rat d = entry_is_pair(e)
                  ? std::get<SurdPairBase>(e).center * std::get<SurdPairBase>(e).center -
                        std::get<SurdPairBase>(e).lambda_sq
                  : std::get<Rat>(e);
      if (d.is_zero())
        throw PoleError("check_contiguous: denominator parameter product vanishes");
      coef /= d;
    }
    if (coef.is_zero())
      return lhs == rhs;
    SeriesSpec up;
    up.z = spec.z;
    up.termination = N - 1;
    for (const auto& e : spec.numerators) {
      if (entry_is_pair(e)) {
        auto pr = std::get<SurdPairBase>(e);
        pr.center += Rat(1);
        up.numerators.emplace_back(pr);
      } else {
        up.numerators.emplace_back(std::get<Rat>(e) + Rat(1));
      }
    }
    for (const auto& e : spec.denominators) {
      if (entry_is_pair(e)) {
        auto pr = std::get<SurdPairBase>(e);
        pr.center += Rat(1);
        up.denominators.emplace_back(pr);
      } else {
        up.denominators.emplace_back(std::get<Rat>(e) + Rat(1));
      }
    }
    rhs += coef * eval_terminating(up);
  }
  return lhs == rhs;
}

// Derivation chain: substitute e = f+1, c = a-f+1 into the 7F6-to-4F3
// transformation, close the embedded 4F3 with the extended-Saalschutz value,
// and confirm the result is exactly the shifted-quotient 7F6 summation.
struct DerivationCheckResult {
  int trials = 0;
  int passes = 0;
};

inline DerivationCheckResult derivation_check_2_1(unsigned long seed = 1, int count = 100) {
  DerivationCheckResult res;
  std::mt19937_64 g(seed);
  auto rat = [&]() {
    long num = static_cast<long>(g() % 25) - 12;
    long den = 1 + static_cast<long>(g() % 6);
    return Rat(num, den);
  };
  for (int attempts = 0; res.trials < count; ++attempts) {
    if (attempts > 200000)
      throw SamplerExhausted("derivation check could not find admissible draws");
    Rat a = rat(), b = rat(), dd = rat(), f = rat();
    unsigned N = static_cast<unsigned>(g() % 13);
    Rat NN(static_cast<long>(N));
    if (a == Rat(2) * f - Rat(1)) // c = a-f+1 collides with f
      continue;
    bool pass = false;
    try {
      // the substituted transformation LHS is the 7F6 of the summation
      SeriesSpec lhs7 = make_spec(
          {a, Rat(1) + half(a), b, a - f + Rat(1), dd, f + Rat(1), -NN},
          {half(a), Rat(1) + a - b, f, Rat(1) + a - dd, a - f, Rat(1) + a + NN}, Rat(1), N);
      detail::require_clean_series(lhs7);
      // transformation RHS prefactor at e = f+1, c = a-f+1
      Rat pre_den = pochhammer(Rat(1) + a - dd, N) * pochhammer(a - f, N);
      if (pre_den.is_zero())
        continue;
      Rat pre = pochhammer(a - dd - f, N) * pochhammer(Rat(1) + a, N) / pre_den;
      // embedded 4F3 parameters after substitution
      Rat ap = f - b, bp = dd, cp = Rat(1) + a - b, fp = f;
      SeriesSpec emb = make_spec({ap, bp, fp + Rat(1), -NN},
                                 {cp, fp, Rat(2) + ap + bp - cp - NN}, Rat(1), N);
      detail::require_clean_series(emb);
      Rat g_embedded = g_ext_saalschutz(ap, bp, cp, fp);
      Rat g_direct = g_vwp5f4(a, b, dd, f);
      if (g_embedded.is_nonpositive_integer())
        continue;
      Rat closed_den = pochhammer(cp, N) * pochhammer(cp - ap - bp - Rat(1), N);
      if (closed_den.is_zero())
        continue;
      Rat emb_closed = pochhammer(cp - ap - Rat(1), N) * pochhammer(cp - bp - Rat(1), N) /
                       closed_den * shifted_quotient(g_embedded, N);
      // the summation's own RHS
      Rat sum_den = pochhammer(Rat(1) + a - b, N) * pochhammer(Rat(1) + a - dd, N);
      if (sum_den.is_zero())
        continue;
      Rat sum_pre = pochhammer(Rat(1) + a, N) * pochhammer(a - b - dd, N) / sum_den;

      bool ok = (g_embedded == g_direct);
      ok = ok && (eval_terminating(emb) == emb_closed);
      ok = ok && (pre * emb_closed == sum_pre * shifted_quotient(g_direct, N));
      ok = ok && (eval_terminating(lhs7) == pre * eval_terminating(emb));
      ok = ok && (eval_terminating(lhs7) == sum_pre * shifted_quotient(g_direct, N));
      pass = ok;
    } catch (const DegenerateParams&) {
      continue;
    } catch (const PoleError&) {
      continue;
    }
    ++res.trials;
    if (pass)
      ++res.passes;
  }
  return res;
}

} // namespace hyperid
