#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <hyperid/catalog.hpp>

using namespace hyperid;

namespace {

Rat side_value(const std::vector<WeightedSeries>& terms) {
  Rat v(0);
  for (const auto& t : terms)
    v += t.coefficient * eval_terminating(t.spec);
  return v;
}

Rat rhs_value(const Materialized& m) {
  Rat v = m.has_rhs_constant ? m.rhs_constant : Rat(0);
  for (const auto& t : m.rhs)
    v += t.coefficient * eval_terminating(t.spec);
  return v;
}

Materialized materialize(const IdentityInstance& inst) {
  const IdentityDef& def = find_def(inst.def_id);
  return def.materialize(inst.assignment, inst.derived);
}

Rat small_rat(std::mt19937_64& g, long span, long max_den) {
  long num = static_cast<long>(g() % (2 * span + 1)) - span;
  long den = 1 + static_cast<long>(g() % max_den);
  return Rat(num, den);
}

} // namespace

TEST_CASE("catalog lists all entries in a stable order") {
  const std::vector<std::string> expected = {
      "ext.saalschutz_rr",  "classic.whipple_7f6_4f3",
      "ext.vwp_7f6_sum",    "ext.whipple_9f8_5f4",
      "ext.dougall_9f8_sum", "ext.bailey_form1",
      "ext.bailey_form2",   "classic.bailey_9f8",
      "contiguous.rainville", "special.4_1",
      "special.4_2",        "special.4_3",
      "special.4_5",        "special.4_7",
      "special.4_9",        "special.4_12",
      "special.4_15",       "special.4_18",
      "special.4_21",       "baseline.saalschutz",
      "baseline.dougall_7f6", "baseline.vwp_5f4",
      "baseline.gauss",     "baseline.kummer",
      "baseline.dixon"};
  REQUIRE(catalog().size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i)
    CHECK(catalog()[i].id == expected[i]);
  CHECK(find_def("ext.dougall_9f8_sum").tag == "2.4");
  CHECK(find_def("ext.dougall_9f8_sum").kind == IdentityKind::TerminatingExact);
  CHECK(find_def("special.4_2").kind == IdentityKind::NonterminatingNumeric);
  CHECK_THROWS_AS(find_def("nope.missing"), UnknownIdentity);
}

TEST_CASE("documented instance builds with populated derived parameters") {
  Assignment a;
  a.vals = {{"a", Rat(3)}, {"b", Rat(1, 2)}, {"d", Rat(1, 3)}, {"f", Rat(5, 7)}};
  a.N = 4;
  IdentityInstance inst = build_instance("ext.vwp_7f6_sum", a);
  REQUIRE(inst.derived.g.has_value());
  VerifyOutcome v = verify(inst);
  CHECK(v.pass);
  CHECK(v.lhs_value == v.rhs_value);
  Materialized m = materialize(inst);
  Classification cls = classify(m.lhs.front().spec);
  CHECK(cls.is_well_poised);
  CHECK(cls.is_very_well_poised);
}

TEST_CASE("build_instance rejects bad input") {
  Assignment a;
  a.vals = {{"a", Rat(3)}, {"b", Rat(1, 2)}, {"d", Rat(1, 3)}, {"f", Rat(5, 7)}};
  a.N = 4;
  CHECK_THROWS_AS(build_instance("nope.missing", a), UnknownIdentity);

  Assignment missing;
  missing.vals = {{"a", Rat(3)}};
  missing.N = 2;
  CHECK_THROWS_AS(build_instance("ext.vwp_7f6_sum", missing), Error);

  Assignment no_n = a;
  no_n.N.reset();
  CHECK_THROWS_AS(build_instance("ext.vwp_7f6_sum", no_n), Error);

  Assignment lowered_pole;
  lowered_pole.vals = {{"a1", Rat(2)}, {"a2", Rat(3)}, {"b1", Rat(1)}, {"b2", Rat(5)}};
  lowered_pole.N = 3;
  CHECK_THROWS_AS(build_instance("contiguous.rainville", lowered_pole), DegenerateParams);

  Assignment degenerate = a;
  degenerate.vals["f"] = Rat(3); // f = a zeroes the derived quotient parameter
  CHECK_THROWS_AS(build_instance("ext.vwp_7f6_sum", degenerate), DegenerateParams);
}

TEST_CASE("verify surfaces pole errors instead of mislabeling them") {
  // f = -2 poles the series denominator at term 3 but leaves every prefactor
  // Pochhammer and the derived quotient finite, so only evaluation can catch it
  Assignment a;
  a.vals = {{"a", Rat(1, 2)}, {"b", Rat(1, 3)}, {"c", Rat(1, 4)}, {"f", Rat(-2)}};
  a.N = 5;
  DerivedParams d;
  d.g = g_ext_saalschutz(a.at("a"), a.at("b"), a.at("c"), a.at("f"));
  IdentityInstance bogus{"ext.saalschutz_rr", a, d};
  CHECK_THROWS_AS(verify(bogus), PoleError);
  CHECK_THROWS_AS(build_instance("ext.saalschutz_rr", a), DegenerateParams);
}

TEST_CASE("sampled instances match each entry's declared structure") {
  for (const auto& def : catalog()) {
    INFO(def.id);
    auto insts = sample(def.id, 11, 2);
    for (const auto& inst : insts) {
      Materialized m = materialize(inst);
      Classification cls = classify(m.lhs.front().spec);
      if (def.structure.well_poised)
        CHECK(cls.is_well_poised == *def.structure.well_poised);
      if (def.structure.very_well_poised)
        CHECK(cls.is_very_well_poised == *def.structure.very_well_poised);
      if (def.structure.balanced)
        CHECK(cls.is_balanced == *def.structure.balanced);
      if (def.structure.excess_equals)
        CHECK(cls.parametric_excess == *def.structure.excess_equals);
      if (def.kind == IdentityKind::NonterminatingNumeric)
        CHECK(cls.parametric_excess >= Rat(5));
    }
  }
}

TEST_CASE("every terminating entry passes a 100-trial seeded campaign") {
  long total_rejected = 0;
  for (const auto& def : catalog()) {
    if (def.kind != IdentityKind::TerminatingExact)
      continue;
    CampaignConfig cfg;
    cfg.seed = 20260814;
    cfg.trials = 100;
    cfg.max_n = 20;
    cfg.workers = 4;
    VerificationReport rep = run_campaign(def.id, cfg);
    INFO(def.id);
    CHECK(rep.trials == 100);
    CHECK(rep.passes == 100);
    CHECK(rep.failures.empty());
    CHECK(rep.passes + static_cast<int>(rep.failures.size()) == rep.trials);
    total_rejected += rep.rejected_degenerate;
  }
  CHECK(total_rejected > 0); // degenerate draws exist and are resampled
}

TEST_CASE("numeric entries agree with their gamma quotients") {
  CampaignConfig cfg;
  cfg.seed = 3;
  cfg.trials = 3;
  cfg.digits = 12;
  cfg.workers = 2;
  VerificationReport r5 = run_campaign("special.4_5", cfg);
  CHECK(r5.passes == 3);
  CHECK(r5.failures.empty());
  REQUIRE(r5.derived_sample.k.has_value());

  cfg.trials = 2;
  VerificationReport r18 = run_campaign("special.4_18", cfg);
  CHECK(r18.passes == 2);
  CHECK(r18.failures.empty());
}

TEST_CASE("campaigns are deterministic and independent of worker count") {
  CampaignConfig c1;
  c1.seed = 42;
  c1.trials = 24;
  c1.workers = 1;
  CampaignConfig c4 = c1;
  c4.workers = 4;
  VerificationReport r1 = run_campaign("ext.dougall_9f8_sum", c1);
  VerificationReport r4 = run_campaign("ext.dougall_9f8_sum", c4);
  CHECK(r1.passes == r4.passes);
  CHECK(r1.rejected_degenerate == r4.rejected_degenerate);
  CHECK(r1.failures.size() == r4.failures.size());
  REQUIRE(r1.derived_sample.k.has_value());
  REQUIRE(r4.derived_sample.k.has_value());
  CHECK(*r1.derived_sample.k == *r4.derived_sample.k);

  auto s5 = sample("ext.vwp_7f6_sum", 9, 5);
  auto s3 = sample("ext.vwp_7f6_sum", 9, 3);
  for (size_t i = 0; i < s3.size(); ++i) {
    CHECK(s5[i].assignment.vals == s3[i].assignment.vals);
    CHECK(s5[i].assignment.N == s3[i].assignment.N);
  }
}

TEST_CASE("setting the split parameter to a1 collapses to the classical 7F6 sum") {
  std::mt19937_64 g(77);
  int done = 0, attempts = 0;
  while (done < 30) {
    REQUIRE(attempts++ < 200000);
    Rat f = small_rat(g, 20, 8), a1 = small_rat(g, 20, 8), d1 = small_rat(g, 20, 8),
        d2 = small_rat(g, 20, 8);
    unsigned N = static_cast<unsigned>(g() % 16);
    Rat lhs_ext(0), rhs_ext(0), lhs_base(0), rhs_base(0);
    try {
      Assignment ae;
      ae.vals = {{"f", f}, {"p", a1}, {"a1", a1}, {"d1", d1}, {"d2", d2}};
      ae.N = N;
      IdentityInstance ie = build_instance("ext.dougall_9f8_sum", ae);
      Assignment ab;
      ab.vals = {{"a", f - Rat(1)}, {"b", a1 + Rat(1)}, {"c", d1}, {"d", d2}};
      ab.N = N;
      IdentityInstance ib = build_instance("baseline.dougall_7f6", ab);
      Materialized me = materialize(ie);
      Materialized mb = materialize(ib);
      lhs_ext = side_value(me.lhs);
      rhs_ext = rhs_value(me);
      lhs_base = side_value(mb.lhs);
      rhs_base = rhs_value(mb);
    } catch (const Error&) {
      continue;
    }
    CHECK(lhs_ext == rhs_ext);
    CHECK(lhs_base == rhs_base);
    CHECK(lhs_ext == lhs_base);
    CHECK(rhs_ext == rhs_base);
    ++done;
  }
}

TEST_CASE("the transformation at p = a1 reduces to the two-term 9F8 form") {
  std::mt19937_64 g(123);
  int done = 0, attempts = 0;
  while (done < 20) {
    REQUIRE(attempts++ < 400000);
    Rat f = small_rat(g, 12, 6), a1 = small_rat(g, 12, 6), d1 = small_rat(g, 12, 6),
        d2 = small_rat(g, 12, 6), b1 = small_rat(g, 12, 6), b2 = small_rat(g, 12, 6);
    unsigned N = static_cast<unsigned>(g() % 11);
    Rat l2, r2, l9, r9;
    try {
      Assignment a2;
      a2.vals = {{"f", f}, {"p", a1}, {"a1", a1}, {"d1", d1},
                 {"d2", d2}, {"b1", b1}, {"b2", b2}};
      a2.N = N;
      IdentityInstance i2 = build_instance("ext.bailey_form2", a2);
      Assignment a9;
      a9.vals = {{"f", f}, {"a1", a1}, {"d1", d1}, {"d2", d2}, {"b1", b1}, {"b2", b2}};
      a9.N = N;
      IdentityInstance i9 = build_instance("classic.bailey_9f8", a9);
      Materialized m2 = materialize(i2);
      Materialized m9 = materialize(i9);
      l2 = side_value(m2.lhs);
      r2 = rhs_value(m2);
      l9 = side_value(m9.lhs);
      r9 = rhs_value(m9);
    } catch (const Error&) {
      continue;
    }
    CHECK(l2 == r2);
    CHECK(l9 == r9);
    CHECK(l2 == l9);
    CHECK(r2 == r9);
    ++done;
  }
}

TEST_CASE("both closed forms of the three-term transformation agree") {
  std::mt19937_64 g(321);
  int done = 0, attempts = 0;
  while (done < 20) {
    REQUIRE(attempts++ < 400000);
    Assignment a;
    for (const char* p : {"f", "p", "a1", "d1", "d2", "b1", "b2"})
      a.vals[p] = small_rat(g, 12, 6);
    a.N = static_cast<unsigned>(g() % 11);
    Rat l1, r1, l2, r2;
    try {
      IdentityInstance i1 = build_instance("ext.bailey_form1", a);
      IdentityInstance i2 = build_instance("ext.bailey_form2", a);
      Materialized m1 = materialize(i1);
      Materialized m2 = materialize(i2);
      l1 = side_value(m1.lhs);
      r1 = rhs_value(m1);
      l2 = side_value(m2.lhs);
      r2 = rhs_value(m2);
    } catch (const Error&) {
      continue;
    }
    CHECK(l1 == r1);
    CHECK(l2 == r2);
    CHECK(r1 == r2);
    ++done;
  }
}

TEST_CASE("the substitution chain reproduces the 7F6 summation") {
  DerivationCheckResult res = derivation_check_2_1(1, 100);
  CHECK(res.trials == 100);
  CHECK(res.passes == 100);
}

TEST_CASE("contiguous denominator relation") {
  SECTION("worked 2F1 example") {
    SeriesSpec s = make_spec({Rat(-2), Rat(3)}, {Rat(5)}, Rat(1), 2);
    CHECK(check_contiguous(s, 0));
    SeriesSpec lowered = make_spec({Rat(-2), Rat(3)}, {Rat(4)}, Rat(1), 2);
    CHECK(eval_terminating(lowered) == Rat(1, 10));
  }
  SECTION("lowering through zero is a pole") {
    SeriesSpec s = make_spec({Rat(-2), Rat(3)}, {Rat(1), Rat(5)}, Rat(1), 2);
    CHECK_THROWS_AS(check_contiguous(s, 0), PoleError);
  }
  SECTION("k_index must name a rational denominator") {
    SeriesSpec s = make_spec({Rat(-2), Rat(3)}, {Rat(5)}, Rat(1), 2);
    CHECK_THROWS_AS(check_contiguous(s, 3), Error);
  }
  SECTION("random terminating series, including conjugate pairs") {
    std::mt19937_64 g(2024);
    int done = 0, attempts = 0;
    while (done < 40) {
      REQUIRE(attempts++ < 200000);
      unsigned N = static_cast<unsigned>(g() % 9);
      SeriesSpec s;
      s.z = (g() % 2) ? Rat(1) : Rat(-1);
      s.termination = N;
      unsigned nn = 1 + g() % 3, nd = 1 + g() % 3;
      for (unsigned i = 0; i < nn; ++i)
        s.numerators.emplace_back(small_rat(g, 9, 5));
      s.numerators.emplace_back(Rat(-static_cast<long>(N)));
      if (g() % 3 == 0)
        s.numerators.emplace_back(SurdPairBase{small_rat(g, 5, 3), small_rat(g, 7, 4)});
      for (unsigned i = 0; i < nd; ++i)
        s.denominators.emplace_back(small_rat(g, 9, 5));
      if (g() % 4 == 0)
        s.denominators.emplace_back(SurdPairBase{small_rat(g, 5, 3), small_rat(g, 7, 4)});
      size_t k = g() % nd;
      bool ok = false;
      try {
        ok = check_contiguous(s, k);
      } catch (const Error&) {
        continue;
      }
      CHECK(ok);
      ++done;
    }
  }
}

TEST_CASE("classical baselines keep their full numeric forms") {
  std::mt19937_64 g(5);
  for (const char* id :
       {"baseline.gauss", "baseline.kummer", "baseline.dixon", "baseline.vwp_5f4"}) {
    const IdentityDef& def = find_def(id);
    INFO(id);
    REQUIRE(def.twin.has_value());
    int done = 0, attempts = 0;
    while (done < 3) {
      REQUIRE(attempts++ < 200000);
      Assignment a;
      for (const auto& p : def.twin->params)
        a.vals[p] = small_rat(g, 6, 4);
      bool ok = false;
      try {
        auto [spec, gp] = def.twin->build(a);
        if (!validate(spec).ok())
          continue;
        if (classify(spec).parametric_excess < Rat(5))
          continue;
        bool pole = false;
        for (const Rat& x : gp.numerator_args)
          pole = pole || x.is_nonpositive_integer();
        for (const Rat& x : gp.denominator_args)
          pole = pole || x.is_nonpositive_integer();
        if (pole)
          continue;
        Real l = eval_nonterminating(spec, 12);
        Real r = eval_gamma_product(gp, 12);
        ok = agree_to_digits(l, r, 12);
      } catch (const Error&) {
        continue;
      }
      CHECK(ok);
      ++done;
    }
  }
}
