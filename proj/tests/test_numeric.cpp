#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include <hyperid/series_numeric.hpp>

using namespace hyperid;

namespace {
Rat rr(long p, long q = 1) { return Rat(p, q); }
} // namespace

TEST_CASE("working precision floor") {
  CHECK(working_precision(12) == 192);
  CHECK(working_precision(30) == 192);
  CHECK(working_precision(60) == 268);
}

TEST_CASE("gamma product simplification") {
  CHECK(eval_gamma_product({{}, {}}, 12) == Real(1L, 192));
  // functional-equation pair collapses exactly
  GammaProduct k32{{rr(3, 2)}, {rr(5, 2)}};
  CHECK(eval_gamma_product(k32, 12) == Real(rr(2, 3), 192));
  // works even where Gamma itself has poles: Gamma(-3)/Gamma(-2) = -1/3
  GammaProduct kneg{{rr(-3)}, {rr(-2)}};
  CHECK(eval_gamma_product(kneg, 12) == Real(rr(-1, 3), 192));
  // identical arguments cancel even on poles
  GammaProduct same{{rr(-5), rr(1, 2)}, {rr(-5)}};
  CHECK(agree_to_digits(eval_gamma_product(same, 20), gamma(rr(1, 2), 192), 20));
  // arguments that remain after simplification must be pole-free
  GammaProduct bad{{rr(-4)}, {rr(7, 2)}};
  CHECK_THROWS_AS(eval_gamma_product(bad, 12), PoleError);
  GammaProduct zero_ratio{{rr(0)}, {rr(1)}};
  CHECK_THROWS_AS(eval_gamma_product(zero_ratio, 12), PoleError);
}

TEST_CASE("gamma product is invariant under num/den moves") {
  std::mt19937_64 g(5);
  for (int trial = 0; trial < 25; ++trial) {
    GammaProduct gp;
    for (int i = 0; i < 4; ++i)
      gp.numerator_args.push_back(Rat(1 + static_cast<long>(g() % 40), 1 + static_cast<long>(g() % 6)));
    for (int i = 0; i < 3; ++i)
      gp.denominator_args.push_back(Rat(1 + static_cast<long>(g() % 40), 1 + static_cast<long>(g() % 6)));
    Real direct = eval_gamma_product(gp, 25);
    // move one numerator argument down as a reciprocal denominator pairing
    GammaProduct moved = gp;
    Rat x = moved.numerator_args.back();
    moved.numerator_args.pop_back();
    GammaProduct rest = moved;
    Real v = eval_gamma_product(rest, 25) * gamma(x, working_precision(25));
    CHECK(agree_to_digits(v, direct, 22));
  }
}

TEST_CASE("gauss summation, nonterminating") {
  SeriesSpec s = make_spec({rr(1, 3), rr(1, 4)}, {rr(8)}, rr(1));
  GammaProduct rhs{{rr(8), rr(8) - rr(1, 3) - rr(1, 4)}, {rr(8) - rr(1, 3), rr(8) - rr(1, 4)}};
  auto chk = check_series_vs_gamma(s, rhs, Rat(1), 12);
  CHECK(chk.pass);
  CHECK(chk.truncation_index > 0);
  auto chk30 = check_series_vs_gamma(s, rhs, Rat(1), 30);
  CHECK(chk30.pass);
  CHECK(chk30.truncation_index > chk.truncation_index);
}

TEST_CASE("terminating gauss equals numeric gamma RHS to 30 digits") {
  // 2F1(a, -N; c; 1) = (c-a)_N / (c)_N; RHS gamma form Gamma[c, c-a+N; c-a, c+N]
  std::mt19937_64 g(17);
  for (int trial = 0; trial < 20; ++trial) {
    unsigned N = g() % 12;
    Rat a(1 + static_cast<long>(g() % 9), 1 + static_cast<long>(g() % 5));
    Rat c = a + Rat(1 + static_cast<long>(g() % 8), 1 + static_cast<long>(g() % 3));
    SeriesSpec s = make_spec({a, Rat(-static_cast<long>(N))}, {c}, rr(1), N);
    Rat exact = eval_terminating(s);
    GammaProduct rhs{{c, c - a + Rat(static_cast<long>(N))}, {c - a, c + Rat(static_cast<long>(N))}};
    Real numeric = eval_gamma_product(rhs, 30);
    CHECK(agree_to_digits(Real(exact, working_precision(30)), numeric, 30));
  }
}

TEST_CASE("kummer at z=-1") {
  Rat a = rr(1, 3), b = rr(-5, 2);
  SeriesSpec s = make_spec({a, b}, {Rat(1) + a - b}, rr(-1));
  GammaProduct rhs{{Rat(1) + a - b, Rat(1) + half(a)}, {Rat(1) + a, Rat(1) + half(a) - b}};
  auto chk = check_series_vs_gamma(s, rhs, Rat(1), 12);
  CHECK(chk.pass);
}

TEST_CASE("dixon at z=1") {
  Rat a = rr(1, 2), b = rr(-3, 4), c = rr(-5, 4);
  SeriesSpec s = make_spec({a, b, c}, {Rat(1) + a - b, Rat(1) + a - c}, rr(1));
  GammaProduct rhs{{Rat(1) + half(a), Rat(1) + half(a) - b - c, Rat(1) + a - b, Rat(1) + a - c},
                   {Rat(1) + a, Rat(1) + a - b - c, Rat(1) + half(a) - b, Rat(1) + half(a) - c}};
  auto chk = check_series_vs_gamma(s, rhs, Rat(1), 12);
  CHECK(chk.pass);
}

TEST_CASE("delegation to terminating semantics when a numerator vanishes") {
  SeriesSpec s = make_spec({rr(-6), rr(1, 3)}, {rr(1, 5)}, rr(1));
  SeriesSpec t = s;
  t.termination = 6;
  unsigned long trunc = 0;
  Real v = eval_nonterminating(s, 12, 0, &trunc);
  CHECK(trunc == 6);
  CHECK(v == Real(eval_terminating(t), working_precision(12)));
  // pair numerator hitting a root also terminates: (x+j)^2 = lambda^2 at j=4
  SeriesSpec sp = make_spec({rr(1, 3)}, {rr(1, 5)}, rr(1));
  sp.numerators.emplace_back(SurdPairBase{rr(-3, 2), rr(25, 4)});
  unsigned long tp = 0;
  eval_nonterminating(sp, 12, 0, &tp);
  CHECK(tp == 4);
}

TEST_CASE("convergence guards") {
  // excess = 1/6 - 1/3 - 1/4 < 0 at z=1
  SeriesSpec bad = make_spec({rr(1, 3), rr(1, 4)}, {rr(1, 6)}, rr(1));
  CHECK_THROWS_AS(eval_nonterminating(bad, 12), ConvergenceError);
  // nonpositive-integer denominator refuses evaluation
  SeriesSpec pole = make_spec({rr(1, 3)}, {rr(-2)}, rr(1));
  CHECK_THROWS_AS(eval_nonterminating(pole, 12), PoleError);
}

TEST_CASE("nonterminating evaluation is permutation invariant") {
  SeriesSpec s = make_spec({rr(1, 3), rr(1, 4), rr(2, 5)}, {rr(9), rr(17, 2)}, rr(1));
  Real base = eval_nonterminating(s, 15);
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 5; ++trial) {
    SeriesSpec t = s;
    std::shuffle(t.numerators.begin(), t.numerators.end(), g);
    std::shuffle(t.denominators.begin(), t.denominators.end(), g);
    CHECK(agree_to_digits(eval_nonterminating(t, 15), base, 15));
  }
}

TEST_CASE("precision ladder detects nothing amiss on stable values") {
  SeriesSpec s = make_spec({rr(1, 3), rr(1, 4)}, {rr(8)}, rr(1));
  GammaProduct rhs{{rr(8), rr(8) - rr(1, 3) - rr(1, 4)}, {rr(8) - rr(1, 3), rr(8) - rr(1, 4)}};
  for (unsigned digits : {8u, 12u, 16u}) {
    auto chk = check_series_vs_gamma(s, rhs, Rat(1), digits);
    CHECK(chk.pass);
  }
  // and a deliberately wrong RHS fails
  GammaProduct wrong = rhs;
  wrong.numerator_args[0] = rr(17, 2);
  CHECK_FALSE(check_series_vs_gamma(s, wrong, Rat(1), 12).pass);
}
