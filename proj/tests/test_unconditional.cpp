#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "twobinom/distributions.hpp"
#include "twobinom/unconditional.hpp"

#include <cmath>

#include "oracles.hpp"

using namespace twobinom;
using oracle::naive_pvalues;
using oracle::size_of;

namespace {

Hypothesis eq(Alternative a, EffectMeasure m = EffectMeasure::difference) { return {m, equality_value(m), a}; }

}  // namespace

TEST_CASE("masked points get p = 1") {
  const auto o = order_estimate(6, 5, EffectMeasure::ratio);
  for (auto a : {Alternative::less, Alternative::greater})
    for (double b0 : {0.5, 1.0, 3.0}) CHECK(uncond_pvalue({0, 6, 0, 5}, {EffectMeasure::ratio, b0, a}, o) == 1.0);
  const auto tab = uncond_pvalue_table(eq(Alternative::greater, EffectMeasure::ratio), o);
  CHECK(tab(0, 0) == 1.0);
  const auto oo = order_estimate(6, 5, EffectMeasure::oddsratio);
  const auto t2 = uncond_pvalue_table(eq(Alternative::less, EffectMeasure::oddsratio), oo);
  CHECK(t2(6, 5) == 1.0);
  CHECK(t2(0, 0) == 1.0);
}

TEST_CASE("most extreme point, n1 = n2 = 4") {
  const double p = uncond_pvalue({4, 4, 0, 4}, eq(Alternative::less), order_diff(4, 4));
  CHECK(p == doctest::Approx(std::pow(0.5, 8)).epsilon(1e-9));
}

TEST_CASE("two-sided score p-values") {
  const auto h = eq(Alternative::two_sided_minlike);
  auto p = [&](int x2, int n2) {
    return uncond_pvalue_twosided({5, 9, x2, n2}, h, order_score_twosided(9, n2, EffectMeasure::difference, 0.0));
  };
  CHECK(p(7, 7) == doctest::Approx(0.0496).epsilon(5e-4 / 0.0496));
  CHECK(p(8, 8) == doctest::Approx(0.0510).epsilon(1e-3 / 0.051));
  CHECK(p(7, 8) == doctest::Approx(0.172).epsilon(1e-3 / 0.172));
  // Central from one-sided score p-values is a separate test.
  const auto o1 = order_score(9, 7, EffectMeasure::difference, 0.0);
  const double pl = uncond_pvalue({5, 9, 7, 7}, eq(Alternative::less), o1);
  const double pg = uncond_pvalue({5, 9, 7, 7}, eq(Alternative::greater), o1);
  CHECK(uncond_pvalue({5, 9, 7, 7}, eq(Alternative::two_sided_central), o1) ==
        doctest::Approx(std::min({1.0, 2 * pl, 2 * pg})));
  // The least extreme point.
  const auto o2 = order_score_twosided(8, 8, EffectMeasure::difference, 0.0);
  CHECK(uncond_pvalue_twosided({4, 8, 4, 8}, h, o2) == doctest::Approx(1.0));
}

TEST_CASE("brute-force oracle, n1, n2 <= 5") {
  for (int n1 = 1; n1 <= 5; ++n1)
    for (int n2 = 1; n2 <= 5; ++n2) {
      struct Case {
        SampleSpaceOrdering o;
        Hypothesis h;
      };
      const std::vector<Case> cases = {
          {order_diff(n1, n2), eq(Alternative::less)},
          {order_diff_tiebreak(n1, n2), eq(Alternative::greater)},
          {order_diff(n1, n2), {EffectMeasure::difference, 0.2, Alternative::greater}},
          {order_fisher_midp(n1, n2), {EffectMeasure::ratio, 1.5, Alternative::less}},
          {order_estimate(n1, n2, EffectMeasure::oddsratio), {EffectMeasure::oddsratio, 2.0, Alternative::greater}},
          {order_score_twosided(n1, n2, EffectMeasure::difference, 0.0), eq(Alternative::two_sided_minlike)},
      };
      for (const auto& c : cases) {
        const Table tab = uncond_pvalue_table(c.h, c.o);
        Hypothesis hn = c.h;
        if (c.o.two_sided) hn.alternative = Alternative::less;
        const Table naive = naive_pvalues(n1, n2, hn, c.o, 4001);
        for (int x1 = 0; x1 <= n1; ++x1)
          for (int x2 = 0; x2 <= n2; ++x2) {
            const TwoByTwoData d{x1, n1, x2, n2};
            INFO(c.o.name, " n=", n1, ",", n2, " x=", x1, ",", x2);
            CHECK(tab(x1, x2) >= naive(x1, x2) - 1e-10);
            CHECK(tab(x1, x2) <= naive(x1, x2) + 2e-5);
            CHECK(uncond_pvalue(d, c.h, c.o) == doctest::Approx(tab(x1, x2)).epsilon(1e-9));
          }
      }
    }
}

TEST_CASE("refinement never increases p") {
  for (int n1 = 1; n1 <= 12; ++n1)
    for (int n2 = 1; n2 <= 12; n2 += 3)
      for (auto a : {Alternative::less, Alternative::greater}) {
        const Table coarse = uncond_pvalue_table(eq(a), order_diff(n1, n2));
        const Table fine = uncond_pvalue_table(eq(a), order_diff_tiebreak(n1, n2));
        CHECK(((fine.array() - coarse.array()).maxCoeff() <= 1e-9));
      }
}

TEST_CASE("fixed BC orderings give p monotone in the null value") {
  const TwoByTwoData d{3, 9, 6, 8};
  for (const auto& o : {order_diff(9, 8), order_diff_tiebreak(9, 8), order_fisher_midp(9, 8)}) {
    double prev_l = 2, prev_g = -1;
    for (int k = 0; k <= 100; ++k) {
      const double b0 = -0.99 + 1.98 * k / 100;
      const double pl = uncond_pvalue(d, {EffectMeasure::difference, b0, Alternative::less}, o);
      const double pg = uncond_pvalue(d, {EffectMeasure::difference, b0, Alternative::greater}, o);
      CHECK(pl <= prev_l + 1e-9);
      CHECK(pg >= prev_g - 1e-9);
      prev_l = pl;
      prev_g = pg;
    }
  }
}

TEST_CASE("Boschloo never above conditional Fisher") {
  for (int n1 = 1; n1 <= 8; ++n1)
    for (int n2 = 1; n2 <= 8; ++n2) {
      const auto fi = fisher_ordering(n1, n2, 1.0, BoschlooVariant::irwin, Alternative::two_sided_minlike);
      const Table bt = uncond_pvalue_table(eq(Alternative::two_sided_minlike), fi);
      const auto lo = fisher_ordering(n1, n2, 1.0, BoschlooVariant::onesided, Alternative::less);
      const Table bl = uncond_pvalue_table(eq(Alternative::less), lo);
      for (int x1 = 0; x1 <= n1; ++x1)
        for (int x2 = 0; x2 <= n2; ++x2) {
          const TwoByTwoData d{x1, n1, x2, n2};
          CHECK(bt(x1, x2) <= fisher_irwin(d, 1.0) + 1e-9);
          CHECK(bl(x1, x2) <= fisher_onesided(d, eq(Alternative::less)) + 1e-9);
          CHECK(boschloo(d, eq(Alternative::two_sided_minlike), BoschlooVariant::irwin) ==
                doctest::Approx(bt(x1, x2)).epsilon(1e-9));
        }
    }
  CHECK(boschloo({4, 8, 4, 8}, eq(Alternative::two_sided_minlike), BoschlooVariant::irwin) == doctest::Approx(1.0));
}

TEST_CASE("E+M") {
  const auto o = order_diff(6, 6);
  const auto h = eq(Alternative::greater);
  UnconditionalOptions em;
  em.em_iterations = 1;
  const Table p = uncond_pvalue_table(h, o, em);
  CHECK(size_of(p, 6, 6, 0.05, {EffectMeasure::difference, 0.0}) <= 0.05 + 1e-9);
  CHECK(uncond_pvalue({1, 6, 5, 6}, h, o, em) == doctest::Approx(p(1, 5)).epsilon(1e-9));
  // Comparison with the base ordering at n1 = n2 = 8; no inequality is claimed pointwise.
  const Table base = uncond_pvalue_table(h, order_diff(8, 8));
  const Table emp = uncond_pvalue_table(h, order_diff(8, 8), em);
  int smaller = 0, larger = 0;
  for (int i = 0; i < base.size(); ++i) {
    if (emp.data()[i] < base.data()[i] - 1e-12) ++smaller;
    if (emp.data()[i] > base.data()[i] + 1e-12) ++larger;
  }
  MESSAGE("E+M vs difference ordering, n1 = n2 = 8: smaller at ", smaller, ", larger at ", larger, " of 81 points");
  CHECK(emp.sum() <= base.sum() + 1e-9);
}

TEST_CASE("Berger-Boos") {
  UnconditionalOptions bb;
  bb.berger_boos_gamma = 1e-3;
  for (int n1 : {3, 7})
    for (int n2 : {4, 6}) {
      const auto o = order_estimate(n1, n2, EffectMeasure::ratio);
      const auto h = eq(Alternative::greater, EffectMeasure::ratio);
      const Table p = uncond_pvalue_table(h, o, bb);
      for (int i = 0; i < p.size(); ++i) CHECK(p.data()[i] >= 1e-3);
      CHECK(size_of(p, n1, n2, 0.05, {EffectMeasure::ratio, 1.0}) <= 0.05 + 1e-9);
      CHECK(uncond_pvalue({1, n1, 3, n2}, h, o, bb) == doctest::Approx(p(1, 3)).epsilon(1e-9));
    }
  const NullBoundary nb{EffectMeasure::difference, 0.0};
  const auto r = berger_boos_range({5, 10, 5, 10}, nb, 0.05);
  CHECK(r.lower < 0.5);
  CHECK(r.upper > 0.5);
}

TEST_CASE("unconditional methods are valid, n1, n2 <= 6") {
  for (int n1 = 1; n1 <= 6; ++n1)
    for (int n2 = 1; n2 <= 6; ++n2)
      for (double alpha : {0.025, 0.05}) {
        const NullBoundary nb{EffectMeasure::difference, 0.0};
        for (const auto& o : {order_diff(n1, n2), order_diff_tiebreak(n1, n2), order_fisher_midp(n1, n2),
                              order_score(n1, n2, EffectMeasure::difference, 0.0)})
          for (auto a : {Alternative::less, Alternative::greater})
            CHECK(size_of(uncond_pvalue_table(eq(a), o), n1, n2, alpha, nb) <= alpha + 2e-4);
        CHECK(size_of(uncond_pvalue_table(eq(Alternative::two_sided_minlike),
                                          order_score_twosided(n1, n2, EffectMeasure::difference, 0.0)),
                      n1, n2, alpha, nb) <= alpha + 2e-4);
      }
}

TEST_CASE("confidence intervals by inversion") {
  const auto r = uncond_ci({5, 9, 7, 7}, EffectMeasure::difference, 0.95,
                           score_family(9, 7, EffectMeasure::difference, true));
  CHECK(r.ci.lower == doctest::Approx(0.005).epsilon(3e-3 / 0.005));
  CHECK(r.ci.upper == doctest::Approx(0.749).epsilon(3e-3 / 0.749));
  const auto z = uncond_ci({0, 6, 0, 6}, EffectMeasure::difference, 0.95, fixed_family(order_diff(6, 6)));
  CHECK(z.ci.contains(0.0));
  // The refined ordering gives nested intervals.
  const auto fam_d = fixed_family(order_diff(8, 8));
  const auto fam_t = fixed_family(order_diff_tiebreak(8, 8));
  for (int x1 = 0; x1 <= 8; ++x1)
    for (int x2 = 0; x2 <= 8; ++x2) {
      const TwoByTwoData d{x1, 8, x2, 8};
      const auto cd = uncond_ci(d, EffectMeasure::difference, 0.95, fam_d).ci;
      const auto ct = uncond_ci(d, EffectMeasure::difference, 0.95, fam_t).ci;
      CHECK(ct.lower >= cd.lower - 1e-5);
      CHECK(ct.upper <= cd.upper + 1e-5);
    }
}

TEST_CASE("budget guard") {
  UnconditionalOptions tiny;
  tiny.max_work = 10;
  CHECK_THROWS_AS(uncond_pvalue_table(eq(Alternative::less), order_diff(30, 30), tiny), ResourceError);
}
