#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "twobinom/conditional.hpp"
#include "twobinom/distributions.hpp"

#include <cmath>

using namespace twobinom;

namespace {

double round3(double v) { return std::round(v * 1000) / 1000; }

const TwoByTwoData kTable1{8, 14, 1, 7};

Hypothesis or_null(double psi, Alternative a) { return {EffectMeasure::oddsratio, psi, a}; }

}  // namespace

TEST_CASE("one-sided Fisher") {
  // 0.007 + 0.072 from the rounded pmf row; two roundings allow 1e-3.
  CHECK(std::fabs(fisher_onesided(kTable1, or_null(1, Alternative::less)) - 0.079) <= 1e-3);
  CHECK(round3(fisher_onesided(kTable1, or_null(1, Alternative::less))) == doctest::Approx(0.078));
  const double exact = nchg_pmf(0, {9, 14, 7, 1}) + nchg_pmf(1, {9, 14, 7, 1});
  CHECK(fisher_onesided(kTable1, or_null(1, Alternative::less)) == doctest::Approx(exact).epsilon(1e-13));
  // x2 at the top of its support.
  const TwoByTwoData top{2, 14, 7, 7};
  CHECK(fisher_onesided(top, or_null(1, Alternative::greater)) == doctest::Approx(nchg_pmf(7, {9, 14, 7, 1})));
  for (auto a : {Alternative::less, Alternative::greater}) {
    const double full = fisher_onesided(kTable1, or_null(1, a));
    const double mid = fisher_onesided(kTable1, or_null(1, a), TailMode::mid);
    CHECK(full - mid == doctest::Approx(0.5 * nchg_pmf(1, {9, 14, 7, 1})).epsilon(1e-12));
  }
  // Equality nulls of every measure reduce to the same test.
  for (auto m : {EffectMeasure::difference, EffectMeasure::ratio})
    CHECK(fisher_onesided(kTable1, {m, equality_value(m), Alternative::less}) ==
          fisher_onesided(kTable1, or_null(1, Alternative::less)));
  CHECK_THROWS_AS(fisher_onesided(kTable1, {EffectMeasure::difference, 0.1, Alternative::less}), UnsupportedError);
  CHECK_THROWS_AS(fisher_onesided(kTable1, {EffectMeasure::ratio, 2.0, Alternative::greater}), UnsupportedError);
}

TEST_CASE("two-sided conditional p-values on the 8/14 vs 1/7 table") {
  CHECK(fisher_central(kTable1, 1.0) == doctest::Approx(0.157).epsilon(0.0005 / 0.157));
  CHECK(fisher_irwin(kTable1, 1.0) == doctest::Approx(0.159).epsilon(0.0005 / 0.159));
  CHECK(blaker(kTable1, 1.0) == doctest::Approx(0.087).epsilon(0.0005 / 0.087));
  auto f = [](int x) { return nchg_pmf(x, {9, 14, 7, 1}); };
  CHECK(blaker(kTable1, 1.0) == doctest::Approx(f(0) + f(1) + f(6) + f(7)).epsilon(1e-12));
  CHECK(fisher_irwin(kTable1, 1.0) == doctest::Approx(f(0) + f(1) + f(5) + f(6) + f(7)).epsilon(1e-12));
  CHECK(fisher_central(kTable1, 1.0) == doctest::Approx(2 * (f(0) + f(1))).epsilon(1e-12));
}

TEST_CASE("pmf, gamma and Blaker statistic rows for 8/14 vs 1/7") {
  const double f[] = {0.007, 0.072, 0.245, 0.358, 0.238, 0.072, 0.009, 0.000};
  const double g[] = {0.007, 0.078, 0.324, 0.676, 0.319, 0.080, 0.009, 0.000};
  const double tb[] = {0.007, 0.087, 0.642, 1.000, 0.397, 0.159, 0.016, 0.000};
  const auto st = blaker_statistics(9, 14, 7, 1.0);
  REQUIRE(st.lo == 0);
  REQUIRE(st.pmf.size() == 8);
  for (size_t i = 0; i < 8; ++i) {
    CHECK(round3(st.pmf[i]) == doctest::Approx(f[i]));
    CHECK(round3(st.gamma_values[i]) == doctest::Approx(g[i]));
    CHECK(round3(st.tb_values[i]) == doctest::Approx(tb[i]));
  }
}

TEST_CASE("Fisher-Irwin p is not unimodal in the odds ratio") {
  // Groups listed so that beta is the odds ratio of 7/262 relative to 30/494.
  const TwoByTwoData d{30, 494, 7, 262};
  const double p1 = fisher_irwin(d, 1.0), p099 = fisher_irwin(d, 0.99), p101 = fisher_irwin(d, 1.01);
  CHECK(p1 == doctest::Approx(0.04996).epsilon(5e-5 / 0.05));
  CHECK(p099 == doctest::Approx(0.05005).epsilon(5e-5 / 0.05));
  CHECK(p101 == doctest::Approx(0.05006).epsilon(5e-5 / 0.05));
  CHECK(p1 < p099);
  CHECK(p1 < p101);
  // Most probable point.
  const NoncentralHypergeom h({9, 14, 7, 1.0});
  int mode = h.lo();
  for (int x = h.lo(); x <= h.hi(); ++x)
    if (h.pmf(x) > h.pmf(mode)) mode = x;
  CHECK(fisher_irwin({9 - mode, 14, mode, 7}, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("central conditional odds-ratio interval") {
  const auto ci = conditional_ci_oddsratio(kTable1, 0.95);
  CHECK(ci.lower == doctest::Approx(0.002).epsilon(0.0005 / 0.002));
  CHECK(ci.upper == doctest::Approx(1.62).epsilon(0.005 / 1.62));
  CHECK(ci.central);
  // Limits are the roots of the tails.
  CHECK(fisher_onesided(kTable1, or_null(ci.lower, Alternative::greater)) == doctest::Approx(0.025).epsilon(1e-6));
  CHECK(fisher_onesided(kTable1, or_null(ci.upper, Alternative::less)) == doctest::Approx(0.025).epsilon(1e-6));
  const auto zero = conditional_ci_oddsratio({5, 8, 0, 8}, 0.95);
  CHECK(zero.lower == 0.0);
  CHECK(std::isfinite(zero.upper));
  const auto top = conditional_ci_oddsratio({0, 8, 5, 8}, 0.95);
  CHECK(std::isinf(top.upper));
}

TEST_CASE("conditional interval covers at every s, n1 = n2 = 8") {
  for (double lpsi = -3; lpsi <= 3.001; lpsi += 0.25) {
    const double psi = std::exp(lpsi);
    for (int s = 1; s < 16; ++s) {
      const NoncentralHypergeom h({s, 8, 8, psi});
      double cover = 0;
      for (int x2 = h.lo(); x2 <= h.hi(); ++x2) {
        const auto ci = conditional_ci_oddsratio({s - x2, 8, x2, 8}, 0.95);
        if (ci.lower <= psi && psi <= ci.upper) cover += h.pmf(x2);
      }
      CHECK(cover >= 0.95 - 1e-9);
    }
  }
}

TEST_CASE("Santner bound") {
  CHECK(santner_diff_bound(1.0) == 0.0);
  CHECK(santner_diff_bound(0.5) == 0.0);
  CHECK(santner_diff_bound(2.664) == doctest::Approx(0.240).epsilon(0.001 / 0.24));
  CHECK(santner_diff_bound(2.664) == doctest::Approx((std::sqrt(2.664) - 1) / (std::sqrt(2.664) + 1)));
  CHECK(santner_diff_lower(0.0) == -1.0);
  CHECK(santner_diff_lower(1.0 / 2.664) == doctest::Approx(-santner_diff_bound(2.664)));
}

TEST_CASE("upper odds-ratio limit and difference bound for 4/12 vs 8/15") {
  // Groups listed so that beta is the odds ratio of 4/12 relative to 8/15.
  const TwoByTwoData d{8, 15, 4, 12};
  const auto ci = conditional_ci_oddsratio(d, 0.95);
  CHECK(ci.upper == doctest::Approx(2.664).epsilon(0.005 / 2.664));
  CHECK(santner_diff_ci(d, 0.95).upper == doctest::Approx(0.240).epsilon(0.001 / 0.24));
}

TEST_CASE("Blaker is never above central Fisher; mid below full") {
  for (int n1 = 1; n1 <= 9; ++n1)
    for (int n2 = 1; n2 <= 9; ++n2)
      for (int x1 = 0; x1 <= n1; ++x1)
        for (int x2 = 0; x2 <= n2; ++x2) {
          const TwoByTwoData d{x1, n1, x2, n2};
          for (double psi : {0.3, 1.0, 2.5}) {
            CHECK(blaker(d, psi) <= fisher_central(d, psi) + 1e-12);
            const double pmf = nchg_pmf(x2, {x1 + x2, n1, n2, psi});
            if (pmf > 0) {
              for (auto a : {Alternative::less, Alternative::greater})
                CHECK(fisher_onesided(d, or_null(psi, a), TailMode::mid) < fisher_onesided(d, or_null(psi, a)));
            }
          }
        }
}

TEST_CASE("conditional tests are valid at the equality null") {
  for (int n1 = 1; n1 <= 10; ++n1)
    for (int n2 = 1; n2 <= 10; ++n2) {
      std::vector<std::vector<double>> p(5, std::vector<double>((n1 + 1) * (n2 + 1)));
      for (int x1 = 0; x1 <= n1; ++x1)
        for (int x2 = 0; x2 <= n2; ++x2) {
          const TwoByTwoData d{x1, n1, x2, n2};
          const int i = x1 * (n2 + 1) + x2;
          p[0][i] = fisher_onesided(d, or_null(1, Alternative::less));
          p[1][i] = fisher_onesided(d, or_null(1, Alternative::greater));
          p[2][i] = fisher_central(d, 1);
          p[3][i] = fisher_irwin(d, 1);
          p[4][i] = blaker(d, 1);
        }
      for (int k = 0; k <= 20; ++k) {
        const double th = k / 20.0;
        const auto b1 = binom_pmf_vector(n1, th), b2 = binom_pmf_vector(n2, th);
        for (double alpha : {0.01, 0.025, 0.05})
          for (const auto& pv : p) {
            double rej = 0;
            for (int x1 = 0; x1 <= n1; ++x1)
              for (int x2 = 0; x2 <= n2; ++x2)
                if (pv[x1 * (n2 + 1) + x2] <= alpha) rej += b1(x1) * b2(x2);
            CHECK(rej <= alpha + 1e-12);
          }
      }
    }
}
