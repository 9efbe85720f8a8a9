#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "twobinom/orderings.hpp"

#include <cmath>
#include <functional>

using namespace twobinom;

namespace {

// Double switch: exchange groups and success/failure labels; [x1, x2] on (n1, n2) goes to
// [n2 - x2, n1 - x1] on (n2, n1).
Point swap_both(Point p, int n1, int n2) { return {n2 - p.x2, n1 - p.x1}; }
// Label flip within the same sample space.
Point flip_labels(Point p, int n1, int n2) { return {n1 - p.x1, n2 - p.x2}; }

// sign(rank_a(p) - rank_a(q)) == dir * sign(rank_b(map p) - rank_b(map q)) for every masked-in pair.
bool rank_relation(const SampleSpaceOrdering& a, const SampleSpaceOrdering& b,
                   const std::function<Point(Point)>& map, int dir) {
  auto sgn = [](int v) { return (v > 0) - (v < 0); };
  for (int i = 0; i < (a.n1 + 1) * (a.n2 + 1); ++i)
    for (int j = 0; j < (a.n1 + 1) * (a.n2 + 1); ++j) {
      const Point p{i / (a.n2 + 1), i % (a.n2 + 1)}, q{j / (a.n2 + 1), j % (a.n2 + 1)};
      if (a.rank(p) < 0 || a.rank(q) < 0) continue;
      if (sgn(a.rank(p) - a.rank(q)) != dir * sgn(b.rank(map(p)) - b.rank(map(q)))) return false;
    }
  return true;
}

bool label_flip_reverses(const SampleSpaceOrdering& o) {
  return rank_relation(o, o, [&](Point p) { return flip_labels(p, o.n1, o.n2); }, -1);
}

bool double_switch_invariant(const SampleSpaceOrdering& a, const SampleSpaceOrdering& b) {
  return rank_relation(a, b, [&](Point p) { return swap_both(p, a.n1, a.n2); }, 1);
}

// Direct pairwise check of the convexity conditions: T nondecreasing in x2, nonincreasing in x1.
bool naive_bc(const SampleSpaceOrdering& o) {
  for (int x1 = 0; x1 <= o.n1; ++x1)
    for (int x2 = 0; x2 <= o.n2; ++x2) {
      if (!o.masked_in(x1, x2)) continue;
      if (x2 < o.n2 && o.masked_in(x1, x2 + 1) && o.rank(x1, x2 + 1) < o.rank(x1, x2)) return false;
      if (x1 < o.n1 && o.masked_in(x1 + 1, x2) && o.rank(x1 + 1, x2) > o.rank(x1, x2)) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("difference ordering") {
  const auto o = order_diff(8, 8);
  CHECK(o.rank(0, 5) == o.rank(1, 6));
  CHECK(o.rank(1, 6) == o.rank(2, 7));
  CHECK(o.rank(2, 7) == o.rank(3, 8));
  CHECK(o.t(0, 5) == doctest::Approx(5.0 / 8));
  int minimum = 0;
  for (int x1 = 0; x1 <= 8; ++x1)
    for (int x2 = 0; x2 <= 8; ++x2)
      if (o.rank(x1, x2) == 0) ++minimum;
  CHECK(minimum == 1);
  CHECK(o.rank(8, 0) == 0);
  CHECK(check_bc(order_diff(9, 7)).pass);
  CHECK(o.informative.all());
}

TEST_CASE("tie-break refinement separates the two symmetric pairs") {
  const auto o = order_diff_tiebreak(8, 8);
  CHECK(o.rank(0, 5) == o.rank(3, 8));
  CHECK(o.rank(1, 6) == o.rank(2, 7));
  CHECK(o.rank(0, 5) != o.rank(1, 6));
  CHECK(is_refinement(o, order_diff(8, 8)));
  CHECK_FALSE(is_refinement(order_diff(8, 8), o));
  CHECK(is_refinement(o, o));
  CHECK(check_bc(o).pass);
  CHECK(check_bc(order_diff_tiebreak(12, 5)).pass);
  // Ties at zero difference stay.
  CHECK(o.rank(0, 0) == o.rank(4, 4));
}

TEST_CASE("BC-certified orderings pass for all n1, n2 <= 12") {
  for (int n1 = 1; n1 <= 12; ++n1)
    for (int n2 = 1; n2 <= 12; ++n2) {
      for (const auto& o : {order_diff(n1, n2), order_diff_tiebreak(n1, n2), order_wald_pooled(n1, n2),
                            order_fisher_midp(n1, n2), order_score(n1, n2, EffectMeasure::difference, 0.0)}) {
        INFO(o.name, " ", n1, " ", n2);
        if (o.bc_certified) {
          CHECK(check_bc(o).pass);
          CHECK(naive_bc(o));
        }
      }
      CHECK(is_refinement(order_diff_tiebreak(n1, n2), order_diff(n1, n2)));
    }
}

TEST_CASE("check_bc reports a constructed counterexample") {
  auto o = order_diff(5, 5);
  Table t = o.t_values;
  t(0, 5) = -10.0;
  const auto bad = make_ordering(t, o.informative, "bad");
  const auto rep = check_bc(bad);
  CHECK_FALSE(rep.pass);
  REQUIRE(rep.violation);
  const auto [a, b] = *rep.violation;
  CHECK((a == Point{0, 5} || b == Point{0, 5}));
}

TEST_CASE("pooled Wald Z") {
  const auto o = order_wald_pooled(8, 8);
  CHECK(o.t(8, 8) == 0.0);
  CHECK(o.t(0, 0) == 0.0);
  CHECK(o.rank(0, 8) == o.num_ranks - 1);
  for (int x1 = 0; x1 <= 8; ++x1)
    for (int x2 = 0; x2 <= 8; ++x2) {
      const double d = x2 / 8.0 - x1 / 8.0;
      CHECK((o.t(x1, x2) > 0) == (d > 0));
      CHECK((o.t(x1, x2) < 0) == (d < 0));
    }
}

TEST_CASE("score ordering at the equality null ranks like pooled Z") {
  const auto s = order_score(9, 7, EffectMeasure::difference, 0.0);
  const auto z = order_wald_pooled(9, 7);
  for (int i = 0; i < 10 * 8; ++i)
    for (int j = 0; j < 10 * 8; ++j) {
      const int a1 = i / 8, a2 = i % 8, b1 = j / 8, b2 = j % 8;
      CHECK((s.rank(a1, a2) < s.rank(b1, b2)) == (z.rank(a1, a2) < z.rank(b1, b2)));
    }
  CHECK_THROWS_AS(order_score(5, 5, EffectMeasure::difference, 1.0), std::domain_error);
  CHECK_THROWS_AS(order_score(5, 5, EffectMeasure::ratio, -1.0), std::domain_error);
}

TEST_CASE("constrained MLE closed forms agree with direct maximisation") {
  for (int x1 = 0; x1 <= 6; ++x1)
    for (int x2 = 0; x2 <= 5; ++x2) {
      const TwoByTwoData d{x1, 6, x2, 5};
      for (auto [m, b0] : {std::pair{EffectMeasure::difference, 0.2}, {EffectMeasure::difference, -0.35},
                           {EffectMeasure::ratio, 0.6}, {EffectMeasure::ratio, 2.5}, {EffectMeasure::oddsratio, 3.0},
                           {EffectMeasure::oddsratio, 0.4}}) {
        const auto a = constrained_mle(d, m, b0);
        const auto b = constrained_mle_numeric(d, m, b0);
        CHECK(a.theta1 == doctest::Approx(b.theta1).epsilon(1e-6));
        if (a.theta1 > 1e-6 && a.theta1 < 1 - 1e-6 && a.theta2 > 1e-6 && a.theta2 < 1 - 1e-6)
          CHECK(effect(m, a.theta1, a.theta2) == doctest::Approx(b0).epsilon(1e-9));
      }
      const auto eq = constrained_mle(d, EffectMeasure::difference, 0.0);
      CHECK(std::fabs(eq.theta1 - (x1 + x2) / 11.0) < 1e-7);
    }
}

TEST_CASE("mid-p ordering") {
  const auto o = order_fisher_midp(10, 10);
  CHECK(o.bc_certified);
  CHECK(check_bc(o).pass);
  // Refines the x2-within-s conditional ordering on each diagonal.
  for (int s = 0; s <= 20; ++s)
    for (int x2 = std::max(0, s - 10); x2 < std::min(s, 10); ++x2) CHECK(o.rank(s - x2, x2) < o.rank(s - x2 - 1, x2 + 1));
}

TEST_CASE("estimate ordering masks") {
  CHECK(order_estimate(5, 4, EffectMeasure::difference).informative.all());
  const auto r = order_estimate(5, 4, EffectMeasure::ratio);
  CHECK_FALSE(r.masked_in(0, 0));
  CHECK(r.masked_in(5, 4));
  CHECK(std::isnan(r.t(0, 0)));
  CHECK(r.rank(0, 0) == -1);
  const auto o = order_estimate(5, 4, EffectMeasure::oddsratio);
  CHECK_FALSE(o.masked_in(0, 0));
  CHECK_FALSE(o.masked_in(5, 4));
  CHECK(o.masked_in(0, 4));
  CHECK((informative_mask(5, 4, EffectMeasure::oddsratio).count() == 30 - 2));
}

TEST_CASE("symmetry equivariance") {
  for (auto [n1, n2] : {std::pair{8, 8}, {6, 4}, {3, 7}}) {
    CHECK(label_flip_reverses(order_diff(n1, n2)));
    CHECK(label_flip_reverses(order_diff_tiebreak(n1, n2)));
    CHECK(label_flip_reverses(order_estimate(n1, n2, EffectMeasure::oddsratio)));
    CHECK(double_switch_invariant(order_diff(n1, n2), order_diff(n2, n1)));
    CHECK(double_switch_invariant(order_diff_tiebreak(n1, n2), order_diff_tiebreak(n2, n1)));
    CHECK(double_switch_invariant(order_estimate(n1, n2, EffectMeasure::oddsratio),
                                  order_estimate(n2, n1, EffectMeasure::oddsratio)));
  }
  // Two-sided CSM: a point and its label flip share a rank.
  const auto c = order_csm(6, 5, CsmVariant::two_sided);
  for (int x1 = 0; x1 <= 6; ++x1)
    for (int x2 = 0; x2 <= 5; ++x2) CHECK(c.rank(x1, x2) == c.rank(6 - x1, 5 - x2));
  CHECK(double_switch_invariant(c, order_csm(5, 6, CsmVariant::two_sided)));
}

TEST_CASE("ratio estimate ordering is not symmetry-equivariant") {
  // 10/63 vs 67/69: success ratio about 6.1, failure ratio after the double switch about 29.
  const TwoByTwoData d{10, 63, 67, 69};
  const double success = d.theta2_hat() / d.theta1_hat();
  const double failure = (1 - d.theta1_hat()) / (1 - d.theta2_hat());
  CHECK(success == doctest::Approx(6.12).epsilon(0.002));
  CHECK(failure == doctest::Approx(29.0).epsilon(0.002));
  CHECK_FALSE(double_switch_invariant(order_estimate(4, 4, EffectMeasure::ratio),
                                      order_estimate(4, 4, EffectMeasure::ratio)));
}

TEST_CASE("CSM construction") {
  CsmBuilder b(6, 5, CsmVariant::bottom_up);
  auto first = b.step();
  REQUIRE(first.size() == 1);
  CHECK(first[0] == Point{6, 0});
  auto q = b.frontier();
  CHECK(q.size() == 2);
  CHECK(std::find(q.begin(), q.end(), Point{6, 1}) != q.end());
  CHECK(std::find(q.begin(), q.end(), Point{5, 0}) != q.end());
  while (!b.done()) {
    b.step();
    // Each prefix region is BC-convex.
    const Mask& r = b.region();
    for (int x1 = 0; x1 <= 6; ++x1)
      for (int x2 = 0; x2 <= 5; ++x2) {
        if (!r(x1, x2)) continue;
        if (x2 > 0) CHECK(r(x1, x2 - 1));
        if (x1 < 6) CHECK(r(x1 + 1, x2));
      }
  }
  const auto o = b.result();
  CHECK(check_bc(o).pass);
  CHECK(o.rank(6, 0) == 0);
}

TEST_CASE("CSM variants and budget") {
  const auto cmp = compare_csm_orderings(5, 5);
  if (!cmp.equivalent) CHECK(!cmp.discordant.empty());
  const auto two = order_csm(8, 8, CsmVariant::two_sided);
  CHECK(two.two_sided);
  CHECK(two.rank(8, 0) == two.rank(0, 8));
  CsmOptions small;
  small.max_points = 20;
  CHECK_THROWS_AS(order_csm(8, 8, CsmVariant::bottom_up, small), ResourceError);
}

TEST_CASE("ordering CSV export") {
  const auto csv = ordering_to_csv(order_estimate(2, 1, EffectMeasure::ratio));
  CHECK(csv.rfind("x1\\x2,0,1\n", 0) == 0);
  CHECK(csv.find("0,NA,") != std::string::npos);
}
