#pragma once

// Independent brute-force oracles shared by the tests and the acceptance suite.

#include "twobinom/distributions.hpp"
#include "twobinom/orderings.hpp"
#include "twobinom/types.hpp"

#include <algorithm>

namespace twobinom::oracle {

// Naive oracle: for each grid theta sum the pmf of every point at least as extreme, by direct
// comparison of T values; maximise over a fine uniform grid on the boundary. All points at once.
inline Table naive_pvalues(int n1, int n2, const Hypothesis& h, const SampleSpaceOrdering& o, int grid) {
  const Mask m = informative_mask(n1, n2, h.measure);
  auto in_set = [&](int y1, int y2) { return o.masked_in(y1, y2) && m(y1, y2); };
  const NullBoundary nb{h.measure, h.beta0};
  const bool upper = h.alternative == Alternative::greater;
  Table best = Table::Zero(n1 + 1, n2 + 1);
  for (int g = 0; g < grid; ++g) {
    const double t1 = nb.theta1_lo() + (nb.theta1_hi() - nb.theta1_lo()) * g / (grid - 1);
    Table w(n1 + 1, n2 + 1);
    for (int y1 = 0; y1 <= n1; ++y1)
      for (int y2 = 0; y2 <= n2; ++y2) w(y1, y2) = binom_pmf(y1, {n1, t1}) * binom_pmf(y2, {n2, nb.theta2(t1)});
    for (int x1 = 0; x1 <= n1; ++x1)
      for (int x2 = 0; x2 <= n2; ++x2) {
        if (!in_set(x1, x2)) continue;
        const double t = o.t(x1, x2);
        double s = 0;
        for (int y1 = 0; y1 <= n1; ++y1)
          for (int y2 = 0; y2 <= n2; ++y2) {
            if (!in_set(y1, y2)) continue;
            const double ty = o.t(y1, y2);
            if (tied(ty, t) || (upper ? ty > t : ty < t)) s += w(y1, y2);
          }
        best(x1, x2) = std::max(best(x1, x2), s);
      }
  }
  for (int x1 = 0; x1 <= n1; ++x1)
    for (int x2 = 0; x2 <= n2; ++x2) best(x1, x2) = in_set(x1, x2) ? std::min(1.0, best(x1, x2)) : 1.0;
  return best;
}

inline double size_of(const Table& p, int n1, int n2, double alpha, const NullBoundary& nb, int grid = 201) {
  double best = 0;
  for (int g = 0; g < grid; ++g) {
    const double t1 = nb.theta1_lo() + (nb.theta1_hi() - nb.theta1_lo()) * g / (grid - 1);
    const auto b1 = binom_pmf_vector(n1, t1), b2 = binom_pmf_vector(n2, nb.theta2(t1));
    double r = 0;
    for (int x1 = 0; x1 <= n1; ++x1)
      for (int x2 = 0; x2 <= n2; ++x2)
        if (p(x1, x2) <= alpha) r += b1(x1) * b2(x2);
    best = std::max(best, r);
  }
  return best;
}

}  // namespace twobinom::oracle
