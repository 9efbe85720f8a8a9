#pragma once

// Inference conditional on S = x1 + x2, where X2 | S follows Fisher's noncentral
// hypergeometric distribution with odds ratio psi.

#include "twobinom/distributions.hpp"
#include "twobinom/types.hpp"

#include <vector>

namespace twobinom {

/// Relative tolerance for pmf and gamma comparisons in Fisher-Irwin and Blaker tests.
inline constexpr double kPmfTolerance = 1e-7;

/// One-sided conditional p. `greater` uses the upper tail in x2, `less` the lower tail.
/// Requires measure == oddsratio, or beta0 at the equality value for any measure.
double fisher_onesided(const TwoByTwoData& data, const Hypothesis& hyp, TailMode mode = TailMode::full);
/// min(1, 2 * lower, 2 * upper) at odds ratio psi0.
double fisher_central(const TwoByTwoData& data, double psi0, TailMode mode = TailMode::full);
/// Sum of pmf over support points no more probable than the observed one.
double fisher_irwin(const TwoByTwoData& data, double psi0, TailMode mode = TailMode::full);
double blaker(const TwoByTwoData& data, double psi0, TailMode mode = TailMode::full);

struct BlakerStatistics {
  int lo = 0;
  /// Indexed by x2 - lo.
  std::vector<double> pmf;
  std::vector<double> gamma_values;
  std::vector<double> tb_values;
};
BlakerStatistics blaker_statistics(int s, int n1, int n2, double psi0, TailMode mode = TailMode::full);

/// Central exact conditional interval for the odds ratio.
ConfidenceInterval conditional_ci_oddsratio(const TwoByTwoData& data, double level, TailMode mode = TailMode::full);

/// Upper bound on the difference implied by an upper odds-ratio limit.
double santner_diff_bound(double u_or);
/// Lower bound on the difference implied by a lower odds-ratio limit.
double santner_diff_lower(double l_or);

/// Conditional interval on the odds ratio converted to the difference scale.
ConfidenceInterval santner_diff_ci(const TwoByTwoData& data, double level, TailMode mode = TailMode::full);

}  // namespace twobinom
