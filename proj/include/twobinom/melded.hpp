#pragma once

// Melded confidence intervals: quantiles of b(W1, W2) for independent beta
// confidence-distribution random variables of the two groups.

#include "twobinom/distributions.hpp"
#include "twobinom/types.hpp"

namespace twobinom {

/// Lower CD W_La ~ Beta(x_a, n_a - x_a + 1) and upper CD W_Ua ~ Beta(x_a + 1, n_a - x_a),
/// with the point-mass conventions at x_a = 0 and x_a = n_a. Index 0 is group 1.
struct MeldingDistributions {
  BetaParams lower_cd[2];
  BetaParams upper_cd[2];

  static MeldingDistributions from(const TwoByTwoData& data);
};

/// P[b(W1, W2) <= c] by adaptive quadrature over W1.
double meld_cdf(const BetaParams& w1, const BetaParams& w2, EffectMeasure measure, double c);
/// inf {c : P[b(W1, W2) <= c] >= p}.
double meld_quantile(const BetaParams& w1, const BetaParams& w2, EffectMeasure measure, double p);

ConfidenceInterval meld_ci(const TwoByTwoData& data, EffectMeasure measure, double level);
/// less: P[b(W_L1, W_U2) >= beta0]; greater: P[b(W_U1, W_L2) <= beta0]; two_sided_central
/// doubles the smaller one.
double meld_pvalue(const TwoByTwoData& data, const Hypothesis& hyp);

}  // namespace twobinom
