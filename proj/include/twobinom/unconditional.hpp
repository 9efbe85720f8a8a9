#pragma once

// Exact unconditional p-values: supremum over the nuisance parameter of tail probabilities
// defined by a sample-space ordering, with Berger-Boos and E+M adjustments.

#include "twobinom/boundary.hpp"
#include "twobinom/conditional.hpp"
#include "twobinom/numeric.hpp"
#include "twobinom/orderings.hpp"
#include "twobinom/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace twobinom {

struct UnconditionalOptions {
  /// Berger-Boos: sup over a 100(1 - gamma)% nuisance confidence set, plus gamma.
  std::optional<double> berger_boos_gamma;
  /// 1 applies one round of E+M.
  int em_iterations = 0;
  int grid_points = 1001;
  bool refine = true;
  int refine_maxima = 3;
  double refine_tol = 1e-6;
  /// Take the sup over the whole null region even for BC orderings.
  bool force_full_region = false;
  /// Per-axis resolution of the 2-D null-region search.
  int region_grid_points = 201;
  /// Upper bound on sample points times grid evaluations for one request.
  double max_work = 5e10;

  SupOptions sup() const { return {grid_points, refine, refine_maxima, refine_tol}; }
};

/// One-sided p: `less` is sup P[T(X) <= T(x)] over b(theta) >= beta0, `greater` is
/// sup P[T(X) >= T(x)] over b(theta) <= beta0. Points outside the informative set of the
/// ordering or of the measure get p = 1 and never enter a tail.
double uncond_pvalue_onesided(const TwoByTwoData& data, const Hypothesis& hyp, const SampleSpaceOrdering& ordering,
                              const UnconditionalOptions& opts = {});
/// sup over the boundary of P[T(X) <= T(x)] for a two-sided ordering.
double uncond_pvalue_twosided(const TwoByTwoData& data, const Hypothesis& hyp, const SampleSpaceOrdering& ordering,
                              const UnconditionalOptions& opts = {});
/// Dispatches on hyp.alternative; two_sided_central gives min(1, 2 p_less, 2 p_greater).
double uncond_pvalue(const TwoByTwoData& data, const Hypothesis& hyp, const SampleSpaceOrdering& ordering,
                     const UnconditionalOptions& opts = {});

/// p-values for every sample point at once (rows x1, columns x2).
Table uncond_pvalue_table(const Hypothesis& hyp, const SampleSpaceOrdering& ordering,
                          const UnconditionalOptions& opts = {});

/// E+M ordering: the plug-in p at the boundary-constrained MLE, oriented like the input.
SampleSpaceOrdering em_ordering(const Hypothesis& hyp, const SampleSpaceOrdering& ordering);
double em_adjust(const TwoByTwoData& data, const Hypothesis& hyp, const SampleSpaceOrdering& ordering,
                 const UnconditionalOptions& opts = {});

/// Berger-Boos nuisance set: the boundary points inside the product of the two Clopper-Pearson
/// intervals at level sqrt(1 - gamma), as a theta1 range; empty when lower > upper.
Interval berger_boos_range(const TwoByTwoData& data, const NullBoundary& boundary, double gamma);

enum class BoschlooVariant { irwin, central, onesided };
/// Fisher p at odds ratio psi0 used as the ordering statistic.
SampleSpaceOrdering fisher_ordering(int n1, int n2, double psi0, BoschlooVariant variant, Alternative alternative,
                                    TailMode mode = TailMode::full);
/// Unconditional test ordered by a conditional Fisher p-value.
double boschloo(const TwoByTwoData& data, const Hypothesis& hyp, BoschlooVariant variant,
                TailMode mode = TailMode::full, const UnconditionalOptions& opts = {});

/// Ordering as a function of the null value; `beta0_free` orderings ignore the argument.
struct OrderingFamily {
  std::function<SampleSpaceOrdering(double beta0)> make;
  bool beta0_free = true;
  bool two_sided = false;
  std::string name;
};
OrderingFamily fixed_family(SampleSpaceOrdering ordering);
OrderingFamily score_family(int n1, int n2, EffectMeasure measure, bool two_sided);

struct UncondCiResult {
  ConfidenceInterval ci;
  std::vector<Interval> region;
  /// False when the p-value function was found non-monotone on the grid.
  bool coherent = true;
  int evaluations = 0;
};

struct CiGridOptions {
  int points = 2001;
  double tol = 1e-6;
};

/// Limits by root finding for beta0-free one-sided orderings; otherwise the region
/// {beta0 : p > 1 - level} on a grid and its smallest covering interval.
UncondCiResult uncond_ci(const TwoByTwoData& data, EffectMeasure measure, double level, const OrderingFamily& family,
                         const UnconditionalOptions& opts = {}, const CiGridOptions& grid = {});

/// Default beta0 grid for a measure: linear on (-1, 1), log-spaced on (1e-4, 1e4).
std::vector<double> beta_grid(EffectMeasure measure, int points);

}  // namespace twobinom
