#pragma once

// Matched triples (estimate, confidence interval, p-value function) and the diagnostics that
// relate them: confidence regions, matching intervals, compatibility, nestedness, coherence.

#include "twobinom/conditional.hpp"
#include "twobinom/melded.hpp"
#include "twobinom/numeric.hpp"
#include "twobinom/unconditional.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace twobinom {

enum class MethodId {
  fisher_onesided,
  fisher_central,
  fisher_irwin,
  blaker,
  melded,
  uncond_score,
  uncond_diff_tb,
  uncond_diff,
  uncond_wald,
  uncond_estimate,
  uncond_midp,
  boschloo,
  csm,
};

struct MethodSpec {
  MethodId id = MethodId::fisher_central;
  EffectMeasure measure = EffectMeasure::difference;
  TailMode mode = TailMode::full;
  std::optional<double> berger_boos_gamma;
  bool em = false;
  /// Unconditional methods: two-sided p and interval from the two-sided ordering instead of
  /// the central combination of one-sided p-values.
  bool two_sided_ordering = false;
  UnconditionalOptions uncond{};
  CsmOptions csm{};
  CiGridOptions ci_grid{};

  std::string name() const;
  UnconditionalOptions uncond_options() const;
  /// Conditional methods handle any odds-ratio null but only the equality null otherwise.
  bool conditional() const;
  /// Methods whose two-sided p is not the doubled smaller one-sided p.
  bool minlike() const;
};

std::string_view to_string(MethodId id);
MethodId parse_method(std::string_view s);
/// Comma-separated list of method identifiers.
std::string method_catalog();

using PValueFunction = std::function<double(double beta0)>;

/// p-value of the method for one hypothesis; two_sided_central and two_sided_minlike map to
/// the method's natural two-sided p.
double method_pvalue(const MethodSpec& method, const TwoByTwoData& data, const Hypothesis& hyp);
PValueFunction pvalue_function(const MethodSpec& method, const TwoByTwoData& data, Alternative alternative);

/// Ordering behind an unconditional method's p-value; none for conditional and melded methods
/// and for two-sided alternatives answered by the central combination.
std::optional<SampleSpaceOrdering> method_ordering(const MethodSpec& method, int n1, int n2, double beta0,
                                                   Alternative alternative);
/// p-values of every sample point (rows x1, columns x2).
Table method_pvalue_table(const MethodSpec& method, int n1, int n2, const Hypothesis& hyp);

struct ConfidenceRegion {
  /// Disjoint, sorted open intervals.
  std::vector<Interval> intervals;
  double level = 0.95;
  double grid_resolution = 0.0;

  bool contains(double beta) const;
};

/// {beta0 : pfun(beta0) > 1 - level} scanned on beta_grid, each crossing bisected to tol.
ConfidenceRegion confidence_region(const PValueFunction& pfun, double level, const std::vector<double>& beta_grid,
                                   double lo_limit, double hi_limit, double tol = 1e-6);
ConfidenceInterval matching_ci(const ConfidenceRegion& region);

/// Confidence interval of a method, with the region when it was computed by inversion on a grid.
struct MethodInterval {
  ConfidenceInterval ci;
  std::optional<ConfidenceRegion> region;
  bool coherent = true;
};
MethodInterval method_ci(const MethodSpec& method, const TwoByTwoData& data, double level);
/// method_ci for every sample point (index x1 * (n2 + 1) + x2) at each level. Grid-inverted
/// methods share one p-value table per grid value.
std::vector<std::vector<MethodInterval>> method_ci_tables(const MethodSpec& method, int n1, int n2,
                                                         const std::vector<double>& levels);

struct InferenceResult {
  std::string method;
  TwoByTwoData data;
  Hypothesis hypothesis;
  double estimate = 0.0;
  /// Estimate undefined or outside the interval and clamped into it.
  bool estimate_clamped = false;
  ConfidenceInterval ci;
  std::optional<ConfidenceRegion> region;
  double p_less = 1.0;
  double p_greater = 1.0;
  double p_two_sided = 1.0;
  /// p for hypothesis.alternative.
  double p_value = 1.0;
};

InferenceResult infer(const MethodSpec& method, const TwoByTwoData& data, const Hypothesis& hyp, double level);

enum class Decision { fail_to_reject, conclude_greater, conclude_less };
std::string_view to_string(Decision d);

struct DecisionOutcome {
  Decision decision = Decision::fail_to_reject;
  double alpha = 0.05;
};
/// Directional conclusion when the matching one-sided p is at most alpha / 2.
DecisionOutcome three_decision(const InferenceResult& result, double alpha);

struct CompatibilityViolation {
  double alpha = 0.0;
  double beta0 = 0.0;
  double p = 0.0;
  bool rejects = false;
  bool in_ci = false;
};
struct CompatibilityReport {
  bool compatible = true;
  std::vector<CompatibilityViolation> violations;
};
/// Checks p <= alpha  <=>  beta0 outside the matching 1 - alpha interval. Grid points within
/// `edge_tol` (relative) of an interval end are skipped.
CompatibilityReport check_compatibility(const MethodSpec& method, const TwoByTwoData& data,
                                        const std::vector<double>& alphas, const std::vector<double>& beta_grid,
                                        double edge_tol = 1e-4);

struct NestednessViolation {
  double level_small = 0.0;
  double level_large = 0.0;
  ConfidenceInterval small;
  ConfidenceInterval large;
};
struct NestednessReport {
  bool nested = true;
  std::vector<NestednessViolation> violations;
};
using IntervalFunction = std::function<ConfidenceInterval(double level)>;
NestednessReport check_nestedness(const IntervalFunction& ci, const std::vector<double>& levels, double tol = 1e-9);
NestednessReport check_nestedness(const MethodSpec& method, const TwoByTwoData& data,
                                  const std::vector<double>& levels);

struct CoherenceViolation {
  double beta0_a = 0.0;
  double p_a = 0.0;
  double beta0_b = 0.0;
  double p_b = 0.0;
};
struct CoherenceReport {
  bool coherent = true;
  std::vector<CoherenceViolation> violations;
};
/// One-sided: p_less nonincreasing and p_greater nondecreasing in beta0. Two-sided: p
/// nondecreasing below `estimate` and nonincreasing above it.
CoherenceReport check_coherence(const PValueFunction& pfun, const std::vector<double>& beta0_grid,
                                Alternative alternative, double estimate = 0.0, double tol = 1e-12);

/// Sample estimate of the measure; NaN for 0/0.
double sample_estimate(const TwoByTwoData& data, EffectMeasure measure);

}  // namespace twobinom
