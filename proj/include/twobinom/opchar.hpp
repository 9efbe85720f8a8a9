#pragma once

// Exact operating characteristics: power, size and expected interval length by enumeration of
// the sample space, and power sweeps over a (theta1, theta2) grid.

#include "twobinom/triples.hpp"

#include <memory>
#include <string>
#include <vector>

namespace twobinom {

/// Sample points where the method rejects at level alpha (p <= alpha).
struct RejectionSet {
  std::string method;
  Hypothesis hypothesis;
  double alpha = 0.05;
  int n1 = 0;
  int n2 = 0;
  Mask reject;
  Table pvalues;
};

/// Cached by (method, n1, n2, alpha, hypothesis).
std::shared_ptr<const RejectionSet> rejection_set(const MethodSpec& method, int n1, int n2, double alpha,
                                                  const Hypothesis& hyp);
void clear_rejection_cache();

double rejection_probability(const RejectionSet& rs, double theta1, double theta2);

/// Power against (theta1, theta2) of the test of hyp at level alpha.
double exact_power(const MethodSpec& method, int n1, int n2, double theta1, double theta2, double alpha,
                   const Hypothesis& hyp);

struct SizeResult {
  double size = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double grid_modulus = 0.0;
};

/// Largest rejection probability over the null boundary of hyp.
SizeResult exact_size(const MethodSpec& method, int n1, int n2, double alpha, const Hypothesis& hyp,
                      int boundary_points = 201);

struct ExceedanceCensus {
  int scenarios = 0;
  int within = 0;
  double fraction_within() const { return scenarios ? static_cast<double>(within) / scenarios : 1.0; }
};

/// Counts (n1, n2, theta) scenarios on the equality boundary whose rejection probability is at
/// most alpha; the summary used for mid-p methods, which are not valid.
ExceedanceCensus exceedance_census(const MethodSpec& method, const std::vector<int>& sample_sizes, double alpha,
                                   const Hypothesis& hyp, const std::vector<double>& thetas);

struct GridSpec {
  int points = 25;
  double lo = 0.02;
  double hi = 0.98;

  std::vector<double> values() const { return linspace(lo, hi, points); }
};

struct OperatingGrid {
  std::string quantity;
  std::string method;
  int n1 = 0;
  int n2 = 0;
  double alpha = 0.05;
  std::vector<double> theta1_grid;
  std::vector<double> theta2_grid;
  /// Rows theta1, columns theta2.
  Table values;
};

OperatingGrid power_grid(const MethodSpec& method, int n1, int n2, double alpha, const Hypothesis& hyp,
                         const GridSpec& grid = {});
/// power(a) - power(b) at each grid point.
OperatingGrid power_difference(const MethodSpec& a, const MethodSpec& b, int n1, int n2, double alpha,
                               const Hypothesis& hyp, const GridSpec& grid = {});

struct GridSummary {
  double max = 0.0;
  double min = 0.0;
  double band = 0.025;
  double fraction_within = 0.0;
  double fraction_above = 0.0;
  double fraction_below = 0.0;
};
GridSummary summarize(const OperatingGrid& grid, double band = 0.025);

/// Header row of theta2 values, first column theta1.
std::string grid_to_csv(const OperatingGrid& grid);

struct ExpectedLength {
  double length = 0.0;
  /// Some interval had an infinite end, replaced by `cap`.
  bool truncated = false;
  double truncated_probability = 0.0;
};

/// Intervals of every sample point, cached by (method, n1, n2, level).
std::shared_ptr<const std::vector<ConfidenceInterval>> ci_table(const MethodSpec& method, int n1, int n2,
                                                                double level);

ExpectedLength expected_ci_length(const MethodSpec& method, int n1, int n2, double theta1, double theta2, double level,
                                  double cap = 1e4);

}  // namespace twobinom
