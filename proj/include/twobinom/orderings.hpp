#pragma once

// Ordering functions T over the (n1+1) x (n2+1) sample space. Larger T is evidence that
// theta2 > theta1 for one-sided orderings; for two-sided orderings smaller T is more extreme.

#include "twobinom/numeric.hpp"
#include "twobinom/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace twobinom {

struct Point {
  int x1 = 0;
  int x2 = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Relative tolerance under which two ordering values are considered tied.
inline constexpr double kTieTolerance = 1e-10;
bool tied(double a, double b, double rel_tol = kTieTolerance);

struct SampleSpaceOrdering {
  int n1 = 1;
  int n2 = 1;
  /// Ordering value; NaN on masked-out points. Orderings built from several keys store the
  /// dense rank here.
  Table t_values;
  /// Points of the informative set; masked-out points never enter a tail.
  Mask informative;
  /// Dense ranks, 0 = smallest T; exact ties share a rank; -1 on masked-out points.
  RankTable rank_ids;
  int num_ranks = 0;
  bool bc_certified = false;
  bool two_sided = false;
  std::string name;

  int rank(int x1, int x2) const { return rank_ids(x1, x2); }
  int rank(Point p) const { return rank_ids(p.x1, p.x2); }
  bool masked_in(int x1, int x2) const { return informative(x1, x2); }
  double t(int x1, int x2) const { return t_values(x1, x2); }
};

/// Builds an ordering from a value table; ranks come from tie-tolerant sorting.
SampleSpaceOrdering make_ordering(const Table& t, const Mask& informative, std::string name, bool two_sided = false);
/// Lexicographic ordering: keys[0] first, later keys only break ties of the earlier ones.
SampleSpaceOrdering make_lexicographic_ordering(const std::vector<Table>& keys, const Mask& informative,
                                                std::string name, bool two_sided = false);

Mask full_mask(int n1, int n2);
/// Informative set: ratio excludes [0,0]; odds ratio also excludes [n1,n2]; difference excludes nothing.
Mask informative_mask(int n1, int n2, EffectMeasure measure);
SampleSpaceOrdering with_mask(const SampleSpaceOrdering& ord, const Mask& informative);
/// Negated values, reversed ranks.
SampleSpaceOrdering negated(const SampleSpaceOrdering& ord);

// Orderings.

SampleSpaceOrdering order_diff(int n1, int n2);
SampleSpaceOrdering order_diff_tiebreak(int n1, int n2);
SampleSpaceOrdering order_wald_pooled(int n1, int n2);
SampleSpaceOrdering order_score(int n1, int n2, EffectMeasure measure, double beta0);
/// Two-sided score ordering: T = -Z^2, smaller is more extreme.
SampleSpaceOrdering order_score_twosided(int n1, int n2, EffectMeasure measure, double beta0);
SampleSpaceOrdering order_wald_pooled_twosided(int n1, int n2);
/// Conditional one-sided mid-p at psi = 1, oriented so larger T favours theta2 > theta1.
SampleSpaceOrdering order_fisher_midp(int n1, int n2);
SampleSpaceOrdering order_estimate(int n1, int n2, EffectMeasure measure);

enum class CsmVariant { bottom_up, top_down, two_sided };

struct CsmOptions {
  SupOptions sup{};
  /// Upper bound on (n1+1)(n2+1).
  long max_points = 961;
  double tie_tol = 1e-9;
};

/// Incremental construction state: region R_j, BC-preserving frontier Q_{j+1}, ranks so far.
class CsmBuilder {
 public:
  CsmBuilder(int n1, int n2, CsmVariant variant, CsmOptions opts = {});

  bool done() const { return assigned_ == total_; }
  /// Points whose individual addition keeps the region BC-convex.
  std::vector<Point> frontier() const;
  /// Admits the frontier point(s) with the smallest candidate p-value; returns them.
  std::vector<Point> step();
  const Mask& region() const { return region_; }
  const RankTable& assigned_rank() const { return rank_; }
  int steps() const { return step_; }
  SampleSpaceOrdering result() const;

 private:
  bool addable(int x1, int x2) const;
  Point sym(Point p) const { return {n1_ - p.x1, n2_ - p.x2}; }
  void admit(Point p, int rank, bool grow);
  void absorb_free_points();
  double region_prob(double theta, const std::vector<Point>& extra) const;

  int n1_, n2_;
  CsmVariant variant_;
  CsmOptions opts_;
  std::vector<double> grid_;
  Eigen::MatrixXd b1_, b2_;  // grid x (n+1) binomial pmfs
  Eigen::VectorXd region_prob_grid_;
  Mask region_;   // R_total: every point with a rank
  Mask grown_;    // points added through the BC-growth side
  RankTable rank_;
  int assigned_ = 0;
  int total_ = 0;
  int step_ = 0;
};

SampleSpaceOrdering order_csm(int n1, int n2, CsmVariant variant, const CsmOptions& opts = {});

struct CsmComparison {
  bool equivalent = false;
  /// Pairs ordered strictly one way by bottom-up and strictly the other way by top-down.
  std::vector<std::pair<Point, Point>> discordant;
};
/// Compares bottom-up and top-down CSM orderings without assuming they agree.
CsmComparison compare_csm_orderings(int n1, int n2, const CsmOptions& opts = {});

struct BcReport {
  bool pass = true;
  /// Violating pair (a, b): b should be ranked at least as high as a but is not.
  std::optional<std::pair<Point, Point>> violation;
};
BcReport check_bc(const SampleSpaceOrdering& ord);

/// True iff `fine` preserves every strict inequality of `coarse`.
bool is_refinement(const SampleSpaceOrdering& fine, const SampleSpaceOrdering& coarse);

/// CSV grid: header row of x2 values, first column x1, cells T or NA when masked out.
std::string ordering_to_csv(const SampleSpaceOrdering& ord);

// Score statistics.

/// Nuisance estimate on the boundary b(theta) = beta0 maximising the likelihood.
struct ConstrainedMle {
  double theta1 = 0.0;
  double theta2 = 0.0;
};
/// Closed forms: Farrington-Manning cubic (difference), quadratic (ratio), and the
/// logistic-model quadratic n1*t1 + n2*t2 = s (odds ratio).
ConstrainedMle constrained_mle(const TwoByTwoData& data, EffectMeasure measure, double beta0);
/// Same estimate by direct 1-D maximisation of the boundary log-likelihood.
ConstrainedMle constrained_mle_numeric(const TwoByTwoData& data, EffectMeasure measure, double beta0);
double score_statistic(const TwoByTwoData& data, EffectMeasure measure, double beta0);
double pooled_z(const TwoByTwoData& data);

}  // namespace twobinom
