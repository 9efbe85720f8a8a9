#pragma once

// Exact probability kernels: binomial, Fisher's noncentral hypergeometric, beta.

#include "twobinom/types.hpp"

#include <Eigen/Dense>

namespace twobinom {

struct BinomialParams {
  int n = 0;
  double theta = 0.0;
};

struct NoncentralHypergeomParams {
  int s = 0;  // total successes x1 + x2
  int n1 = 1;
  int n2 = 1;
  double psi = 1.0;  // odds ratio; 0 and +inf are allowed as point-mass limits
};

/// Beta(a, b). a == 0 is a point mass at 0, b == 0 a point mass at 1.
struct BetaParams {
  double a = 1.0;
  double b = 1.0;
};

enum class Tail { lower, upper };
enum class TailMode { full, mid };

double log_choose(int n, int k);

double binom_pmf(int k, BinomialParams params);
/// pmf for k = 0..n at once.
Eigen::VectorXd binom_pmf_vector(int n, double theta);
/// Writes the n + 1 probabilities into out, which must already have that size.
void binom_pmf_fill(int n, double theta, Eigen::Ref<Eigen::VectorXd> out);

double central_hypergeom_pmf(int x2, int s, int n1, int n2);

/// Conditional distribution of X2 given X1 + X2 = s, tabulated once over its support.
class NoncentralHypergeom {
 public:
  explicit NoncentralHypergeom(NoncentralHypergeomParams params);

  int lo() const { return lo_; }
  int hi() const { return hi_; }
  bool in_support(int x2) const { return x2 >= lo_ && x2 <= hi_; }
  const NoncentralHypergeomParams& params() const { return params_; }

  double pmf(int x2) const;
  /// Tail probability. Upper: P[X2 >= x2] (full) or P[X2 > x2] + P[X2 = x2]/2 (mid).
  double tail(int x2, Tail side, TailMode mode = TailMode::full) const;
  /// pmf over lo..hi.
  const Eigen::VectorXd& pmf_vector() const { return pmf_; }
  double mean() const;

 private:
  NoncentralHypergeomParams params_;
  int lo_ = 0;
  int hi_ = 0;
  Eigen::VectorXd pmf_;
  Eigen::VectorXd lower_cum_;  // P[X2 <= lo + i]
  Eigen::VectorXd upper_cum_;  // P[X2 >= lo + i]
};

double nchg_pmf(int x2, const NoncentralHypergeomParams& params);
double nchg_tail(int x2, const NoncentralHypergeomParams& params, Tail side, TailMode mode);

/// Regularized incomplete beta I_x(a, b) for a, b > 0.
double incomplete_beta(double x, double a, double b);

double beta_pdf(double x, BetaParams params);
double beta_cdf(double x, BetaParams params);
double beta_quantile(double p, BetaParams params);

}  // namespace twobinom
