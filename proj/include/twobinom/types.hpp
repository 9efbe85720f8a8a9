#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace twobinom {

/// Dense table over the sample space: rows index x1 = 0..n1, columns x2 = 0..n2.
using Table = Eigen::MatrixXd;
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
using RankTable = Eigen::MatrixXi;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Thrown when a computation would exceed its configured work budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown for method/measure/alternative combinations that have no defined procedure.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Observed 2x2 table: x1 successes of n1 in group 1, x2 of n2 in group 2.
struct TwoByTwoData {
  int x1 = 0;
  int n1 = 1;
  int x2 = 0;
  int n2 = 1;

  void validate() const {
    if (n1 < 1) throw std::invalid_argument("n1 must be >= 1 (got " + std::to_string(n1) + ")");
    if (n2 < 1) throw std::invalid_argument("n2 must be >= 1 (got " + std::to_string(n2) + ")");
    if (x1 < 0 || x1 > n1)
      throw std::invalid_argument("x1 must satisfy 0 <= x1 <= n1 (got x1=" + std::to_string(x1) +
                                  ", n1=" + std::to_string(n1) + ")");
    if (x2 < 0 || x2 > n2)
      throw std::invalid_argument("x2 must satisfy 0 <= x2 <= n2 (got x2=" + std::to_string(x2) +
                                  ", n2=" + std::to_string(n2) + ")");
  }

  int total() const { return x1 + x2; }
  double theta1_hat() const { return static_cast<double>(x1) / n1; }
  double theta2_hat() const { return static_cast<double>(x2) / n2; }

  friend bool operator==(const TwoByTwoData&, const TwoByTwoData&) = default;
};

enum class EffectMeasure { difference, ratio, oddsratio };

/// Direction of the alternative. `less` tests H0: beta >= beta0, `greater` tests H0: beta <= beta0.
enum class Alternative { less, greater, two_sided_central, two_sided_minlike, two_sided_blaker };

struct Hypothesis {
  EffectMeasure measure = EffectMeasure::difference;
  double beta0 = 0.0;
  Alternative alternative = Alternative::two_sided_central;
};

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  bool central = true;
  bool holes_filled = false;

  bool contains(double beta) const { return lower < beta && beta < upper; }
  bool contains(const ConfidenceInterval& other) const {
    return lower <= other.lower && other.upper <= upper;
  }
};

// Measure helpers.

/// Value of beta at theta1 == theta2.
inline double equality_value(EffectMeasure m) { return m == EffectMeasure::difference ? 0.0 : 1.0; }
inline double measure_min(EffectMeasure m) { return m == EffectMeasure::difference ? -1.0 : 0.0; }
inline double measure_max(EffectMeasure m) { return m == EffectMeasure::difference ? 1.0 : kInf; }
inline bool log_scale(EffectMeasure m) { return m != EffectMeasure::difference; }

/// b(theta) for the measure; edge cases follow the limits (x/0 = inf for positive x, 0/0 = NaN).
inline double effect(EffectMeasure m, double theta1, double theta2) {
  switch (m) {
    case EffectMeasure::difference:
      return theta2 - theta1;
    case EffectMeasure::ratio:
      if (theta1 == 0.0) return theta2 == 0.0 ? std::nan("") : kInf;
      return theta2 / theta1;
    case EffectMeasure::oddsratio: {
      const double num = theta2 * (1.0 - theta1);
      const double den = theta1 * (1.0 - theta2);
      if (den == 0.0) return num == 0.0 ? std::nan("") : kInf;
      return num / den;
    }
  }
  return std::nan("");
}

inline void validate_beta0(EffectMeasure m, double beta0) {
  if (m == EffectMeasure::difference) {
    if (!(beta0 > -1.0 && beta0 < 1.0))
      throw std::domain_error("difference null value must lie in (-1, 1)");
  } else if (!(beta0 > 0.0 && std::isfinite(beta0))) {
    throw std::domain_error("ratio/odds-ratio null value must lie in (0, inf)");
  }
}

std::string_view to_string(EffectMeasure m);
std::string_view to_string(Alternative a);
EffectMeasure parse_measure(std::string_view s);
Alternative parse_alternative(std::string_view s);

}  // namespace twobinom
