#pragma once

#include "twobinom/types.hpp"

#include <algorithm>

namespace twobinom {

/// The null boundary {theta : b(theta) = beta0}, parameterized by theta1.
struct NullBoundary {
  EffectMeasure measure = EffectMeasure::difference;
  double beta0 = 0.0;

  double theta1_lo() const {
    return measure == EffectMeasure::difference ? std::max(0.0, -beta0) : 0.0;
  }
  double theta1_hi() const {
    switch (measure) {
      case EffectMeasure::difference: return std::min(1.0, 1.0 - beta0);
      case EffectMeasure::ratio: return std::min(1.0, 1.0 / beta0);
      case EffectMeasure::oddsratio: return 1.0;
    }
    return 1.0;
  }
  double theta2(double theta1) const {
    double t2 = 0.0;
    switch (measure) {
      case EffectMeasure::difference: t2 = theta1 + beta0; break;
      case EffectMeasure::ratio: t2 = beta0 * theta1; break;
      case EffectMeasure::oddsratio: t2 = beta0 * theta1 / (1.0 + theta1 * (beta0 - 1.0)); break;
    }
    return std::clamp(t2, 0.0, 1.0);
  }
};

}  // namespace twobinom
