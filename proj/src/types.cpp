#include "twobinom/types.hpp"

namespace twobinom {

std::string_view to_string(EffectMeasure m) {
  switch (m) {
    case EffectMeasure::difference: return "difference";
    case EffectMeasure::ratio: return "ratio";
    case EffectMeasure::oddsratio: return "oddsratio";
  }
  return "?";
}

std::string_view to_string(Alternative a) {
  switch (a) {
    case Alternative::less: return "less";
    case Alternative::greater: return "greater";
    case Alternative::two_sided_central: return "two.sided";
    case Alternative::two_sided_minlike: return "two.sided.minlike";
    case Alternative::two_sided_blaker: return "two.sided.blaker";
  }
  return "?";
}

EffectMeasure parse_measure(std::string_view s) {
  if (s == "difference" || s == "diff") return EffectMeasure::difference;
  if (s == "ratio") return EffectMeasure::ratio;
  if (s == "oddsratio" || s == "or") return EffectMeasure::oddsratio;
  throw std::invalid_argument("unknown measure '" + std::string(s) +
                              "' (expected difference, ratio, oddsratio)");
}

Alternative parse_alternative(std::string_view s) {
  if (s == "less") return Alternative::less;
  if (s == "greater") return Alternative::greater;
  if (s == "two.sided" || s == "central") return Alternative::two_sided_central;
  if (s == "two.sided.minlike" || s == "minlike") return Alternative::two_sided_minlike;
  if (s == "two.sided.blaker" || s == "blaker") return Alternative::two_sided_blaker;
  throw std::invalid_argument("unknown alternative '" + std::string(s) +
                              "' (expected less, greater, two.sided, two.sided.minlike, two.sided.blaker)");
}

}  // namespace twobinom
