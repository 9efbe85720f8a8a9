#include "twobinom/conditional.hpp"

#include "twobinom/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace twobinom {

namespace {

NoncentralHypergeom conditional(const TwoByTwoData& data, double psi) {
  data.validate();
  if (!(psi >= 0.0)) throw std::domain_error("odds ratio must be nonnegative");
  return NoncentralHypergeom({data.total(), data.n1, data.n2, psi});
}

// Sum of weights over `keys` not above `ref`, with tied keys at half weight in mid mode.
double tolerant_tail(const Eigen::VectorXd& weights, const std::vector<double>& keys, double ref, TailMode mode) {
  double strict = 0.0;
  double tie = 0.0;
  const double cut_hi = ref * (1.0 + kPmfTolerance);
  const double cut_lo = ref * (1.0 - kPmfTolerance);
  for (size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] < cut_lo) strict += weights(i);
    else if (keys[i] <= cut_hi) tie += weights(i);
  }
  return std::min(1.0, mode == TailMode::full ? strict + tie : strict + 0.5 * tie);
}

}  // namespace

double fisher_onesided(const TwoByTwoData& data, const Hypothesis& hyp, TailMode mode) {
  if (hyp.alternative != Alternative::less && hyp.alternative != Alternative::greater)
    throw std::invalid_argument("one-sided Fisher test needs alternative less or greater");
  double psi = 1.0;
  if (hyp.measure == EffectMeasure::oddsratio) {
    validate_beta0(hyp.measure, hyp.beta0);
    psi = hyp.beta0;
  } else if (hyp.beta0 != equality_value(hyp.measure)) {
    throw UnsupportedError("conditional tests handle non-equality nulls only for the odds ratio; use the melded "
                           "or unconditional methods for " + std::string(to_string(hyp.measure)));
  }
  const auto h = conditional(data, psi);
  const Tail side = hyp.alternative == Alternative::greater ? Tail::upper : Tail::lower;
  return h.tail(data.x2, side, mode);
}

double fisher_central(const TwoByTwoData& data, double psi0, TailMode mode) {
  const auto h = conditional(data, psi0);
  const double lower = h.tail(data.x2, Tail::lower, mode);
  const double upper = h.tail(data.x2, Tail::upper, mode);
  return std::min({1.0, 2.0 * lower, 2.0 * upper});
}

double fisher_irwin(const TwoByTwoData& data, double psi0, TailMode mode) {
  const auto h = conditional(data, psi0);
  const auto& f = h.pmf_vector();
  std::vector<double> keys(f.data(), f.data() + f.size());
  return tolerant_tail(f, keys, h.pmf(data.x2), mode);
}

BlakerStatistics blaker_statistics(int s, int n1, int n2, double psi0, TailMode mode) {
  const NoncentralHypergeom h({s, n1, n2, psi0});
  BlakerStatistics st;
  st.lo = h.lo();
  const auto& f = h.pmf_vector();
  st.pmf.assign(f.data(), f.data() + f.size());
  for (int x2 = h.lo(); x2 <= h.hi(); ++x2)
    st.gamma_values.push_back(std::min(h.tail(x2, Tail::lower), h.tail(x2, Tail::upper)));
  for (double g : st.gamma_values) st.tb_values.push_back(tolerant_tail(f, st.gamma_values, g, mode));
  return st;
}

double blaker(const TwoByTwoData& data, double psi0, TailMode mode) {
  data.validate();
  const auto st = blaker_statistics(data.total(), data.n1, data.n2, psi0, mode);
  return st.tb_values[data.x2 - st.lo];
}

namespace {

// Solves tail(psi) = target on the log scale; `increasing` gives the direction of tail in psi.
double solve_psi(const std::function<double(double)>& tail, double target, bool increasing, double start) {
  double lo = std::log(start);
  double hi = lo;
  auto above = [&](double lp) { return tail(std::exp(lp)) > target; };
  // Bracket so that the predicate "tail crosses target" changes between lo and hi.
  double step = 1.0;
  if (above(lo) == increasing) {
    while (above(lo) == increasing && lo > -700.0) {
      lo -= step;
      step *= 2.0;
    }
  } else {
    while (above(hi) != increasing && hi < 700.0) {
      hi += step;
      step *= 2.0;
    }
  }
  auto pred = [&](double lp) { return above(lp) == increasing; };
  for (int i = 0; i < 300 && hi - lo > 1e-10 * std::max(1.0, std::fabs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid)) hi = mid; else lo = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

double sample_or(const TwoByTwoData& d) {
  // Continuity-corrected sample odds ratio.
  const double a = d.x2 + 0.5, b = d.n2 - d.x2 + 0.5, c = d.x1 + 0.5, e = d.n1 - d.x1 + 0.5;
  return (a * e) / (b * c);
}

}  // namespace

ConfidenceInterval conditional_ci_oddsratio(const TwoByTwoData& data, double level, TailMode mode) {
  if (!(level > 0.0 && level < 1.0)) throw std::domain_error("level must lie in (0, 1)");
  data.validate();
  const int s = data.total();
  const NoncentralHypergeom h0({s, data.n1, data.n2, 1.0});
  const double alpha2 = 0.5 * (1.0 - level);
  ConfidenceInterval ci;
  ci.level = level;
  ci.central = true;
  const double start = sample_or(data);
  auto tail_at = [&](Tail side) {
    return [&, side](double psi) { return nchg_tail(data.x2, {s, data.n1, data.n2, psi}, side, mode); };
  };
  if (data.x2 == h0.lo() && mode == TailMode::full) ci.lower = 0.0;
  else ci.lower = solve_psi(tail_at(Tail::upper), alpha2, true, start);
  if (data.x2 == h0.hi() && mode == TailMode::full) ci.upper = kInf;
  else ci.upper = solve_psi(tail_at(Tail::lower), alpha2, false, start);
  if (h0.lo() == h0.hi()) {
    ci.lower = 0.0;
    ci.upper = kInf;
  }
  return ci;
}

double santner_diff_bound(double u_or) {
  if (!(u_or >= 0.0)) throw std::domain_error("odds-ratio limit must be nonnegative");
  if (u_or <= 1.0) return 0.0;
  if (std::isinf(u_or)) return 1.0;
  const double r = std::sqrt(u_or);
  return (r - 1.0) / (r + 1.0);
}

double santner_diff_lower(double l_or) {
  if (!(l_or >= 0.0)) throw std::domain_error("odds-ratio limit must be nonnegative");
  if (l_or == 0.0) return -1.0;
  return -santner_diff_bound(1.0 / l_or);
}

ConfidenceInterval santner_diff_ci(const TwoByTwoData& data, double level, TailMode mode) {
  auto ci = conditional_ci_oddsratio(data, level, mode);
  ci.lower = santner_diff_lower(ci.lower);
  ci.upper = santner_diff_bound(ci.upper);
  return ci;
}

}  // namespace twobinom
