#include "twobinom/melded.hpp"

#include "twobinom/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace twobinom {

MeldingDistributions MeldingDistributions::from(const TwoByTwoData& d) {
  d.validate();
  MeldingDistributions m;
  const int x[2] = {d.x1, d.x2};
  const int n[2] = {d.n1, d.n2};
  for (int a = 0; a < 2; ++a) {
    m.lower_cd[a] = {double(x[a]), double(n[a] - x[a] + 1)};
    m.upper_cd[a] = {double(x[a] + 1), double(n[a] - x[a])};
  }
  return m;
}

namespace {

std::optional<double> point_mass(const BetaParams& p) {
  if (p.a == 0.0 && p.b == 0.0) throw std::domain_error("Beta(0, 0) is undefined");
  if (p.a == 0.0) return 0.0;
  if (p.b == 0.0) return 1.0;
  return std::nullopt;
}

// b(w1, w2) <= c  <=>  w2 <= h(c; w1).
double threshold(EffectMeasure m, double c, double w1) {
  switch (m) {
    case EffectMeasure::difference: return w1 + c;
    case EffectMeasure::ratio: return c * w1;
    case EffectMeasure::oddsratio: {
      const double den = 1.0 - w1 + c * w1;
      return den > 0.0 ? c * w1 / den : 1.0;
    }
  }
  return 0.0;
}

// w1 at which h(c; w1) = y.
double threshold_inverse(EffectMeasure m, double c, double y) {
  switch (m) {
    case EffectMeasure::difference: return y - c;
    case EffectMeasure::ratio: return c > 0.0 ? y / c : -1.0;
    case EffectMeasure::oddsratio: {
      const double den = y + c * (1.0 - y);
      return den > 0.0 ? y / den : -1.0;
    }
  }
  return -1.0;
}

void add_spread(std::vector<double>& bp, const BetaParams& p) {
  const double s = p.a + p.b;
  const double mean = p.a / s;
  const double sd = std::sqrt(p.a * p.b / (s * s * (s + 1.0)));
  const double mode = (p.a > 1.0 && p.b > 1.0) ? (p.a - 1.0) / (s - 2.0) : mean;
  bp.push_back(mode);
  for (double k : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    bp.push_back(mode - k * sd);
    bp.push_back(mode + k * sd);
  }
}

}  // namespace

double meld_cdf(const BetaParams& w1, const BetaParams& w2, EffectMeasure measure, double c) {
  auto F2 = [&](double y) {
    if (y < 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    return beta_cdf(y, w2);
  };
  const auto pm1 = point_mass(w1);
  const auto pm2 = point_mass(w2);
  if (pm1 && pm2) {
    const double b = effect(measure, *pm1, *pm2);
    return b <= c ? 1.0 : 0.0;
  }
  if (pm1) {
    if (measure != EffectMeasure::difference && *pm1 == 0.0) return 0.0;  // b = +inf almost surely
    return F2(threshold(measure, c, *pm1));
  }
  if (pm2 && measure != EffectMeasure::difference) {
    // b is 0 (w2 = 0) or +inf (w2 = 1, ratio excluded) almost surely apart from w1 = 0 null sets.
    if (*pm2 == 0.0) return c >= 0.0 ? 1.0 : 0.0;
    if (measure == EffectMeasure::oddsratio) return 0.0;
  }
  std::vector<double> bp{0.0, 1.0};
  add_spread(bp, w1);
  if (!pm2) {
    std::vector<double> ys;
    add_spread(ys, w2);
    for (double y : ys) bp.push_back(threshold_inverse(measure, c, y));
  }
  bp.push_back(threshold_inverse(measure, c, 0.0));
  bp.push_back(threshold_inverse(measure, c, 1.0));
  std::vector<double> kept;
  for (double v : bp)
    if (v >= 0.0 && v <= 1.0 && std::isfinite(v)) kept.push_back(v);
  auto integrand = [&](double w) { return F2(threshold(measure, c, w)) * beta_pdf(w, w1); };
  return std::clamp(integrate(integrand, kept, 1e-12), 0.0, 1.0);
}

double meld_quantile(const BetaParams& w1, const BetaParams& w2, EffectMeasure measure, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("probability must lie in [0, 1]");
  // With a point mass on one side b is a monotone map of the other beta variable.
  const auto pm1 = point_mass(w1);
  const auto pm2 = point_mass(w2);
  double direct = std::nan("");
  if (pm1 && pm2) direct = effect(measure, *pm1, *pm2);
  else if (pm1) direct = effect(measure, *pm1, beta_quantile(p, w2));
  else if (pm2) direct = effect(measure, beta_quantile(1.0 - p, w1), *pm2);
  if (!std::isnan(direct)) return direct;
  auto reached = [&](double c) { return meld_cdf(w1, w2, measure, c) >= p; };
  if (measure == EffectMeasure::difference) {
    if (reached(-1.0)) return -1.0;
    if (!reached(1.0)) return 1.0;
    return bisect_boundary(reached, -1.0, 1.0, 1e-10);
  }
  if (reached(0.0)) return 0.0;
  constexpr double kLogRange = 40.0;
  if (!reached(std::exp(kLogRange))) return kInf;
  if (reached(std::exp(-kLogRange))) return 0.0;
  return std::exp(bisect_boundary([&](double u) { return reached(std::exp(u)); }, -kLogRange, kLogRange, 1e-10));
}

ConfidenceInterval meld_ci(const TwoByTwoData& data, EffectMeasure measure, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::domain_error("level must lie in (0, 1)");
  const auto m = MeldingDistributions::from(data);
  const double alpha = 1.0 - level;
  ConfidenceInterval ci;
  ci.level = level;
  ci.central = true;
  ci.lower = meld_quantile(m.upper_cd[0], m.lower_cd[1], measure, alpha / 2);
  ci.upper = meld_quantile(m.lower_cd[0], m.upper_cd[1], measure, 1.0 - alpha / 2);
  return ci;
}

double meld_pvalue(const TwoByTwoData& data, const Hypothesis& hyp) {
  validate_beta0(hyp.measure, hyp.beta0);
  const auto m = MeldingDistributions::from(data);
  auto p_less = [&] {
    // P[b >= beta0] = 1 - P[b < beta0]; b is continuous unless both CDs are point masses.
    const auto pm1 = point_mass(m.lower_cd[0]);
    const auto pm2 = point_mass(m.upper_cd[1]);
    if (pm1 && pm2) return effect(hyp.measure, *pm1, *pm2) >= hyp.beta0 ? 1.0 : 0.0;
    return 1.0 - meld_cdf(m.lower_cd[0], m.upper_cd[1], hyp.measure, hyp.beta0);
  };
  auto p_greater = [&] { return meld_cdf(m.upper_cd[0], m.lower_cd[1], hyp.measure, hyp.beta0); };
  switch (hyp.alternative) {
    case Alternative::less: return p_less();
    case Alternative::greater: return p_greater();
    case Alternative::two_sided_central: return std::min({1.0, 2.0 * p_less(), 2.0 * p_greater()});
    default: throw UnsupportedError("melded p-values are one-sided or central");
  }
}

}  // namespace twobinom
