#include "twobinom/triples.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace twobinom {

namespace {

struct MethodName {
  MethodId id;
  std::string_view name;
};

constexpr MethodName kMethods[] = {
    {MethodId::fisher_onesided, "fisher-onesided"}, {MethodId::fisher_central, "fisher-central"},
    {MethodId::fisher_irwin, "fisher-irwin"},       {MethodId::blaker, "blaker"},
    {MethodId::melded, "melded"},                   {MethodId::uncond_score, "uncond-score"},
    {MethodId::uncond_diff_tb, "uncond-diff-tb"},   {MethodId::uncond_diff, "uncond-diff"},
    {MethodId::uncond_wald, "uncond-wald"},         {MethodId::uncond_estimate, "uncond-estimate"},
    {MethodId::uncond_midp, "uncond-midp"},         {MethodId::boschloo, "boschloo"},
    {MethodId::csm, "csm"},
};

bool is_two_sided(Alternative a) { return a != Alternative::less && a != Alternative::greater; }

// CSM orderings are costly; built once per (n1, n2, variant, budget).
const SampleSpaceOrdering& cached_csm(int n1, int n2, CsmVariant v, const CsmOptions& opts) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int, long, int>, SampleSpaceOrdering> cache;
  const auto key = std::make_tuple(n1, n2, static_cast<int>(v), opts.max_points, opts.sup.grid_points);
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, order_csm(n1, n2, v, opts)).first;
  return it->second;
}

double conditional_psi(const Hypothesis& hyp) {
  if (hyp.measure == EffectMeasure::oddsratio) {
    validate_beta0(hyp.measure, hyp.beta0);
    return hyp.beta0;
  }
  if (hyp.beta0 != equality_value(hyp.measure))
    throw UnsupportedError("conditional tests handle non-equality nulls only for the odds ratio; use the melded "
                           "or unconditional methods for " + std::string(to_string(hyp.measure)));
  return 1.0;
}

double fisher_psi(const MethodSpec& m, double beta0) {
  return m.measure == EffectMeasure::oddsratio ? beta0 : 1.0;
}

SampleSpaceOrdering onesided_ordering(const MethodSpec& m, int n1, int n2, double beta0, Alternative alt) {
  switch (m.id) {
    case MethodId::uncond_score: return order_score(n1, n2, m.measure, beta0);
    case MethodId::uncond_diff_tb: return order_diff_tiebreak(n1, n2);
    case MethodId::uncond_diff: return order_diff(n1, n2);
    case MethodId::uncond_wald: return order_wald_pooled(n1, n2);
    case MethodId::uncond_estimate: return order_estimate(n1, n2, m.measure);
    case MethodId::uncond_midp: return order_fisher_midp(n1, n2);
    case MethodId::boschloo:
      return fisher_ordering(n1, n2, fisher_psi(m, beta0), BoschlooVariant::onesided, alt, m.mode);
    case MethodId::csm: return cached_csm(n1, n2, CsmVariant::bottom_up, m.csm);
    default: throw std::logic_error("not an unconditional method");
  }
}

std::optional<SampleSpaceOrdering> twosided_ordering(const MethodSpec& m, int n1, int n2, double beta0) {
  switch (m.id) {
    case MethodId::uncond_score: return order_score_twosided(n1, n2, m.measure, beta0);
    case MethodId::uncond_wald: return order_wald_pooled_twosided(n1, n2);
    case MethodId::boschloo:
      return fisher_ordering(n1, n2, fisher_psi(m, beta0), BoschlooVariant::irwin, Alternative::two_sided_minlike,
                             m.mode);
    case MethodId::csm: return cached_csm(n1, n2, CsmVariant::two_sided, m.csm);
    default: return std::nullopt;
  }
}

bool unconditional(MethodId id) {
  switch (id) {
    case MethodId::uncond_score:
    case MethodId::uncond_diff_tb:
    case MethodId::uncond_diff:
    case MethodId::uncond_wald:
    case MethodId::uncond_estimate:
    case MethodId::uncond_midp:
    case MethodId::boschloo:
    case MethodId::csm:
      return true;
    default:
      return false;
  }
}

bool beta0_indexed(const MethodSpec& m) {
  if (m.em || m.berger_boos_gamma) return true;
  // Boschloo's lower- and upper-tail orderings differ, so its one-sided p-values share no
  // single ordering.
  return m.id == MethodId::uncond_score || m.id == MethodId::boschloo;
}

double uncond_method_pvalue(const MethodSpec& m, const TwoByTwoData& d, const Hypothesis& hyp) {
  const auto opts = m.uncond_options();
  MethodSpec mm = m;
  mm.measure = hyp.measure;
  if (is_two_sided(hyp.alternative) && (m.two_sided_ordering || hyp.alternative != Alternative::two_sided_central)) {
    if (auto ord = twosided_ordering(mm, d.n1, d.n2, hyp.beta0)) return uncond_pvalue_twosided(d, hyp, *ord, opts);
  }
  if (is_two_sided(hyp.alternative)) {
    Hypothesis h = hyp;
    h.alternative = Alternative::less;
    const double pl = uncond_pvalue_onesided(d, h, onesided_ordering(mm, d.n1, d.n2, h.beta0, h.alternative), opts);
    h.alternative = Alternative::greater;
    const double pg = uncond_pvalue_onesided(d, h, onesided_ordering(mm, d.n1, d.n2, h.beta0, h.alternative), opts);
    return std::min({1.0, 2.0 * pl, 2.0 * pg});
  }
  return uncond_pvalue_onesided(d, hyp, onesided_ordering(mm, d.n1, d.n2, hyp.beta0, hyp.alternative), opts);
}

std::vector<double> default_grid(EffectMeasure m, int points) { return beta_grid(m, points); }

// Region of a two-sided conditional p-value function; the search range is the central
// interval at level 1 - 2 alpha / (K + 1), which contains every such region.
MethodInterval conditional_region(const TwoByTwoData& d, double level, const PValueFunction& pfun, int points,
                                  double tol) {
  const NoncentralHypergeom h({d.total(), d.n1, d.n2, 1.0});
  const int k = h.hi() - h.lo() + 1;
  MethodInterval out;
  if (k == 1) {
    ConfidenceRegion r;
    r.level = level;
    r.intervals = {{0.0, kInf}};
    out.region = r;
    out.ci = matching_ci(r);
    return out;
  }
  const double alpha = 1.0 - level;
  const auto bracket = conditional_ci_oddsratio(d, 1.0 - 2.0 * alpha / (k + 1));
  const double lo = std::max(bracket.lower, 1e-8);
  const double hi = std::min(bracket.upper, 1e8);
  auto grid = logspace(lo, hi, points);
  out.region = confidence_region(pfun, level, grid, bracket.lower, bracket.upper, tol);
  out.ci = matching_ci(*out.region);
  return out;
}

}  // namespace

std::string_view to_string(MethodId id) {
  for (const auto& m : kMethods)
    if (m.id == id) return m.name;
  return "unknown";
}

MethodId parse_method(std::string_view s) {
  for (const auto& m : kMethods)
    if (m.name == s) return m.id;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'; supported: " + method_catalog());
}

std::string method_catalog() {
  std::string out;
  for (const auto& m : kMethods) {
    if (!out.empty()) out += ", ";
    out += m.name;
  }
  return out;
}

std::string MethodSpec::name() const {
  std::string n(to_string(id));
  if (mode == TailMode::mid) n += "+midp";
  if (berger_boos_gamma) n += "+berger-boos";
  if (em) n += "+em";
  if (two_sided_ordering && unconditional(id)) n += "+two-sided-ordering";
  return n;
}

UnconditionalOptions MethodSpec::uncond_options() const {
  UnconditionalOptions o = uncond;
  if (berger_boos_gamma) o.berger_boos_gamma = berger_boos_gamma;
  if (em) o.em_iterations = 1;
  return o;
}

bool MethodSpec::conditional() const {
  return id == MethodId::fisher_onesided || id == MethodId::fisher_central || id == MethodId::fisher_irwin ||
         id == MethodId::blaker;
}

bool MethodSpec::minlike() const {
  if (id == MethodId::fisher_irwin || id == MethodId::blaker) return true;
  return two_sided_ordering && unconditional(id) && id != MethodId::uncond_diff_tb && id != MethodId::uncond_diff &&
         id != MethodId::uncond_estimate && id != MethodId::uncond_midp;
}

double method_pvalue(const MethodSpec& m, const TwoByTwoData& d, const Hypothesis& hyp) {
  d.validate();
  validate_beta0(hyp.measure, hyp.beta0);
  if (m.id != MethodId::melded && !unconditional(m.id) && m.berger_boos_gamma)
    throw UnsupportedError("the Berger-Boos adjustment applies to unconditional methods only");
  if (m.em && !unconditional(m.id)) throw UnsupportedError("E+M applies to unconditional methods only");
  if (m.conditional() && !is_two_sided(hyp.alternative)) return fisher_onesided(d, hyp, m.mode);
  switch (m.id) {
    case MethodId::fisher_onesided:
    case MethodId::fisher_central: return fisher_central(d, conditional_psi(hyp), m.mode);
    case MethodId::fisher_irwin: return fisher_irwin(d, conditional_psi(hyp), m.mode);
    case MethodId::blaker: return blaker(d, conditional_psi(hyp), m.mode);
    case MethodId::melded: {
      if (m.mode == TailMode::mid) throw UnsupportedError("melded intervals have no mid-p version");
      Hypothesis h = hyp;
      if (is_two_sided(h.alternative)) h.alternative = Alternative::two_sided_central;
      return meld_pvalue(d, h);
    }
    default: break;
  }
  if (m.mode == TailMode::mid && m.id != MethodId::boschloo)
    throw UnsupportedError("mid-p applies to conditional methods and Boschloo's ordering");
  return uncond_method_pvalue(m, d, hyp);
}

PValueFunction pvalue_function(const MethodSpec& m, const TwoByTwoData& d, Alternative alternative) {
  return [m, d, alternative](double beta0) { return method_pvalue(m, d, {m.measure, beta0, alternative}); };
}

std::optional<SampleSpaceOrdering> method_ordering(const MethodSpec& m, int n1, int n2, double beta0,
                                                   Alternative alt) {
  if (!unconditional(m.id)) return std::nullopt;
  MethodSpec mm = m;
  if (!is_two_sided(alt)) return onesided_ordering(mm, n1, n2, beta0, alt);
  if (m.two_sided_ordering || alt != Alternative::two_sided_central) return twosided_ordering(mm, n1, n2, beta0);
  return std::nullopt;
}

Table method_pvalue_table(const MethodSpec& m, int n1, int n2, const Hypothesis& hyp) {
  MethodSpec mm = m;
  mm.measure = hyp.measure;
  if (unconditional(m.id)) {
    const auto opts = mm.uncond_options();
    if (auto ord = method_ordering(mm, n1, n2, hyp.beta0, hyp.alternative)) {
      Hypothesis h = hyp;
      if (ord->two_sided) h.alternative = Alternative::two_sided_minlike;
      return uncond_pvalue_table(h, *ord, opts);
    }
    if (is_two_sided(hyp.alternative)) {
      Hypothesis h = hyp;
      h.alternative = Alternative::less;
      const Table pl = method_pvalue_table(mm, n1, n2, h);
      h.alternative = Alternative::greater;
      const Table pg = method_pvalue_table(mm, n1, n2, h);
      return (2.0 * pl.cwiseMin(pg)).cwiseMin(1.0);
    }
  }
  Table out(n1 + 1, n2 + 1);
  parallel_for((n1 + 1) * (n2 + 1), [&](int i) {
    const int x1 = i / (n2 + 1);
    const int x2 = i % (n2 + 1);
    out(x1, x2) = method_pvalue(mm, {x1, n1, x2, n2}, hyp);
  });
  return out;
}

bool ConfidenceRegion::contains(double beta) const {
  return std::any_of(intervals.begin(), intervals.end(),
                     [&](const Interval& i) { return i.lower < beta && beta < i.upper; });
}

ConfidenceRegion confidence_region(const PValueFunction& pfun, double level, const std::vector<double>& grid,
                                   double lo_limit, double hi_limit, double tol) {
  if (!(level > 0.0 && level < 1.0)) throw std::domain_error("level must lie in (0, 1)");
  const double alpha = 1.0 - level;
  ConfidenceRegion r;
  r.level = level;
  for (size_t i = 1; i < grid.size(); ++i) r.grid_resolution = std::max(r.grid_resolution, grid[i] - grid[i - 1]);
  auto p = [&](double b) {
    try {
      return pfun(b);
    } catch (const std::exception& e) {
      throw std::runtime_error("p-value evaluation failed at beta0 = " + std::to_string(b) + ": " + e.what());
    }
  };
  r.intervals = scan_region(p, alpha, grid, tol, lo_limit, hi_limit);
  return r;
}

ConfidenceInterval matching_ci(const ConfidenceRegion& region) {
  if (region.intervals.empty()) throw std::invalid_argument("matching interval of an empty region");
  ConfidenceInterval ci;
  ci.level = region.level;
  ci.lower = region.intervals.front().lower;
  ci.upper = region.intervals.back().upper;
  ci.holes_filled = region.intervals.size() > 1;
  ci.central = false;
  return ci;
}

// Region of a beta0-indexed unconditional method on its inversion grid.
MethodInterval grid_interval(const MethodSpec& m, const TwoByTwoData& d, double level, const PValueFunction& pfun) {
  MethodInterval out;
  const auto grid = default_grid(m.measure, m.ci_grid.points);
  ConfidenceRegion r =
      confidence_region(pfun, level, grid, measure_min(m.measure), measure_max(m.measure), m.ci_grid.tol);
  if (r.intervals.empty()) {
    out.ci.lower = out.ci.upper = sample_estimate(d, m.measure);
    out.ci.level = level;
  } else {
    out.ci = matching_ci(r);
  }
  out.ci.central = !m.minlike();
  out.region = r;
  return out;
}

MethodInterval method_ci(const MethodSpec& m, const TwoByTwoData& d, double level) {
  d.validate();
  MethodInterval out;
  switch (m.id) {
    case MethodId::fisher_onesided:
    case MethodId::fisher_central:
      if (m.measure == EffectMeasure::oddsratio) out.ci = conditional_ci_oddsratio(d, level, m.mode);
      else if (m.measure == EffectMeasure::difference) out.ci = santner_diff_ci(d, level, m.mode);
      else throw UnsupportedError("no conditional interval for the ratio; use melded or unconditional methods");
      return out;
    case MethodId::fisher_irwin:
    case MethodId::blaker: {
      if (m.measure != EffectMeasure::oddsratio)
        throw UnsupportedError("conditional two-sided intervals exist only for the odds ratio");
      auto pfun = pvalue_function(m, d, Alternative::two_sided_minlike);
      return conditional_region(d, level, pfun, m.ci_grid.points, m.ci_grid.tol);
    }
    case MethodId::melded:
      out.ci = meld_ci(d, m.measure, level);
      return out;
    default: break;
  }
  const bool two = m.minlike();
  if (beta0_indexed(m)) {
    auto pfun = pvalue_function(m, d, two ? Alternative::two_sided_minlike : Alternative::two_sided_central);
    return grid_interval(m, d, level, pfun);
  }
  const auto fam = fixed_family(two ? *twosided_ordering(m, d.n1, d.n2, equality_value(m.measure))
                                    : onesided_ordering(m, d.n1, d.n2, equality_value(m.measure), Alternative::less));
  auto res = uncond_ci(d, m.measure, level, fam, m.uncond_options(), m.ci_grid);
  out.ci = res.ci;
  out.coherent = res.coherent;
  if (two) {
    ConfidenceRegion r;
    r.level = level;
    r.intervals = res.region;
    out.region = r;
  }
  return out;
}

std::vector<std::vector<MethodInterval>> method_ci_tables(const MethodSpec& m, int n1, int n2,
                                                         const std::vector<double>& levels) {
  const int N = (n1 + 1) * (n2 + 1);
  std::vector<std::vector<MethodInterval>> out(levels.size(), std::vector<MethodInterval>(static_cast<size_t>(N)));
  const bool grid_based = !m.conditional() && m.id != MethodId::melded && beta0_indexed(m);
  if (!grid_based) {
    parallel_for(N * static_cast<int>(levels.size()), [&](int k) {
      const int l = k / N, i = k % N;
      out[static_cast<size_t>(l)][static_cast<size_t>(i)] =
          method_ci(m, {i / (n2 + 1), n1, i % (n2 + 1), n2}, levels[static_cast<size_t>(l)]);
    });
    return out;
  }
  // One p-value table per grid value serves every sample point; only the crossings are refined
  // point by point.
  const Alternative two = m.minlike() ? Alternative::two_sided_minlike : Alternative::two_sided_central;
  const auto grid = default_grid(m.measure, m.ci_grid.points);
  std::vector<Table> tables(grid.size());
  parallel_for(static_cast<int>(grid.size()), [&](int g) {
    tables[static_cast<size_t>(g)] = method_pvalue_table(m, n1, n2, {m.measure, grid[static_cast<size_t>(g)], two});
  });
  parallel_for(N, [&](int i) {
    const TwoByTwoData d{i / (n2 + 1), n1, i % (n2 + 1), n2};
    const auto single = pvalue_function(m, d, two);
    PValueFunction pfun = [&](double b) {
      const auto it = std::lower_bound(grid.begin(), grid.end(), b);
      if (it != grid.end() && *it == b) return tables[static_cast<size_t>(it - grid.begin())](d.x1, d.x2);
      return single(b);
    };
    for (size_t l = 0; l < levels.size(); ++l) out[l][static_cast<size_t>(i)] = grid_interval(m, d, levels[l], pfun);
  });
  return out;
}

double sample_estimate(const TwoByTwoData& d, EffectMeasure m) {
  switch (m) {
    case EffectMeasure::difference:
      return static_cast<double>(static_cast<long>(d.x2) * d.n1 - static_cast<long>(d.x1) * d.n2) /
             (static_cast<double>(d.n1) * d.n2);
    case EffectMeasure::ratio: {
      const double num = static_cast<double>(d.x2) * d.n1;
      const double den = static_cast<double>(d.x1) * d.n2;
      if (den == 0.0) return num == 0.0 ? std::nan("") : kInf;
      return num / den;
    }
    case EffectMeasure::oddsratio: {
      const double num = static_cast<double>(d.x2) * (d.n1 - d.x1);
      const double den = static_cast<double>(d.x1) * (d.n2 - d.x2);
      if (den == 0.0) return num == 0.0 ? std::nan("") : kInf;
      return num / den;
    }
  }
  return std::nan("");
}

InferenceResult infer(const MethodSpec& m, const TwoByTwoData& d, const Hypothesis& hyp, double level) {
  d.validate();
  MethodSpec mm = m;
  mm.measure = hyp.measure;
  if (hyp.alternative == Alternative::two_sided_minlike && unconditional(m.id)) mm.two_sided_ordering = true;
  InferenceResult r;
  r.method = mm.name();
  r.data = d;
  r.hypothesis = hyp;
  const auto mi = method_ci(mm, d, level);
  r.ci = mi.ci;
  r.region = mi.region;
  r.p_less = method_pvalue(mm, d, {hyp.measure, hyp.beta0, Alternative::less});
  r.p_greater = method_pvalue(mm, d, {hyp.measure, hyp.beta0, Alternative::greater});
  const Alternative two = mm.minlike() ? Alternative::two_sided_minlike : Alternative::two_sided_central;
  r.p_two_sided = method_pvalue(mm, d, {hyp.measure, hyp.beta0, two});
  r.p_value = is_two_sided(hyp.alternative) ? r.p_two_sided
              : hyp.alternative == Alternative::less ? r.p_less : r.p_greater;
  r.estimate = sample_estimate(d, hyp.measure);
  if (std::isnan(r.estimate)) {
    r.estimate = std::clamp(equality_value(hyp.measure), r.ci.lower, r.ci.upper);
    r.estimate_clamped = true;
  } else if (r.estimate < r.ci.lower || r.estimate > r.ci.upper) {
    r.estimate = std::clamp(r.estimate, r.ci.lower, r.ci.upper);
    r.estimate_clamped = true;
  }
  return r;
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::fail_to_reject: return "fail_to_reject";
    case Decision::conclude_greater: return "conclude_greater";
    case Decision::conclude_less: return "conclude_less";
  }
  return "";
}

DecisionOutcome three_decision(const InferenceResult& r, double alpha) {
  DecisionOutcome out;
  out.alpha = alpha;
  if (r.p_greater <= alpha / 2 && r.estimate >= r.hypothesis.beta0) out.decision = Decision::conclude_greater;
  else if (r.p_less <= alpha / 2 && r.estimate <= r.hypothesis.beta0) out.decision = Decision::conclude_less;
  return out;
}

CompatibilityReport check_compatibility(const MethodSpec& m, const TwoByTwoData& d, const std::vector<double>& alphas,
                                        const std::vector<double>& grid, double edge_tol) {
  CompatibilityReport rep;
  const Alternative two = m.minlike() ? Alternative::two_sided_minlike : Alternative::two_sided_central;
  auto pfun = pvalue_function(m, d, two);
  std::vector<double> pv(grid.size());
  for (size_t k = 0; k < grid.size(); ++k) pv[k] = pfun(grid[k]);
  for (double a : alphas) {
    const auto ci = method_ci(m, d, 1.0 - a).ci;
    auto near = [&](double b, double e) {
      if (!std::isfinite(e)) return false;
      return std::fabs(b - e) <= edge_tol * std::max(1.0, std::fabs(e));
    };
    for (size_t k = 0; k < grid.size(); ++k) {
      const double b = grid[k];
      if (near(b, ci.lower) || near(b, ci.upper)) continue;
      const bool rejects = pv[k] <= a;
      const bool in_ci = ci.contains(b);
      if (rejects == in_ci) {
        rep.compatible = false;
        rep.violations.push_back({a, b, pv[k], rejects, in_ci});
      }
    }
  }
  return rep;
}

NestednessReport check_nestedness(const IntervalFunction& ci, const std::vector<double>& levels, double tol) {
  NestednessReport rep;
  std::vector<double> lv = levels;
  std::sort(lv.begin(), lv.end());
  std::vector<ConfidenceInterval> cis;
  for (double l : lv) cis.push_back(ci(l));
  for (size_t i = 0; i < lv.size(); ++i)
    for (size_t j = i + 1; j < lv.size(); ++j) {
      const auto& s = cis[i];
      const auto& L = cis[j];
      const bool ok = L.lower <= s.lower + tol * std::max(1.0, std::fabs(s.lower)) &&
                      s.upper <= L.upper + tol * std::max(1.0, std::fabs(s.upper));
      if (!ok) {
        rep.nested = false;
        rep.violations.push_back({lv[i], lv[j], s, L});
      }
    }
  return rep;
}

NestednessReport check_nestedness(const MethodSpec& m, const TwoByTwoData& d, const std::vector<double>& levels) {
  return check_nestedness([&](double l) { return method_ci(m, d, l).ci; }, levels);
}

CoherenceReport check_coherence(const PValueFunction& pfun, const std::vector<double>& grid, Alternative alt,
                                double estimate, double tol) {
  CoherenceReport rep;
  std::vector<double> pv(grid.size());
  for (size_t k = 0; k < grid.size(); ++k) pv[k] = pfun(grid[k]);
  for (size_t k = 1; k < grid.size(); ++k) {
    bool bad = false;
    switch (alt) {
      case Alternative::less: bad = pv[k] > pv[k - 1] + tol; break;
      case Alternative::greater: bad = pv[k] < pv[k - 1] - tol; break;
      default:
        if (grid[k] <= estimate) bad = pv[k] < pv[k - 1] - tol;
        else if (grid[k - 1] >= estimate) bad = pv[k] > pv[k - 1] + tol;
        break;
    }
    if (bad) {
      rep.coherent = false;
      rep.violations.push_back({grid[k - 1], pv[k - 1], grid[k], pv[k]});
    }
  }
  return rep;
}

}  // namespace twobinom
