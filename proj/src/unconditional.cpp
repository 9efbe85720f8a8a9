#include "twobinom/unconditional.hpp"

#include "twobinom/distributions.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace twobinom {

namespace {

enum class Side { lower, upper };

Side side_for(Alternative a) {
  switch (a) {
    case Alternative::less: return Side::lower;
    case Alternative::greater: return Side::upper;
    default: throw std::invalid_argument("one-sided p-value needs alternative less or greater");
  }
}

Mask effective_mask(const SampleSpaceOrdering& ord, EffectMeasure measure) {
  return ord.informative.array() && informative_mask(ord.n1, ord.n2, measure).array();
}

void check_data(const TwoByTwoData& d, const SampleSpaceOrdering& ord) {
  d.validate();
  if (d.n1 != ord.n1 || d.n2 != ord.n2) throw std::invalid_argument("ordering was built for different sample sizes");
}

// Tail probabilities of one ordering under product-binomial weights.
class TailEngine {
 public:
  TailEngine(const SampleSpaceOrdering& ord, Mask mask, Side side)
      : ord_(ord), mask_(std::move(mask)), side_(side) {}

  const Mask& mask() const { return mask_; }
  Side side() const { return side_; }

  Table indicator(int rank) const {
    Table r = Table::Zero(ord_.n1 + 1, ord_.n2 + 1);
    for (int i = 0; i <= ord_.n1; ++i)
      for (int j = 0; j <= ord_.n2; ++j)
        if (mask_(i, j) && (side_ == Side::lower ? ord_.rank(i, j) <= rank : ord_.rank(i, j) >= rank)) r(i, j) = 1.0;
    return r;
  }

  static double prob(const Table& ind, double t1, double t2) {
    thread_local Eigen::VectorXd b1, b2;
    const Eigen::Index r = ind.rows(), c = ind.cols();
    b1.resize(r);
    b2.resize(c);
    binom_pmf_fill(static_cast<int>(r) - 1, t1, b1);
    binom_pmf_fill(static_cast<int>(c) - 1, t2, b2);
    double s = 0.0;
    for (Eigen::Index j = 0; j < c; ++j) s += b2(j) * ind.col(j).dot(b1);
    return std::min(1.0, s);
  }

  /// Tail probability for every rank at one theta.
  Eigen::VectorXd all_ranks(double t1, double t2) const {
    thread_local Eigen::VectorXd b1, b2;
    b1.resize(ord_.n1 + 1);
    b2.resize(ord_.n2 + 1);
    binom_pmf_fill(ord_.n1, t1, b1);
    binom_pmf_fill(ord_.n2, t2, b2);
    Eigen::VectorXd out(ord_.num_ranks);
    all_ranks(b1, b2, out);
    return out;
  }

  /// Same, from the two pmf vectors.
  void all_ranks(const Eigen::Ref<const Eigen::VectorXd>& b1, const Eigen::Ref<const Eigen::VectorXd>& b2,
                 Eigen::Ref<Eigen::VectorXd> out) const {
    out.setZero();
    for (int j = 0; j <= ord_.n2; ++j)
      for (int i = 0; i <= ord_.n1; ++i)
        if (mask_(i, j)) out(ord_.rank(i, j)) += b1(i) * b2(j);
    double acc = 0.0;
    if (side_ == Side::lower) {
      for (int r = 0; r < ord_.num_ranks; ++r) out(r) = std::min(1.0, acc += out(r));
    } else {
      for (int r = ord_.num_ranks - 1; r >= 0; --r) out(r) = std::min(1.0, acc += out(r));
    }
  }

 private:
  const SampleSpaceOrdering& ord_;
  Mask mask_;
  Side side_;
};

void check_budget(const SampleSpaceOrdering& ord, double evaluations, const UnconditionalOptions& opts) {
  const double work = static_cast<double>(ord.n1 + 1) * (ord.n2 + 1) * evaluations;
  if (work > opts.max_work)
    throw ResourceError("unconditional computation needs about " + std::to_string(work) +
                        " point evaluations, above the budget of " + std::to_string(opts.max_work));
}

// Binomial pmfs on the square grid used for the null-region search, one column per grid value.
struct RegionGrid {
  std::vector<double> g;
  Eigen::MatrixXd P1, P2;

  RegionGrid(int n1, int n2, int m) : g(linspace(0.0, 1.0, std::max(m, 2))), P1(n1 + 1, g.size()), P2(n2 + 1, g.size()) {
    for (size_t k = 0; k < g.size(); ++k) {
      binom_pmf_fill(n1, g[k], P1.col(static_cast<Eigen::Index>(k)));
      binom_pmf_fill(n2, g[k], P2.col(static_cast<Eigen::Index>(k)));
    }
  }
  int size() const { return static_cast<int>(g.size()); }
  // Whether grid point (a, b) lies in the one-sided null region {beta >= beta0} (lower) or {beta <= beta0} (upper).
  bool in_null(const Hypothesis& hyp, Side side, int a, int b) const {
    const double e = effect(hyp.measure, g[static_cast<size_t>(a)], g[static_cast<size_t>(b)]);
    return std::isnan(e) || (side == Side::lower ? e >= hyp.beta0 : e <= hyp.beta0);
  }
};

bool needs_region_search(const SampleSpaceOrdering& ord, const UnconditionalOptions& opts) {
  return opts.force_full_region || (!ord.two_sided && !check_bc(ord).pass);
}

double sup_single(const TwoByTwoData& data, const Hypothesis& hyp, const SampleSpaceOrdering& ord, Side side,
                  const UnconditionalOptions& opts) {
  const TailEngine eng(ord, effective_mask(ord, hyp.measure), side);
  if (!eng.mask()(data.x1, data.x2)) return 1.0;
  const Table ind = eng.indicator(ord.rank(data.x1, data.x2));
  const NullBoundary bnd{hyp.measure, hyp.beta0};
  double lo = bnd.theta1_lo();
  double hi = bnd.theta1_hi();
  double gamma = 0.0;
  if (opts.berger_boos_gamma) {
    gamma = *opts.berger_boos_gamma;
    const auto r = berger_boos_range(data, bnd, gamma);
    if (r.lower > r.upper) return std::min(1.0, gamma);
    lo = r.lower;
    hi = r.upper;
  }
  check_budget(ord, opts.grid_points, opts);
  auto f = [&](double t1) { return TailEngine::prob(ind, t1, bnd.theta2(t1)); };
  double best = maximize_on_interval(f, lo, hi, opts.sup()).value;
  best = std::max({best, f(lo), f(hi)});
  if (!ord.two_sided && needs_region_search(ord, opts) && !opts.berger_boos_gamma) {
    const RegionGrid rg(ord.n1, ord.n2, opts.region_grid_points);
    check_budget(ord, static_cast<double>(rg.size()) * rg.size(), opts);
    const Eigen::MatrixXd M = rg.P1.transpose() * ind.matrix() * rg.P2;
    for (int a = 0; a < rg.size(); ++a)
      for (int b = 0; b < rg.size(); ++b)
        if (rg.in_null(hyp, side, a, b)) best = std::max(best, std::min(1.0, M(a, b)));
  }
  return std::min(1.0, best + gamma);
}

}  // namespace

Interval berger_boos_range(const TwoByTwoData& data, const NullBoundary& bnd, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::domain_error("Berger-Boos gamma must lie in (0, 1)");
  // Clopper-Pearson rectangle with joint coverage 1 - gamma.
  const double g = 1.0 - std::sqrt(1.0 - gamma);
  auto cp = [&](int x, int n) {
    return Interval{x == 0 ? 0.0 : beta_quantile(0.5 * g, {double(x), double(n - x + 1)}),
                    x == n ? 1.0 : beta_quantile(1.0 - 0.5 * g, {double(x + 1), double(n - x)})};
  };
  const Interval c1 = cp(data.x1, data.n1);
  const Interval c2 = cp(data.x2, data.n2);
  double lo = std::max(bnd.theta1_lo(), c1.lower);
  double hi = std::min(bnd.theta1_hi(), c1.upper);
  if (lo > hi) return {1.0, 0.0};
  // theta2 is nondecreasing along the boundary.
  auto t2 = [&](double t) { return bnd.theta2(t); };
  if (t2(hi) < c2.lower || t2(lo) > c2.upper) return {1.0, 0.0};
  if (t2(lo) < c2.lower) lo = bisect_boundary([&](double t) { return t2(t) >= c2.lower; }, lo, hi, 1e-13);
  if (t2(hi) > c2.upper) hi = bisect_boundary([&](double t) { return t2(t) > c2.upper; }, lo, hi, 1e-13);
  return {lo, hi};
}

double uncond_pvalue_onesided(const TwoByTwoData& data, const Hypothesis& hyp, const SampleSpaceOrdering& ordering,
                              const UnconditionalOptions& opts) {
  check_data(data, ordering);
  validate_beta0(hyp.measure, hyp.beta0);
  const Side side = side_for(hyp.alternative);
  if (ordering.two_sided) throw std::invalid_argument("one-sided p-value needs a one-sided ordering");
  if (opts.em_iterations > 0) return em_adjust(data, hyp, ordering, opts);
  return sup_single(data, hyp, ordering, side, opts);
}

double uncond_pvalue_twosided(const TwoByTwoData& data, const Hypothesis& hyp, const SampleSpaceOrdering& ordering,
                              const UnconditionalOptions& opts) {
  check_data(data, ordering);
  validate_beta0(hyp.measure, hyp.beta0);
  if (!ordering.two_sided) throw std::invalid_argument("two-sided p-value needs a two-sided ordering");
  if (opts.em_iterations > 0) return em_adjust(data, hyp, ordering, opts);
  return sup_single(data, hyp, ordering, Side::lower, opts);
}

double uncond_pvalue(const TwoByTwoData& data, const Hypothesis& hyp, const SampleSpaceOrdering& ordering,
                     const UnconditionalOptions& opts) {
  switch (hyp.alternative) {
    case Alternative::less:
    case Alternative::greater:
      return uncond_pvalue_onesided(data, hyp, ordering, opts);
    default:
      break;
  }
  if (ordering.two_sided) return uncond_pvalue_twosided(data, hyp, ordering, opts);
  if (hyp.alternative != Alternative::two_sided_central)
    throw std::invalid_argument("this alternative needs a two-sided ordering");
  Hypothesis h = hyp;
  h.alternative = Alternative::less;
  const double pl = uncond_pvalue_onesided(data, h, ordering, opts);
  h.alternative = Alternative::greater;
  const double pg = uncond_pvalue_onesided(data, h, ordering, opts);
  return std::min({1.0, 2.0 * pl, 2.0 * pg});
}

Table uncond_pvalue_table(const Hypothesis& hyp, const SampleSpaceOrdering& ordering,
                          const UnconditionalOptions& opts) {
  validate_beta0(hyp.measure, hyp.beta0);
  const int n1 = ordering.n1;
  const int n2 = ordering.n2;
  if (hyp.alternative == Alternative::two_sided_central && !ordering.two_sided) {
    Hypothesis h = hyp;
    h.alternative = Alternative::less;
    const Table pl = uncond_pvalue_table(h, ordering, opts);
    h.alternative = Alternative::greater;
    const Table pg = uncond_pvalue_table(h, ordering, opts);
    return (2.0 * pl.cwiseMin(pg)).cwiseMin(1.0);
  }
  const bool two = ordering.two_sided;
  if (!two && (hyp.alternative != Alternative::less && hyp.alternative != Alternative::greater))
    throw std::invalid_argument("this alternative needs a two-sided ordering");
  if (two && (hyp.alternative == Alternative::less || hyp.alternative == Alternative::greater))
    throw std::invalid_argument("one-sided p-values need a one-sided ordering");
  if (opts.em_iterations > 0) {
    UnconditionalOptions o = opts;
    o.em_iterations = 0;
    return uncond_pvalue_table(hyp, em_ordering(hyp, ordering), o);
  }
  const Side side = two ? Side::lower : side_for(hyp.alternative);
  const TailEngine eng(ordering, effective_mask(ordering, hyp.measure), side);
  const NullBoundary bnd{hyp.measure, hyp.beta0};
  const int G = std::max(opts.grid_points, 2);
  const int K = ordering.num_ranks;
  check_budget(ordering, G, opts);
  if (static_cast<double>(G) * K > 2e8) throw ResourceError("p-value table grid too large");
  const auto grid = linspace(bnd.theta1_lo(), bnd.theta1_hi(), G);
  Eigen::MatrixXd V(K, G);
  parallel_for(G, [&](int g) { V.col(g) = eng.all_ranks(grid[g], bnd.theta2(grid[g])); });

  // Sup per (rank, nuisance range); without Berger-Boos the range is the whole boundary.
  std::map<std::pair<int, int>, double> cache;
  std::vector<double> region_max;
  if (!two && !opts.berger_boos_gamma && needs_region_search(ordering, opts)) {
    const RegionGrid rg(n1, n2, opts.region_grid_points);
    const int m = rg.size();
    check_budget(ordering, static_cast<double>(m) * m, opts);
    // Cells in tail order; each row theta1 is swept over all theta2 at once.
    std::vector<std::pair<int, int>> cells;
    for (int i = 0; i <= n1; ++i)
      for (int j = 0; j <= n2; ++j)
        if (eng.mask()(i, j)) cells.emplace_back(i, j);
    std::stable_sort(cells.begin(), cells.end(), [&](const auto& x, const auto& y) {
      const int rx = ordering.rank(x.first, x.second), ry = ordering.rank(y.first, y.second);
      return side == Side::lower ? rx < ry : rx > ry;
    });
    const Eigen::MatrixXd P2t = rg.P2.transpose();
    region_max.assign(K, 0.0);
    std::mutex mu;
    parallel_for(m, [&](int a) {
      std::vector<double> local(K, 0.0);
      Eigen::ArrayXd inr(m);
      for (int b = 0; b < m; ++b) inr(b) = rg.in_null(hyp, side, a, b) ? 1.0 : 0.0;
      if (!(inr > 0.0).any()) return;
      Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(m);
      for (size_t k = 0; k < cells.size(); ++k) {
        const auto [i, j] = cells[k];
        acc += rg.P1(i, a) * P2t.col(j).array();
        const int r = ordering.rank(i, j);
        if (k + 1 < cells.size() && ordering.rank(cells[k + 1].first, cells[k + 1].second) == r) continue;
        local[r] = std::max(local[r], std::min(1.0, (acc * inr).maxCoeff()));
      }
      std::lock_guard lock(mu);
      for (int r = 0; r < K; ++r) region_max[r] = std::max(region_max[r], local[r]);
    });
  }
  Table out = Table::Ones(n1 + 1, n2 + 1);
  for (int i = 0; i <= n1; ++i)
    for (int j = 0; j <= n2; ++j) {
      if (!eng.mask()(i, j)) continue;
      const int r = ordering.rank(i, j);
      int glo = 0;
      int ghi = G - 1;
      double a = grid.front();
      double b = grid.back();
      double gamma = 0.0;
      int key = -1;
      if (opts.berger_boos_gamma) {
        gamma = *opts.berger_boos_gamma;
        const auto range = berger_boos_range({i, n1, j, n2}, bnd, gamma);
        key = i + j;
        if (range.lower > range.upper) {
          out(i, j) = std::min(1.0, gamma);
          continue;
        }
        a = range.lower;
        b = range.upper;
        const double step = (grid.back() - grid.front()) / (G - 1);
        glo = step > 0 ? static_cast<int>(std::ceil((a - grid.front()) / step - 1e-9)) : 0;
        ghi = step > 0 ? static_cast<int>(std::floor((b - grid.front()) / step + 1e-9)) : 0;
        glo = std::clamp(glo, 0, G - 1);
        ghi = std::clamp(ghi, 0, G - 1);
      }
      auto it = cache.find({r, key});
      if (it == cache.end()) {
        const Table ind = eng.indicator(r);
        auto f = [&](double t1) { return TailEngine::prob(ind, t1, bnd.theta2(t1)); };
        double best = std::max(f(a), f(b));
        if (glo <= ghi) {
          std::vector<double> vals(ghi - glo + 1);
          for (int g = glo; g <= ghi; ++g) vals[g - glo] = V(r, g);
          best = std::max(best, *std::max_element(vals.begin(), vals.end()));
          if (opts.refine) {
            for (int k : top_local_maxima(vals, opts.refine_maxima)) {
              const double lo = std::max(a, grid[std::max(glo + k - 1, 0)]);
              const double hi = std::min(b, grid[std::min(glo + k + 1, G - 1)]);
              if (hi > lo) best = std::max(best, golden_max(f, lo, hi, opts.refine_tol));
            }
          }
        }
        if (!region_max.empty()) best = std::max(best, region_max[r]);
        it = cache.emplace(std::make_pair(r, key), std::min(1.0, best + gamma)).first;
      }
      out(i, j) = it->second;
    }
  return out;
}

SampleSpaceOrdering em_ordering(const Hypothesis& hyp, const SampleSpaceOrdering& ordering) {
  const Side side = ordering.two_sided ? Side::lower : side_for(hyp.alternative);
  const TailEngine eng(ordering, effective_mask(ordering, hyp.measure), side);
  Table t = Table::Zero(ordering.n1 + 1, ordering.n2 + 1);
  std::map<int, Table> indicators;
  for (int i = 0; i <= ordering.n1; ++i)
    for (int j = 0; j <= ordering.n2; ++j) {
      if (!eng.mask()(i, j)) continue;
      const int r = ordering.rank(i, j);
      auto it = indicators.find(r);
      if (it == indicators.end()) it = indicators.emplace(r, eng.indicator(r)).first;
      const auto mle = constrained_mle({i, ordering.n1, j, ordering.n2}, hyp.measure, hyp.beta0);
      const double p = TailEngine::prob(it->second, mle.theta1, mle.theta2);
      t(i, j) = side == Side::lower ? p : -p;
    }
  return make_ordering(t, eng.mask(), "em-" + ordering.name, ordering.two_sided);
}

double em_adjust(const TwoByTwoData& data, const Hypothesis& hyp, const SampleSpaceOrdering& ordering,
                 const UnconditionalOptions& opts) {
  check_data(data, ordering);
  UnconditionalOptions o = opts;
  o.em_iterations = 0;
  const auto em = em_ordering(hyp, ordering);
  if (ordering.two_sided) return uncond_pvalue_twosided(data, hyp, em, o);
  return uncond_pvalue_onesided(data, hyp, em, o);
}

SampleSpaceOrdering fisher_ordering(int n1, int n2, double psi0, BoschlooVariant variant, Alternative alternative,
                                    TailMode mode) {
  Table t(n1 + 1, n2 + 1);
  for (int i = 0; i <= n1; ++i)
    for (int j = 0; j <= n2; ++j) {
      const TwoByTwoData d{i, n1, j, n2};
      switch (variant) {
        case BoschlooVariant::irwin: t(i, j) = fisher_irwin(d, psi0, mode); break;
        case BoschlooVariant::central: t(i, j) = fisher_central(d, psi0, mode); break;
        case BoschlooVariant::onesided: {
          const NoncentralHypergeom h({i + j, n1, n2, psi0});
          // Mid tails are complementary, so both directions share one ordering.
          if (alternative == Alternative::greater) t(i, j) = -h.tail(j, Tail::upper, mode);
          else t(i, j) = h.tail(j, Tail::lower, mode);
          break;
        }
      }
    }
  const bool two = variant != BoschlooVariant::onesided;
  const char* names[] = {"fisher-irwin", "fisher-central", "fisher-onesided"};
  return make_ordering(t, full_mask(n1, n2), names[static_cast<int>(variant)], two);
}

double boschloo(const TwoByTwoData& data, const Hypothesis& hyp, BoschlooVariant variant, TailMode mode,
                const UnconditionalOptions& opts) {
  data.validate();
  double psi = 1.0;
  if (hyp.measure == EffectMeasure::oddsratio) psi = hyp.beta0;
  else if (hyp.beta0 != equality_value(hyp.measure))
    throw UnsupportedError("Boschloo's test orders by Fisher p-values, defined off equality only for the odds ratio");
  Hypothesis h = hyp;
  if (variant == BoschlooVariant::onesided) {
    const auto ord = fisher_ordering(data.n1, data.n2, psi, variant, hyp.alternative, mode);
    if (hyp.alternative == Alternative::two_sided_central) return uncond_pvalue(data, h, ord, opts);
    return uncond_pvalue_onesided(data, h, ord, opts);
  }
  h.alternative = variant == BoschlooVariant::irwin ? Alternative::two_sided_minlike : Alternative::two_sided_central;
  return uncond_pvalue_twosided(data, h, fisher_ordering(data.n1, data.n2, psi, variant, h.alternative, mode), opts);
}

OrderingFamily fixed_family(SampleSpaceOrdering ordering) {
  OrderingFamily f;
  f.two_sided = ordering.two_sided;
  f.name = ordering.name;
  f.beta0_free = true;
  f.make = [o = std::move(ordering)](double) { return o; };
  return f;
}

OrderingFamily score_family(int n1, int n2, EffectMeasure measure, bool two_sided) {
  OrderingFamily f;
  f.two_sided = two_sided;
  f.beta0_free = false;
  f.name = two_sided ? "score-2s" : "score";
  f.make = [=](double beta0) {
    return two_sided ? order_score_twosided(n1, n2, measure, beta0) : order_score(n1, n2, measure, beta0);
  };
  return f;
}

std::vector<double> beta_grid(EffectMeasure measure, int points) {
  if (measure == EffectMeasure::difference) return linspace(-0.9999, 0.9999, points);
  return logspace(1e-4, 1e4, points);
}

UncondCiResult uncond_ci(const TwoByTwoData& data, EffectMeasure measure, double level, const OrderingFamily& family,
                         const UnconditionalOptions& opts, const CiGridOptions& grid_opts) {
  if (!(level > 0.0 && level < 1.0)) throw std::domain_error("level must lie in (0, 1)");
  data.validate();
  const double alpha = 1.0 - level;
  UncondCiResult res;
  res.ci.level = level;
  const auto grid = beta_grid(measure, grid_opts.points);
  auto p_one = [&](double b0, Alternative alt) {
    ++res.evaluations;
    return uncond_pvalue_onesided(data, {measure, b0, alt}, family.make(b0), opts);
  };
  if (family.beta0_free && !family.two_sided) {
    // p_greater is nondecreasing and p_less nonincreasing in beta0 for a fixed BC ordering.
    const bool logs = log_scale(measure);
    auto to_beta = [&](double u) { return logs ? std::exp(u) : u; };
    const double ulo = logs ? std::log(grid.front()) : grid.front();
    const double uhi = logs ? std::log(grid.back()) : grid.back();
    const double tol = grid_opts.tol * 1e-2;
    // Limit where p - alpha / 2 changes sign, or the end of the range it never crosses.
    auto limit = [&](Alternative alt, bool rising) {
      auto g = [&](double u) { return p_one(to_beta(u), alt) - alpha / 2; };
      const double glo = g(ulo);
      const double ghi = g(uhi);
      const bool in_lo = rising ? glo > 0 : glo <= 0;
      const bool in_hi = rising ? ghi > 0 : ghi <= 0;
      if (in_lo) return measure_min(measure);
      if (!in_hi) return measure_max(measure);
      if (glo == 0.0 || ghi == 0.0) return to_beta(glo == 0.0 ? ulo : uhi);
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(
          g, ulo, uhi, glo, ghi, [&](double a, double b) { return std::fabs(b - a) <= tol; }, iters);
      return to_beta(0.5 * (r.first + r.second));
    };
    res.ci.lower = limit(Alternative::greater, true);
    res.ci.upper = limit(Alternative::less, false);
    res.ci.central = true;
    res.region = {{res.ci.lower, res.ci.upper}};
    return res;
  }
  auto pfun = [&](double b0) {
    const auto ord = family.make(b0);
    ++res.evaluations;
    if (family.two_sided) return uncond_pvalue_twosided(data, {measure, b0, Alternative::two_sided_minlike}, ord, opts);
    const double pl = uncond_pvalue_onesided(data, {measure, b0, Alternative::less}, ord, opts);
    const double pg = uncond_pvalue_onesided(data, {measure, b0, Alternative::greater}, ord, opts);
    return std::min({1.0, 2.0 * pl, 2.0 * pg});
  };
  std::vector<double> pv(grid.size());
  for (size_t k = 0; k < grid.size(); ++k) pv[k] = pfun(grid[k]);
  size_t k = 0;
  auto p_at = [&](double b0) {
    // Grid points reuse the tabulated values; points between them are evaluated.
    if (k < grid.size() && grid[k] == b0) return pv[k++];
    auto it = std::lower_bound(grid.begin(), grid.end(), b0);
    if (it != grid.end() && *it == b0) return pv[it - grid.begin()];
    return pfun(b0);
  };
  res.region = scan_region(p_at, alpha, grid, grid_opts.tol, measure_min(measure), measure_max(measure));
  // Directional coherence: p rises to its peak and falls after it.
  const size_t peak = std::max_element(pv.begin(), pv.end()) - pv.begin();
  for (size_t i = 1; i < pv.size(); ++i) {
    const bool rising = i <= peak;
    if (rising ? pv[i] < pv[i - 1] - 1e-12 : pv[i] > pv[i - 1] + 1e-12) res.coherent = false;
  }
  res.ci.central = !family.two_sided;
  if (res.region.empty()) {
    // Empty region: degenerate interval at the peak of the p-value function.
    res.ci.lower = res.ci.upper = grid[peak];
  } else {
    res.ci.lower = res.region.front().lower;
    res.ci.upper = res.region.back().upper;
    res.ci.holes_filled = res.region.size() > 1;
  }
  return res;
}

}  // namespace twobinom
