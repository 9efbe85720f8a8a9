#include "twobinom/orderings.hpp"

#include "twobinom/boundary.hpp"
#include "twobinom/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace twobinom {

bool tied(double a, double b, double rel_tol) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  return std::fabs(a - b) <= rel_tol * std::max(std::fabs(a), std::fabs(b));
}

Mask full_mask(int n1, int n2) { return Mask::Constant(n1 + 1, n2 + 1, true); }

Mask informative_mask(int n1, int n2, EffectMeasure measure) {
  Mask m = full_mask(n1, n2);
  if (measure != EffectMeasure::difference) m(0, 0) = false;
  if (measure == EffectMeasure::oddsratio) m(n1, n2) = false;
  return m;
}

namespace {

std::vector<Point> masked_points(const Mask& mask) {
  std::vector<Point> pts;
  for (int i = 0; i < mask.rows(); ++i)
    for (int j = 0; j < mask.cols(); ++j)
      if (mask(i, j)) pts.push_back({i, j});
  return pts;
}

// Splits the classes in `cls` by `key`, with tolerant tie detection inside each class.
void refine_classes(std::vector<Point>& pts, RankTable& cls, const Table& key, int& num) {
  std::stable_sort(pts.begin(), pts.end(), [&](Point a, Point b) {
    const int ca = cls(a.x1, a.x2);
    const int cb = cls(b.x1, b.x2);
    if (ca != cb) return ca < cb;
    return key(a.x1, a.x2) < key(b.x1, b.x2);
  });
  RankTable out = RankTable::Constant(cls.rows(), cls.cols(), -1);
  int next = -1;
  for (size_t i = 0; i < pts.size(); ++i) {
    const Point p = pts[i];
    if (i == 0) {
      next = 0;
    } else {
      const Point q = pts[i - 1];
      if (cls(p.x1, p.x2) != cls(q.x1, q.x2) || !tied(key(p.x1, p.x2), key(q.x1, q.x2))) ++next;
    }
    out(p.x1, p.x2) = next;
  }
  cls = out;
  num = next + 1;
}

SampleSpaceOrdering finish(int n1, int n2, Table t, const Mask& mask, RankTable ranks, int num, std::string name,
                           bool two_sided) {
  SampleSpaceOrdering ord;
  ord.n1 = n1;
  ord.n2 = n2;
  for (int i = 0; i <= n1; ++i)
    for (int j = 0; j <= n2; ++j)
      if (!mask(i, j)) t(i, j) = std::nan("");
  ord.t_values = std::move(t);
  ord.informative = mask;
  ord.rank_ids = std::move(ranks);
  ord.num_ranks = num;
  ord.two_sided = two_sided;
  ord.name = std::move(name);
  ord.bc_certified = !two_sided && check_bc(ord).pass;
  return ord;
}

}  // namespace

SampleSpaceOrdering make_ordering(const Table& t, const Mask& informative, std::string name, bool two_sided) {
  return make_lexicographic_ordering({t}, informative, std::move(name), two_sided);
}

SampleSpaceOrdering make_lexicographic_ordering(const std::vector<Table>& keys, const Mask& informative,
                                                std::string name, bool two_sided) {
  if (keys.empty()) throw std::invalid_argument("ordering needs at least one key");
  const int n1 = static_cast<int>(keys[0].rows()) - 1;
  const int n2 = static_cast<int>(keys[0].cols()) - 1;
  auto pts = masked_points(informative);
  for (const auto& k : keys)
    for (Point p : pts)
      if (std::isnan(k(p.x1, p.x2)))
        throw std::domain_error("ordering value undefined at an informative point of " + name);
  RankTable cls = RankTable::Zero(n1 + 1, n2 + 1);
  int num = 0;
  for (const auto& k : keys) refine_classes(pts, cls, k, num);
  Table t = keys.size() == 1 ? keys[0] : cls.cast<double>();
  return finish(n1, n2, std::move(t), informative, std::move(cls), num, std::move(name), two_sided);
}

SampleSpaceOrdering with_mask(const SampleSpaceOrdering& ord, const Mask& informative) {
  Table t = ord.t_values;
  for (int i = 0; i <= ord.n1; ++i)
    for (int j = 0; j <= ord.n2; ++j)
      if (std::isnan(t(i, j)) && informative(i, j))
        throw std::domain_error("cannot unmask a point without an ordering value");
  // Ranks are recomputed from the stored ranks so multi-key orderings keep their ties.
  Table key = ord.rank_ids.cast<double>();
  auto out = make_ordering(key, informative, ord.name, ord.two_sided);
  for (int i = 0; i <= ord.n1; ++i)
    for (int j = 0; j <= ord.n2; ++j) out.t_values(i, j) = informative(i, j) ? t(i, j) : std::nan("");
  return out;
}

SampleSpaceOrdering negated(const SampleSpaceOrdering& ord) {
  SampleSpaceOrdering out = ord;
  out.t_values = -ord.t_values;
  for (int i = 0; i <= ord.n1; ++i)
    for (int j = 0; j <= ord.n2; ++j)
      if (ord.informative(i, j)) out.rank_ids(i, j) = ord.num_ranks - 1 - ord.rank_ids(i, j);
  out.name = "-" + ord.name;
  out.bc_certified = !out.two_sided && check_bc(out).pass;
  return out;
}

// ---------------------------------------------------------------------------
// Statistics on the grid.

double pooled_z(const TwoByTwoData& d) {
  const long num = static_cast<long>(d.x2) * d.n1 - static_cast<long>(d.x1) * d.n2;
  if (num == 0) return 0.0;
  const double nn = d.n1 + d.n2;
  const double pbar = (d.x1 + d.x2) / nn;
  const double var = pbar * (1.0 - pbar) * (1.0 / d.n1 + 1.0 / d.n2);
  const double diff = static_cast<double>(num) / (static_cast<double>(d.n1) * d.n2);
  if (var <= 0.0) return std::copysign(kInf, diff);
  return diff / std::sqrt(var);
}

namespace {

double boundary_loglik(const TwoByTwoData& d, double t1, double t2) {
  auto term = [](int x, int n, double t) {
    double v = 0.0;
    if (x > 0) v += x * std::log(t);
    if (n - x > 0) v += (n - x) * std::log1p(-t);
    return v;
  };
  return term(d.x1, d.n1, t1) + term(d.x2, d.n2, t2);
}

bool feasible(const NullBoundary& b, ConstrainedMle m) {
  constexpr double eps = 1e-9;
  return std::isfinite(m.theta1) && std::isfinite(m.theta2) && m.theta1 >= b.theta1_lo() - eps &&
         m.theta1 <= b.theta1_hi() + eps && m.theta2 >= -eps && m.theta2 <= 1.0 + eps;
}

}  // namespace

ConstrainedMle constrained_mle_numeric(const TwoByTwoData& d, EffectMeasure measure, double beta0) {
  const NullBoundary b{measure, beta0};
  auto f = [&](double t1) {
    const double v = boundary_loglik(d, t1, b.theta2(t1));
    return std::isnan(v) ? -kInf : v;
  };
  double x = 0.0;
  golden_max(f, b.theta1_lo(), b.theta1_hi(), 1e-13, &x);
  // The maximum may sit on an end point of the boundary.
  for (double e : {b.theta1_lo(), b.theta1_hi()})
    if (f(e) >= f(x)) x = e;
  return {x, b.theta2(x)};
}

ConstrainedMle constrained_mle(const TwoByTwoData& d, EffectMeasure measure, double beta0) {
  const NullBoundary bnd{measure, beta0};
  const double th1 = d.theta1_hat();
  const double th2 = d.theta2_hat();
  ConstrainedMle m;
  switch (measure) {
    case EffectMeasure::difference: {
      // Farrington-Manning cubic with group 2 as the leading group: theta2 - theta1 = beta0.
      const double delta = beta0;
      const double ratio = static_cast<double>(d.n1) / d.n2;
      const double a = 1.0 + ratio;
      const double b = -(1.0 + ratio + th2 + ratio * th1 + delta * (ratio + 2.0));
      const double c = delta * delta + delta * (2.0 * th2 + ratio + 1.0) + th2 + ratio * th1;
      const double dd = -th2 * delta * (1.0 + delta);
      const double v = b * b * b / (27.0 * a * a * a) - b * c / (6.0 * a * a) + dd / (2.0 * a);
      const double u2 = b * b / (9.0 * a * a) - c / (3.0 * a);
      if (u2 <= 0.0) return constrained_mle_numeric(d, measure, beta0);
      const double u = (v >= 0.0 ? 1.0 : -1.0) * std::sqrt(u2);
      const double w = (M_PI + std::acos(std::clamp(v / (u * u * u), -1.0, 1.0))) / 3.0;
      m.theta2 = 2.0 * u * std::cos(w) - b / (3.0 * a);
      m.theta1 = m.theta2 - delta;
      break;
    }
    case EffectMeasure::ratio: {
      // theta2 = beta0 * theta1; quadratic in theta1.
      const double nn = d.n1 + d.n2;
      const double A = nn * beta0;
      const double B = -(d.n2 * beta0 + d.x2 + d.n1 + d.x1 * beta0);
      const double C = d.x1 + d.x2;
      const double disc = std::max(0.0, B * B - 4.0 * A * C);
      m.theta1 = (-B - std::sqrt(disc)) / (2.0 * A);
      m.theta2 = beta0 * m.theta1;
      break;
    }
    case EffectMeasure::oddsratio: {
      // Logistic model: n1*theta1 + n2*theta2 = s on the boundary.
      const double s = d.x1 + d.x2;
      if (s == 0.0) return {0.0, 0.0};
      if (s == d.n1 + d.n2) return {1.0, 1.0};
      const double A = (beta0 - 1.0) * d.n1;
      const double B = d.n1 + d.n2 * beta0 - s * (beta0 - 1.0);
      m.theta1 = 2.0 * s / (B + std::sqrt(std::max(0.0, B * B + 4.0 * A * s)));
      m.theta2 = bnd.theta2(m.theta1);
      break;
    }
  }
  if (!feasible(bnd, m)) return constrained_mle_numeric(d, measure, beta0);
  m.theta1 = std::clamp(m.theta1, bnd.theta1_lo(), bnd.theta1_hi());
  m.theta2 = std::clamp(m.theta2, 0.0, 1.0);
  return m;
}

double score_statistic(const TwoByTwoData& d, EffectMeasure measure, double beta0) {
  const double th1 = d.theta1_hat();
  const double th2 = d.theta2_hat();
  const auto m = constrained_mle(d, measure, beta0);
  const double v1 = m.theta1 * (1.0 - m.theta1);
  const double v2 = m.theta2 * (1.0 - m.theta2);
  double num = 0.0;
  double var = 0.0;
  switch (measure) {
    case EffectMeasure::difference:
      num = th2 - th1 - beta0;
      var = v1 / d.n1 + v2 / d.n2;
      break;
    case EffectMeasure::ratio:
      num = th2 - beta0 * th1;
      var = v2 / d.n2 + beta0 * beta0 * v1 / d.n1;
      break;
    case EffectMeasure::oddsratio: {
      num = d.x2 - d.n2 * m.theta2;
      if (v1 <= 0.0 || v2 <= 0.0) {
        var = 0.0;
      } else {
        var = 1.0 / (1.0 / (d.n1 * v1) + 1.0 / (d.n2 * v2));
      }
      break;
    }
  }
  if (std::fabs(num) < 1e-14) return 0.0;
  if (var <= 0.0) return std::copysign(kInf, num);
  return num / std::sqrt(var);
}

// ---------------------------------------------------------------------------
// Orderings.

namespace {

template <class F>
Table tabulate(int n1, int n2, F&& f) {
  Table t(n1 + 1, n2 + 1);
  for (int i = 0; i <= n1; ++i)
    for (int j = 0; j <= n2; ++j) t(i, j) = f(i, j);
  return t;
}

Table diff_table(int n1, int n2) {
  // Exact rational x2/n2 - x1/n1, so structurally equal fractions give identical doubles.
  const double den = static_cast<double>(n1) * n2;
  return tabulate(n1, n2, [&](int i, int j) {
    return static_cast<double>(static_cast<long>(j) * n1 - static_cast<long>(i) * n2) / den;
  });
}

Table pooled_z_table(int n1, int n2) {
  return tabulate(n1, n2, [&](int i, int j) { return pooled_z({i, n1, j, n2}); });
}

}  // namespace

SampleSpaceOrdering order_diff(int n1, int n2) {
  return make_ordering(diff_table(n1, n2), full_mask(n1, n2), "diff");
}

SampleSpaceOrdering order_diff_tiebreak(int n1, int n2) {
  return make_lexicographic_ordering({diff_table(n1, n2), pooled_z_table(n1, n2)}, full_mask(n1, n2), "diff-tb");
}

SampleSpaceOrdering order_wald_pooled(int n1, int n2) {
  return make_ordering(pooled_z_table(n1, n2), full_mask(n1, n2), "wald-pooled");
}

SampleSpaceOrdering order_wald_pooled_twosided(int n1, int n2) {
  Table z = pooled_z_table(n1, n2);
  return make_ordering(-z.cwiseProduct(z), full_mask(n1, n2), "wald-pooled-2s", true);
}

SampleSpaceOrdering order_score(int n1, int n2, EffectMeasure measure, double beta0) {
  validate_beta0(measure, beta0);
  Table t = tabulate(n1, n2, [&](int i, int j) { return score_statistic({i, n1, j, n2}, measure, beta0); });
  return make_ordering(t, full_mask(n1, n2), "score-" + std::string(to_string(measure)));
}

SampleSpaceOrdering order_score_twosided(int n1, int n2, EffectMeasure measure, double beta0) {
  validate_beta0(measure, beta0);
  Table t = tabulate(n1, n2, [&](int i, int j) {
    const double z = score_statistic({i, n1, j, n2}, measure, beta0);
    return -z * z;
  });
  return make_ordering(t, full_mask(n1, n2), "score-2s-" + std::string(to_string(measure)), true);
}

SampleSpaceOrdering order_fisher_midp(int n1, int n2) {
  Table t(n1 + 1, n2 + 1);
  for (int s = 0; s <= n1 + n2; ++s) {
    const NoncentralHypergeom h({s, n1, n2, 1.0});
    for (int x2 = h.lo(); x2 <= h.hi(); ++x2) t(s - x2, x2) = h.tail(x2, Tail::lower, TailMode::mid);
  }
  return make_ordering(t, full_mask(n1, n2), "fisher-midp");
}

SampleSpaceOrdering order_estimate(int n1, int n2, EffectMeasure measure) {
  if (measure == EffectMeasure::difference) {
    auto o = order_diff_tiebreak(n1, n2);
    o.name = "estimate-difference";
    return o;
  }
  Table est = tabulate(n1, n2, [&](int i, int j) {
    double num = 0.0;
    double den = 0.0;
    if (measure == EffectMeasure::ratio) {
      num = static_cast<double>(j) * n1;
      den = static_cast<double>(i) * n2;
    } else {
      num = static_cast<double>(j) * (n1 - i);
      den = static_cast<double>(i) * (n2 - j);
    }
    if (den == 0.0) return num == 0.0 ? std::nan("") : kInf;
    return num / den;
  });
  return make_lexicographic_ordering({est, pooled_z_table(n1, n2)}, informative_mask(n1, n2, measure),
                                     "estimate-" + std::string(to_string(measure)));
}

// ---------------------------------------------------------------------------
// BC conditions and refinement.

BcReport check_bc(const SampleSpaceOrdering& ord) {
  BcReport rep;
  // Increasing x2 within a row must not lower the rank.
  for (int i = 0; i <= ord.n1; ++i) {
    int prev = -1;
    for (int j = 0; j <= ord.n2; ++j) {
      if (!ord.informative(i, j)) continue;
      if (prev >= 0 && ord.rank_ids(i, j) < ord.rank_ids(i, prev)) {
        rep.pass = false;
        rep.violation = std::make_pair(Point{i, prev}, Point{i, j});
        return rep;
      }
      prev = j;
    }
  }
  // Decreasing x1 within a column must not lower the rank.
  for (int j = 0; j <= ord.n2; ++j) {
    int prev = -1;
    for (int i = ord.n1; i >= 0; --i) {
      if (!ord.informative(i, j)) continue;
      if (prev >= 0 && ord.rank_ids(i, j) < ord.rank_ids(prev, j)) {
        rep.pass = false;
        rep.violation = std::make_pair(Point{prev, j}, Point{i, j});
        return rep;
      }
      prev = i;
    }
  }
  return rep;
}

bool is_refinement(const SampleSpaceOrdering& fine, const SampleSpaceOrdering& coarse) {
  if (fine.n1 != coarse.n1 || fine.n2 != coarse.n2) throw std::invalid_argument("orderings differ in size");
  if (fine.informative != coarse.informative) throw std::invalid_argument("orderings differ in informative set");
  auto pts = masked_points(fine.informative);
  std::sort(pts.begin(), pts.end(), [&](Point a, Point b) {
    if (fine.rank(a) != fine.rank(b)) return fine.rank(a) < fine.rank(b);
    return coarse.rank(a) < coarse.rank(b);
  });
  for (size_t k = 1; k < pts.size(); ++k) {
    const Point a = pts[k - 1];
    const Point b = pts[k];
    if (fine.rank(a) == fine.rank(b) && coarse.rank(a) != coarse.rank(b)) return false;
    if (coarse.rank(a) > coarse.rank(b)) return false;
  }
  return true;
}

std::string ordering_to_csv(const SampleSpaceOrdering& ord) {
  std::ostringstream os;
  os << "x1\\x2";
  for (int j = 0; j <= ord.n2; ++j) os << ',' << j;
  os << '\n';
  char buf[64];
  for (int i = 0; i <= ord.n1; ++i) {
    os << i;
    for (int j = 0; j <= ord.n2; ++j) {
      if (!ord.informative(i, j)) {
        os << ",NA";
      } else {
        std::snprintf(buf, sizeof buf, "%.10g", ord.t_values(i, j));
        os << ',' << buf;
      }
    }
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// CSM.

CsmBuilder::CsmBuilder(int n1, int n2, CsmVariant variant, CsmOptions opts)
    : n1_(n1), n2_(n2), variant_(variant), opts_(opts) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("CSM ordering requires n1, n2 >= 1");
  const long pts = static_cast<long>(n1 + 1) * (n2 + 1);
  if (pts > opts.max_points)
    throw ResourceError("CSM ordering over " + std::to_string(pts) + " sample points exceeds the budget of " +
                        std::to_string(opts.max_points));
  total_ = static_cast<int>(pts);
  grid_ = linspace(0.0, 1.0, std::max(opts.sup.grid_points, 3));
  const int g = static_cast<int>(grid_.size());
  b1_.resize(g, n1 + 1);
  b2_.resize(g, n2 + 1);
  for (int k = 0; k < g; ++k) {
    b1_.row(k) = binom_pmf_vector(n1, grid_[k]).transpose();
    b2_.row(k) = binom_pmf_vector(n2, grid_[k]).transpose();
  }
  region_prob_grid_ = Eigen::VectorXd::Zero(g);
  region_ = Mask::Constant(n1 + 1, n2 + 1, false);
  grown_ = region_;
  rank_ = RankTable::Constant(n1 + 1, n2 + 1, 0);
}

bool CsmBuilder::addable(int x1, int x2) const {
  if (grown_(x1, x2)) return false;
  if (variant_ == CsmVariant::top_down)
    return (x2 == n2_ || grown_(x1, x2 + 1)) && (x1 == 0 || grown_(x1 - 1, x2));
  return (x2 == 0 || grown_(x1, x2 - 1)) && (x1 == n1_ || grown_(x1 + 1, x2));
}

std::vector<Point> CsmBuilder::frontier() const {
  std::vector<Point> out;
  for (int i = 0; i <= n1_; ++i)
    for (int j = 0; j <= n2_; ++j)
      if (addable(i, j)) out.push_back({i, j});
  return out;
}

void CsmBuilder::admit(Point p, int rank, bool grow) {
  if (grow) grown_(p.x1, p.x2) = true;
  if (region_(p.x1, p.x2)) return;
  region_(p.x1, p.x2) = true;
  rank_(p.x1, p.x2) = rank;
  ++assigned_;
  region_prob_grid_ += b1_.col(p.x1).cwiseProduct(b2_.col(p.x2));
}

void CsmBuilder::absorb_free_points() {
  // Two-sided: points already ranked through their mirror image join the growth side for free.
  if (variant_ != CsmVariant::two_sided) return;
  bool changed = true;
  while (changed) {
    changed = false;
    for (Point p : frontier())
      if (region_(p.x1, p.x2)) {
        grown_(p.x1, p.x2) = true;
        changed = true;
      }
  }
}

double CsmBuilder::region_prob(double theta, const std::vector<Point>& extra) const {
  const Eigen::VectorXd b1 = binom_pmf_vector(n1_, theta);
  const Eigen::VectorXd b2 = binom_pmf_vector(n2_, theta);
  double acc = 0.0;
  for (int i = 0; i <= n1_; ++i)
    for (int j = 0; j <= n2_; ++j)
      if (region_(i, j)) acc += b1(i) * b2(j);
  for (Point p : extra) acc += b1(p.x1) * b2(p.x2);
  return acc;
}

std::vector<Point> CsmBuilder::step() {
  if (done()) return {};
  const auto cands = frontier();
  std::vector<double> pvals(cands.size());
  const int last = static_cast<int>(grid_.size()) - 1;
  for (size_t c = 0; c < cands.size(); ++c) {
    std::vector<Point> extra{cands[c]};
    if (variant_ == CsmVariant::two_sided && !(sym(cands[c]) == cands[c])) extra.push_back(sym(cands[c]));
    Eigen::VectorXd vals = region_prob_grid_;
    for (Point p : extra) vals += b1_.col(p.x1).cwiseProduct(b2_.col(p.x2));
    std::vector<double> v(vals.data(), vals.data() + vals.size());
    double best = *std::max_element(v.begin(), v.end());
    if (opts_.sup.refine) {
      for (int k : top_local_maxima(v, opts_.sup.refine_maxima)) {
        auto f = [&](double th) { return region_prob(th, extra); };
        best = std::max(best, golden_max(f, grid_[std::max(k - 1, 0)], grid_[std::min(k + 1, last)],
                                         opts_.sup.refine_tol));
      }
    }
    pvals[c] = best;
  }
  const double pmin = *std::min_element(pvals.begin(), pvals.end());
  ++step_;
  std::vector<Point> admitted;
  for (size_t c = 0; c < cands.size(); ++c) {
    if (pvals[c] <= pmin * (1.0 + opts_.tie_tol) + 1e-300) {
      admitted.push_back(cands[c]);
      admit(cands[c], step_, true);
      if (variant_ == CsmVariant::two_sided) admit(sym(cands[c]), step_, false);
    }
  }
  absorb_free_points();
  return admitted;
}

SampleSpaceOrdering CsmBuilder::result() const {
  if (!done()) throw std::logic_error("CSM construction not finished");
  Table t = rank_.cast<double>();
  std::string name;
  switch (variant_) {
    case CsmVariant::bottom_up: name = "csm-bottom-up"; break;
    case CsmVariant::top_down:
      t = -t;
      name = "csm-top-down";
      break;
    case CsmVariant::two_sided: name = "csm-two-sided"; break;
  }
  return make_ordering(t, full_mask(n1_, n2_), name, variant_ == CsmVariant::two_sided);
}

SampleSpaceOrdering order_csm(int n1, int n2, CsmVariant variant, const CsmOptions& opts) {
  CsmBuilder b(n1, n2, variant, opts);
  while (!b.done()) b.step();
  return b.result();
}

CsmComparison compare_csm_orderings(int n1, int n2, const CsmOptions& opts) {
  const auto up = order_csm(n1, n2, CsmVariant::bottom_up, opts);
  const auto down = order_csm(n1, n2, CsmVariant::top_down, opts);
  CsmComparison cmp;
  const auto pts = masked_points(up.informative);
  for (size_t a = 0; a < pts.size(); ++a)
    for (size_t b = 0; b < pts.size(); ++b) {
      if (up.rank(pts[a]) < up.rank(pts[b]) && down.rank(pts[a]) > down.rank(pts[b]))
        cmp.discordant.emplace_back(pts[a], pts[b]);
    }
  cmp.equivalent = cmp.discordant.empty() && is_refinement(up, down) && is_refinement(down, up);
  return cmp;
}

}  // namespace twobinom
