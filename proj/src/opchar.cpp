#include "twobinom/opchar.hpp"

#include "twobinom/boundary.hpp"
#include "twobinom/distributions.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>

namespace twobinom {

namespace {

std::string method_key(const MethodSpec& m, int n1, int n2, double a, const Hypothesis& h) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "|%d|%d|%.17g|%s|%s|%.17g|%.17g|%d|%d|%d", n1, n2, a,
                std::string(to_string(h.measure)).c_str(), std::string(to_string(h.alternative)).c_str(), h.beta0,
                m.berger_boos_gamma.value_or(-1.0), m.uncond.grid_points, m.uncond.region_grid_points,
                static_cast<int>(m.measure));
  return m.name() + buf;
}

std::mutex cache_mu;
std::map<std::string, std::shared_ptr<const RejectionSet>> rejection_cache;
std::map<std::string, std::shared_ptr<const std::vector<ConfidenceInterval>>> ci_cache;

Eigen::MatrixXd pmf_columns(int n, const std::vector<double>& thetas) {
  Eigen::MatrixXd b(n + 1, static_cast<Eigen::Index>(thetas.size()));
  for (size_t j = 0; j < thetas.size(); ++j) b.col(static_cast<Eigen::Index>(j)) = binom_pmf_vector(n, thetas[j]);
  return b;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::shared_ptr<const RejectionSet> rejection_set(const MethodSpec& method, int n1, int n2, double alpha,
                                                  const Hypothesis& hyp) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in [0, 1)");
  const auto key = method_key(method, n1, n2, alpha, hyp);
  {
    std::lock_guard lock(cache_mu);
    if (auto it = rejection_cache.find(key); it != rejection_cache.end()) return it->second;
  }
  auto rs = std::make_shared<RejectionSet>();
  rs->method = method.name();
  rs->hypothesis = hyp;
  rs->alpha = alpha;
  rs->n1 = n1;
  rs->n2 = n2;
  MethodSpec m = method;
  m.measure = hyp.measure;
  rs->pvalues = method_pvalue_table(m, n1, n2, hyp);
  rs->reject = (rs->pvalues.array() <= alpha).matrix();
  if (alpha == 0.0) rs->reject.setConstant(false);
  std::lock_guard lock(cache_mu);
  return rejection_cache.emplace(key, std::move(rs)).first->second;
}

void clear_rejection_cache() {
  std::lock_guard lock(cache_mu);
  rejection_cache.clear();
  ci_cache.clear();
}

double rejection_probability(const RejectionSet& rs, double theta1, double theta2) {
  const Eigen::VectorXd b1 = binom_pmf_vector(rs.n1, theta1);
  const Eigen::VectorXd b2 = binom_pmf_vector(rs.n2, theta2);
  return b1.dot(rs.reject.cast<double>() * b2);
}

double exact_power(const MethodSpec& method, int n1, int n2, double theta1, double theta2, double alpha,
                   const Hypothesis& hyp) {
  return rejection_probability(*rejection_set(method, n1, n2, alpha, hyp), theta1, theta2);
}

SizeResult exact_size(const MethodSpec& method, int n1, int n2, double alpha, const Hypothesis& hyp,
                      int boundary_points) {
  SizeResult out;
  if (alpha == 0.0) return out;
  const auto rs = rejection_set(method, n1, n2, alpha, hyp);
  const NullBoundary nb{hyp.measure, hyp.beta0};
  auto f = [&](double t1) { return rejection_probability(*rs, t1, nb.theta2(t1)); };
  const auto sup = maximize_on_interval(f, nb.theta1_lo(), nb.theta1_hi(), {boundary_points, true, 1, 1e-8});
  out.size = sup.value;
  out.theta1 = sup.argmax;
  out.theta2 = nb.theta2(sup.argmax);
  out.grid_modulus = sup.grid_modulus;
  return out;
}

ExceedanceCensus exceedance_census(const MethodSpec& method, const std::vector<int>& sample_sizes, double alpha,
                                   const Hypothesis& hyp, const std::vector<double>& thetas) {
  ExceedanceCensus c;
  const NullBoundary nb{hyp.measure, hyp.beta0};
  for (int n1 : sample_sizes)
    for (int n2 : sample_sizes) {
      const auto rs = rejection_set(method, n1, n2, alpha, hyp);
      for (double t : thetas) {
        if (t < nb.theta1_lo() || t > nb.theta1_hi()) continue;
        ++c.scenarios;
        if (rejection_probability(*rs, t, nb.theta2(t)) <= alpha) ++c.within;
      }
    }
  return c;
}

OperatingGrid power_grid(const MethodSpec& method, int n1, int n2, double alpha, const Hypothesis& hyp,
                         const GridSpec& grid) {
  OperatingGrid g;
  g.quantity = "power";
  g.method = method.name();
  g.n1 = n1;
  g.n2 = n2;
  g.alpha = alpha;
  g.theta1_grid = grid.values();
  g.theta2_grid = grid.values();
  const auto rs = rejection_set(method, n1, n2, alpha, hyp);
  const Eigen::MatrixXd b1 = pmf_columns(n1, g.theta1_grid);
  const Eigen::MatrixXd b2 = pmf_columns(n2, g.theta2_grid);
  g.values = b1.transpose() * rs->reject.cast<double>() * b2;
  return g;
}

OperatingGrid power_difference(const MethodSpec& a, const MethodSpec& b, int n1, int n2, double alpha,
                               const Hypothesis& hyp, const GridSpec& grid) {
  OperatingGrid ga = power_grid(a, n1, n2, alpha, hyp, grid);
  const OperatingGrid gb = power_grid(b, n1, n2, alpha, hyp, grid);
  ga.quantity = "power_difference";
  ga.method = a.name() + " - " + b.name();
  ga.values -= gb.values;
  return ga;
}

GridSummary summarize(const OperatingGrid& grid, double band) {
  GridSummary s;
  s.band = band;
  const auto& v = grid.values;
  if (v.size() == 0) return s;
  s.max = v.maxCoeff();
  s.min = v.minCoeff();
  const double n = static_cast<double>(v.size());
  s.fraction_above = (v.array() > band).count() / n;
  s.fraction_below = (v.array() < -band).count() / n;
  s.fraction_within = 1.0 - s.fraction_above - s.fraction_below;
  return s;
}

std::string grid_to_csv(const OperatingGrid& grid) {
  std::ostringstream os;
  os << "theta1\\theta2";
  for (double t : grid.theta2_grid) os << ',' << fmt(t);
  os << '\n';
  for (Eigen::Index i = 0; i < grid.values.rows(); ++i) {
    os << fmt(grid.theta1_grid[static_cast<size_t>(i)]);
    for (Eigen::Index j = 0; j < grid.values.cols(); ++j) os << ',' << fmt(grid.values(i, j));
    os << '\n';
  }
  return os.str();
}

std::shared_ptr<const std::vector<ConfidenceInterval>> ci_table(const MethodSpec& method, int n1, int n2,
                                                                double level) {
  const auto key = method_key(method, n1, n2, level, {method.measure, 0.0, Alternative::two_sided_central});
  {
    std::lock_guard lock(cache_mu);
    if (auto it = ci_cache.find(key); it != ci_cache.end()) return it->second;
  }
  auto cis = std::make_shared<std::vector<ConfidenceInterval>>();
  const auto tables = method_ci_tables(method, n1, n2, {level});
  for (const auto& mi : tables.front()) cis->push_back(mi.ci);
  std::lock_guard lock(cache_mu);
  return ci_cache.emplace(key, std::move(cis)).first->second;
}

ExpectedLength expected_ci_length(const MethodSpec& method, int n1, int n2, double theta1, double theta2, double level,
                                  double cap) {
  const auto cis = ci_table(method, n1, n2, level);
  const Eigen::VectorXd b1 = binom_pmf_vector(n1, theta1);
  const Eigen::VectorXd b2 = binom_pmf_vector(n2, theta2);
  ExpectedLength out;
  for (int x1 = 0; x1 <= n1; ++x1)
    for (int x2 = 0; x2 <= n2; ++x2) {
      const auto& ci = (*cis)[static_cast<size_t>(x1 * (n2 + 1) + x2)];
      const double w = b1(x1) * b2(x2);
      double hi = ci.upper;
      if (!std::isfinite(hi)) {
        hi = cap;
        out.truncated = true;
        out.truncated_probability += w;
      }
      out.length += w * std::max(0.0, hi - ci.lower);
    }
  return out;
}

}  // namespace twobinom
