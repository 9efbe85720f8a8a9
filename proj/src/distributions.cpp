#include "twobinom/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace twobinom {

namespace {

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Continued fraction for I_x(a, b), modified Lentz. Converges fast for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIter = 20000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

namespace {

constexpr int kLogFactorialTable = 4096;

const std::vector<double>& log_factorials() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLogFactorialTable + 1);
    for (int k = 0; k <= kLogFactorialTable; ++k) t[k] = std::lgamma(k + 1.0);
    return t;
  }();
  return table;
}

double log_factorial(int k) { return k <= kLogFactorialTable ? log_factorials()[k] : std::lgamma(k + 1.0); }

}  // namespace

double log_choose(int n, int k) {
  if (k < 0 || k > n) return -kInf;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double binom_pmf(int k, BinomialParams params) {
  const int n = params.n;
  const double th = params.theta;
  if (n < 0) throw std::domain_error("binomial n must be >= 0");
  if (!(th >= 0.0 && th <= 1.0)) throw std::domain_error("binomial theta must lie in [0, 1]");
  if (k < 0 || k > n)
    throw std::domain_error("binomial k=" + std::to_string(k) + " outside [0, " + std::to_string(n) + "]");
  if (th == 0.0) return k == 0 ? 1.0 : 0.0;
  if (th == 1.0) return k == n ? 1.0 : 0.0;
  return std::exp(log_choose(n, k) + k * std::log(th) + (n - k) * std::log1p(-th));
}

void binom_pmf_fill(int n, double theta, Eigen::Ref<Eigen::VectorXd> out) {
  out.setZero();
  if (theta <= 0.0) {
    out(0) = 1.0;
    return;
  }
  if (theta >= 1.0) {
    out(n) = 1.0;
    return;
  }
  // Anchor at the mode, then step outwards with the pmf ratio.
  const int mode = std::clamp(static_cast<int>(std::floor((n + 1) * theta)), 0, n);
  out(mode) = std::exp(log_choose(n, mode) + mode * std::log(theta) + (n - mode) * std::log1p(-theta));
  const double odds = theta / (1.0 - theta);
  for (int k = mode; k < n; ++k) out(k + 1) = out(k) * odds * (n - k) / (k + 1);
  for (int k = mode; k > 0; --k) out(k - 1) = out(k) / odds * k / (n - k + 1);
}

Eigen::VectorXd binom_pmf_vector(int n, double theta) {
  Eigen::VectorXd out(n + 1);
  binom_pmf_fill(n, theta, out);
  return out;
}

double central_hypergeom_pmf(int x2, int s, int n1, int n2) {
  const int lo = std::max(0, s - n1);
  const int hi = std::min(s, n2);
  if (x2 < lo || x2 > hi) throw std::domain_error("hypergeometric x2 outside support");
  return std::exp(log_choose(n1, s - x2) + log_choose(n2, x2) - log_choose(n1 + n2, s));
}

NoncentralHypergeom::NoncentralHypergeom(NoncentralHypergeomParams params) : params_(params) {
  const int s = params.s;
  const int n1 = params.n1;
  const int n2 = params.n2;
  if (n1 < 0 || n2 < 0 || s < 0 || s > n1 + n2)
    throw std::domain_error("noncentral hypergeometric requires 0 <= s <= n1 + n2");
  if (!(params.psi >= 0.0)) throw std::domain_error("noncentral hypergeometric psi must be >= 0");
  lo_ = std::max(0, s - n1);
  hi_ = std::min(s, n2);
  const int len = hi_ - lo_ + 1;
  pmf_ = Eigen::VectorXd::Zero(len);
  if (params.psi == 0.0) {
    pmf_(0) = 1.0;
  } else if (std::isinf(params.psi)) {
    pmf_(len - 1) = 1.0;
  } else {
    // Terms scaled relative to the largest, so psi far from 1 cannot overflow.
    const double lpsi = std::log(params.psi);
    Eigen::VectorXd logt(len);
    for (int i = 0; i < len; ++i) {
      const int x2 = lo_ + i;
      logt(i) = log_choose(n1, s - x2) + log_choose(n2, x2) + x2 * lpsi;
    }
    const double mx = logt.maxCoeff();
    for (int i = 0; i < len; ++i) pmf_(i) = std::exp(logt(i) - mx);
    pmf_ /= pmf_.sum();
  }
  lower_cum_.resize(len);
  upper_cum_.resize(len);
  double acc = 0.0;
  for (int i = 0; i < len; ++i) lower_cum_(i) = (acc += pmf_(i));
  acc = 0.0;
  for (int i = len - 1; i >= 0; --i) upper_cum_(i) = (acc += pmf_(i));
}

double NoncentralHypergeom::pmf(int x2) const {
  if (!in_support(x2))
    throw std::domain_error("x2=" + std::to_string(x2) + " outside support [" + std::to_string(lo_) + ", " +
                            std::to_string(hi_) + "]");
  return pmf_(x2 - lo_);
}

double NoncentralHypergeom::tail(int x2, Tail side, TailMode mode) const {
  const double f = pmf(x2);
  const int i = x2 - lo_;
  const int last = hi_ - lo_;
  if (side == Tail::upper) {
    if (mode == TailMode::full) return std::min(1.0, upper_cum_(i));
    return (i < last ? upper_cum_(i + 1) : 0.0) + 0.5 * f;
  }
  if (mode == TailMode::full) return std::min(1.0, lower_cum_(i));
  return (i > 0 ? lower_cum_(i - 1) : 0.0) + 0.5 * f;
}

double NoncentralHypergeom::mean() const {
  double m = 0.0;
  for (int i = 0; i < pmf_.size(); ++i) m += (lo_ + i) * pmf_(i);
  return m;
}

double nchg_pmf(int x2, const NoncentralHypergeomParams& params) { return NoncentralHypergeom(params).pmf(x2); }

double nchg_tail(int x2, const NoncentralHypergeomParams& params, Tail side, TailMode mode) {
  return NoncentralHypergeom(params).tail(x2, side, mode);
}

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::domain_error("incomplete beta requires a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lfront = a * std::log(x) + b * std::log1p(-x) - log_beta_fn(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(lfront) * beta_continued_fraction(x, a, b) / a;
  return 1.0 - std::exp(lfront) * beta_continued_fraction(1.0 - x, b, a) / b;
}

namespace {
void check_beta(BetaParams p) {
  if (!(p.a >= 0.0 && p.b >= 0.0)) throw std::domain_error("beta shapes must be >= 0");
  if (p.a == 0.0 && p.b == 0.0) throw std::domain_error("Beta(0, 0) is undefined");
}
}  // namespace

double beta_pdf(double x, BetaParams p) {
  check_beta(p);
  if (p.a == 0.0 || p.b == 0.0) throw std::domain_error("point-mass beta has no density");
  if (x < 0.0 || x > 1.0) return 0.0;
  if (x == 0.0) return p.a < 1.0 ? kInf : (p.a == 1.0 ? std::exp(-log_beta_fn(p.a, p.b)) : 0.0);
  if (x == 1.0) return p.b < 1.0 ? kInf : (p.b == 1.0 ? std::exp(-log_beta_fn(p.a, p.b)) : 0.0);
  return std::exp((p.a - 1.0) * std::log(x) + (p.b - 1.0) * std::log1p(-x) - log_beta_fn(p.a, p.b));
}

double beta_cdf(double x, BetaParams p) {
  check_beta(p);
  if (p.a == 0.0) return x >= 0.0 ? 1.0 : 0.0;
  if (p.b == 0.0) return x >= 1.0 ? 1.0 : 0.0;
  return incomplete_beta(x, p.a, p.b);
}

double beta_quantile(double prob, BetaParams p) {
  check_beta(p);
  if (!(prob >= 0.0 && prob <= 1.0)) throw std::domain_error("beta quantile probability must lie in [0, 1]");
  if (p.a == 0.0) return 0.0;
  if (p.b == 0.0) return 1.0;
  if (prob == 0.0) return 0.0;
  if (prob == 1.0) return 1.0;
  // Bracketed Newton: fall back to bisection whenever the Newton step leaves the bracket.
  double lo = 0.0;
  double hi = 1.0;
  double x = std::clamp(p.a / (p.a + p.b), 1e-12, 1.0 - 1e-12);
  for (int it = 0; it < 400; ++it) {
    const double f = incomplete_beta(x, p.a, p.b) - prob;
    if (std::fabs(f) <= 1e-12 * std::min(prob, 1.0 - prob)) break;
    if (f < 0.0) lo = x; else hi = x;
    if (hi - lo < 1e-16) break;
    const double d = beta_pdf(x, p);
    double next = (d > 0.0 && std::isfinite(d)) ? x - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

}  // namespace twobinom
