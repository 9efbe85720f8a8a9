#include "twobinom/numeric.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <queue>
#include <stdexcept>
#include <thread>

namespace twobinom {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(std::max(n, 1));
  if (n <= 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

std::vector<double> logspace(double lo, double hi, int n) {
  auto out = linspace(std::log(lo), std::log(hi), n);
  for (auto& v : out) v = std::exp(v);
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<Interval> scan_region(const std::function<double(double)>& p, double alpha, const std::vector<double>& grid,
                                  double tol, double lo_limit, double hi_limit) {
  std::vector<Interval> out;
  if (grid.empty()) return out;
  std::vector<double> g(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) g[i] = p(grid[i]) - alpha;
  auto in = [&](size_t i) { return g[i] > 0.0; };
  // Boundary between grid points i - 1 and i, which lie on opposite sides.
  auto crossing = [&](size_t i) {
    const double a = grid[i - 1], b = grid[i];
    if (g[i - 1] == 0.0) return a;
    if (g[i] == 0.0) return b;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        [&](double x) { return p(x) - alpha; }, a, b, g[i - 1], g[i],
        [&](double lo, double hi) { return std::fabs(hi - lo) <= tol * std::max(1.0, std::fabs(lo)); }, iters);
    return 0.5 * (r.first + r.second);
  };
  bool open = in(0);
  double start = lo_limit;
  for (size_t i = 1; i < grid.size(); ++i) {
    if (in(i) && !in(i - 1)) {
      start = crossing(i);
      open = true;
    }
    if (!in(i) && in(i - 1)) {
      out.push_back({start, crossing(i)});
      open = false;
    }
  }
  if (open) out.push_back({start, hi_limit});
  return out;
}

double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol, double* best_x) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  const double x = fc >= fd ? c : d;
  if (best_x) *best_x = x;
  return std::max(fc, fd);
}

std::vector<int> top_local_maxima(const std::vector<double>& v, int k) {
  const int n = static_cast<int>(v.size());
  std::vector<int> idx;
  for (int i = 0; i < n; ++i) {
    const bool left = i == 0 || v[i] >= v[i - 1];
    const bool right = i == n - 1 || v[i] >= v[i + 1];
    if (left && right) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
  if (static_cast<int>(idx.size()) > k) idx.resize(k);
  return idx;
}

SupResult maximize_on_interval(const std::function<double(double)>& f, double lo, double hi, const SupOptions& opts) {
  SupResult res;
  if (!(hi > lo)) {
    res.value = f(lo);
    res.argmax = lo;
    return res;
  }
  const auto grid = linspace(lo, hi, std::max(opts.grid_points, 2));
  std::vector<double> vals(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) vals[i] = f(grid[i]);
  int best = 0;
  for (size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] > vals[best]) best = static_cast<int>(i);
    if (i > 0) res.grid_modulus = std::max(res.grid_modulus, std::fabs(vals[i] - vals[i - 1]));
  }
  res.value = vals[best];
  res.argmax = grid[best];
  if (!opts.refine) return res;
  const int last = static_cast<int>(grid.size()) - 1;
  for (int i : top_local_maxima(vals, opts.refine_maxima)) {
    const double a = grid[std::max(i - 1, 0)];
    const double b = grid[std::min(i + 1, last)];
    double x = 0.0;
    const double v = golden_max(f, a, b, opts.refine_tol, &x);
    if (v > res.value) {
      res.value = v;
      res.argmax = x;
    }
  }
  return res;
}

double bisect_boundary(const std::function<bool(double)>& pred, double lo, double hi, double tol, int max_iter) {
  for (int i = 0; i < max_iter && std::fabs(hi - lo) > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid)) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {a, b, kron * h, std::fabs((kron - gauss) * h)};
}

}  // namespace

double integrate(const std::function<double(double)>& f, std::vector<double> bp, double abs_tol, int max_intervals) {
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  if (bp.size() < 2) return 0.0;
  std::priority_queue<Piece> heap;
  double total = 0.0;
  double err = 0.0;
  for (size_t i = 0; i + 1 < bp.size(); ++i) {
    auto p = gauss_kronrod(f, bp[i], bp[i + 1]);
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  int count = static_cast<int>(heap.size());
  while (err > abs_tol && count < max_intervals) {
    const Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto l = gauss_kronrod(f, worst.a, mid);
    auto r = gauss_kronrod(f, mid, worst.b);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    ++count;
  }
  return total;
}

int thread_count() {
  if (const char* env = std::getenv("TWOBINOM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

void parallel_for(int n, const std::function<void(int)>& body) {
  const int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) body(i);
    });
}

}  // namespace twobinom
