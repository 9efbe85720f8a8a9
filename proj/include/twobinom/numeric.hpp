#pragma once

// Small numeric building blocks shared by the inference modules.

#include <functional>
#include <vector>

namespace twobinom {

struct SupResult {
  double value = 0.0;
  double argmax = 0.0;
  /// Largest absolute change of the objective between neighbouring grid points.
  double grid_modulus = 0.0;
};

struct SupOptions {
  int grid_points = 1001;
  bool refine = true;
  int refine_maxima = 3;
  double refine_tol = 1e-6;
};

/// Maximize f over [lo, hi]: uniform grid, then golden-section refinement around the
/// largest local maxima. The result is a lower bound on the true supremum.
SupResult maximize_on_interval(const std::function<double(double)>& f, double lo, double hi,
                               const SupOptions& opts = {});

/// Golden-section search for a maximum of f on [lo, hi].
double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol, double* best_x = nullptr);

/// Indices of the k largest strict-or-plateau local maxima of a sampled sequence.
std::vector<int> top_local_maxima(const std::vector<double>& values, int k);

/// Bisection for a monotone predicate: returns the boundary point between `lo` (pred false)
/// and `hi` (pred true) to within `tol`.
double bisect_boundary(const std::function<bool(double)>& pred, double lo, double hi, double tol, int max_iter = 200);

/// Adaptive Gauss-Kronrod (7/15) quadrature on [a, b] with an initial partition.
double integrate(const std::function<double(double)>& f, std::vector<double> breakpoints, double abs_tol = 1e-10,
                 int max_intervals = 2000);

/// Number of worker threads (TWOBINOM_THREADS, default 1).
int thread_count();

/// Runs body(i) for i in [0, n) across thread_count() workers.
void parallel_for(int n, const std::function<void(int)>& body);

std::vector<double> linspace(double lo, double hi, int n);
std::vector<double> logspace(double lo, double hi, int n);

/// Open interval (lower, upper) of a scanned acceptance region.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Region {b : p(b) > alpha} scanned on a sorted grid, with each crossing located by a
/// bracketing root search (TOMS 748) to `tol`. An interval containing the first or last grid
/// point is reported as reaching `lo_limit` or `hi_limit`.
std::vector<Interval> scan_region(const std::function<double(double)>& p, double alpha, const std::vector<double>& grid,
                                  double tol, double lo_limit, double hi_limit);

}  // namespace twobinom
