#pragma once

#include <cstdint>
#include <functional>
#include <span>

namespace vetk::numerics {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subintervals = 0;
};

inline constexpr double kDefaultQuadratureTolerance = 1e-10;

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// The interval is first split at every breakpoint strictly inside (a, b);
/// pieces are then bisected, largest estimated error first, until the summed
/// error estimate is below `abs_tol` or `max_subintervals` is reached. Nodes
/// never touch the interval ends, so integrable endpoint singularities (a
/// Weibull hazard with shape < 1 at t = 0) are fine.
///
/// Throws QuadratureError when the integrand returns a non-finite value or the
/// error estimate stays above 1e3 * abs_tol after the subdivision budget.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, std::span<const double> breakpoints = {},
                           double abs_tol = kDefaultQuadratureTolerance,
                           int max_subintervals = 4000);

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Brent's method on a sign-changing bracket [lo, hi]. Stops when the bracket
/// is narrower than `x_tol` and |f| <= `f_tol`, or when f is exactly zero.
/// Throws SolverFailureError if f(lo) and f(hi) share a sign or the iteration
/// budget runs out.
RootResult brent(const std::function<double(double)>& f, double lo, double hi,
                 double x_tol, double f_tol, int max_iter = 500);

/// SplitMix64 finaliser; used to derive independent per-task seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for task `index` under `master`: splitmix64(master + (index + 1) * golden).
/// Every parallel consumer in the library derives child seeds this way.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace vetk::numerics
