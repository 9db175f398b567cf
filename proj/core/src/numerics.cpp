#include "vetk/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "vetk/errors.hpp"

namespace vetk::numerics {

namespace {

// Kronrod abscissae (descending, last is the centre) and weights; the Gauss
// 7-point rule uses every odd-indexed Kronrod node.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

double checked(const std::function<double(double)>& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    std::ostringstream msg;
    msg << "integrand is not finite at x = " << x;
    throw QuadratureError(msg.str());
  }
  return y;
}

// QUADPACK qk15 error heuristic.
Panel gauss_kronrod15(const std::function<double(double)>& f, double a,
                      double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 15> fv{};

  const double fc = checked(f, centre);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = checked(f, centre - dx);
    const double f2 = checked(f, centre + dx);
    fv[2 * j] = f1;
    fv[2 * j + 1] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
  }
  const double habs = std::abs(half);
  resasc *= habs;
  resabs *= habs;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  return Panel{a, b, resk * half, err};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, std::span<const double> breakpoints,
                           double abs_tol, int max_subintervals) {
  if (!(a <= b)) throw DomainError("integrate: requires a <= b");
  if (a == b) return {};

  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> work;
  std::vector<Panel> done;  // panels too narrow to split further
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = gauss_kronrod15(f, cuts[i], cuts[i + 1]);
    total_err += p.error;
    work.push(p);
  }

  int count = static_cast<int>(work.size());
  const double min_width =
      64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
  while (total_err > abs_tol && count < max_subintervals && !work.empty()) {
    Panel worst = work.top();
    work.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (worst.b - worst.a <= min_width || mid <= worst.a || mid >= worst.b) {
      done.push_back(worst);
      continue;
    }
    Panel left = gauss_kronrod15(f, worst.a, mid);
    Panel right = gauss_kronrod15(f, mid, worst.b);
    total_err += left.error + right.error - worst.error;
    work.push(left);
    work.push(right);
    ++count;
  }

  // Re-sum from scratch; the running total accumulates cancellation noise.
  QuadratureResult out;
  out.subintervals = static_cast<int>(work.size() + done.size());
  for (const Panel& p : done) {
    out.value += p.value;
    out.error += p.error;
  }
  while (!work.empty()) {
    out.value += work.top().value;
    out.error += work.top().error;
    work.pop();
  }
  if (out.error > 1e3 * abs_tol) {
    std::ostringstream msg;
    msg << "integrate: error estimate " << out.error << " exceeds tolerance "
        << abs_tol << " on [" << a << ", " << b << "]";
    throw QuadratureError(msg.str());
  }
  return out;
}

RootResult brent(const std::function<double(double)>& f, double lo, double hi,
                 double x_tol, double f_tol, int max_iter) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) {
    throw SolverFailureError("brent: non-finite function value at bracket end");
  }
  if (fa == 0.0) return {a, fa, 0};
  if (fb == 0.0) return {b, fb, 0};
  if ((fa > 0.0) == (fb > 0.0)) {
    std::ostringstream msg;
    msg << "brent: no sign change on [" << lo << ", " << hi << "]: f(lo) = " << fa
        << ", f(hi) = " << fb;
    throw SolverFailureError(msg.str());
  }

  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 1; iter <= max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    double tol1 = 2.0 * eps * std::abs(b) + 0.5 * x_tol;
    const double xm = 0.5 * (c - b);
    if (fb == 0.0) return {b, fb, iter};
    if (std::abs(xm) <= tol1) {
      // Bracket is narrow enough; if |f| is still too large keep refining
      // down to machine resolution before giving up on the f criterion.
      if (std::abs(fb) <= f_tol || x_tol <= 4.0 * eps * std::max(1.0, std::abs(b))) {
        return {b, fb, iter};
      }
      x_tol *= 1e-3;
      tol1 = 2.0 * eps * std::abs(b) + 0.5 * x_tol;
    }
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
    fb = f(b);
    if (!std::isfinite(fb)) {
      throw SolverFailureError("brent: non-finite function value inside bracket");
    }
  }
  std::ostringstream msg;
  msg << "brent: no convergence after " << max_iter << " iterations; |f| = "
      << std::abs(fb);
  throw SolverFailureError(msg.str());
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

}  // namespace vetk::numerics
