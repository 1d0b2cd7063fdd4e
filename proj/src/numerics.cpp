#include "burstmap/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace burstmap {
namespace {

double simpson_step(const ScalarFn& f, double a, double fa, double b,
                    double fb, double m, double fm, double whole,
                    double abs_tol, double rel_tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double both = left + right;
  const double delta = both - whole;
  const double tol = std::max(abs_tol, rel_tol * std::fabs(both));
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return both + delta / 15.0;
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * abs_tol, rel_tol,
                      depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * abs_tol, rel_tol,
                      depth - 1);
}

}  // namespace

double adaptive_simpson(const ScalarFn& f, double lo, double hi,
                        double abs_tol, double rel_tol, int max_depth) {
  if (lo == hi) return 0.0;
  const double fa = f(lo);
  const double fb = f(hi);
  const double m = 0.5 * (lo + hi);
  const double fm = f(m);
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, lo, fa, hi, fb, m, fm, whole, abs_tol, rel_tol,
                      max_depth);
}

double brent_root(const ScalarFn& f, double lo, double hi, RootOptions opts) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) {
    std::ostringstream msg;
    msg << "brent_root: no sign change on [" << lo << ", " << hi
        << "] (f=" << fa << ", " << fb << ")";
    throw NumericError(msg.str());
  }
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * 2.2e-16 * std::fabs(b) + 0.5 * opts.x_tol;
    const double m = 0.5 * (c - b);
    if (std::fabs(m) <= tol || fb == 0.0) return b;
    if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::fabs(tol * q),
                             std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol) ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  throw NumericError("brent_root: iteration limit reached");
}

bool find_first_root(const ScalarFn& f, double lo, double hi, int n,
                     double* root, RootOptions opts) {
  const double h = (hi - lo) / n;
  double x0 = lo;
  double f0 = f(x0);
  if (f0 == 0.0) {
    *root = x0;
    return true;
  }
  for (int i = 1; i <= n; ++i) {
    const double x1 = (i == n) ? hi : lo + i * h;
    const double f1 = f(x1);
    if (std::isfinite(f0) && std::isfinite(f1) && (f0 > 0) != (f1 > 0)) {
      *root = brent_root(f, x0, x1, opts);
      return true;
    }
    x0 = x1;
    f0 = f1;
  }
  return false;
}

double wrap_phase(double theta) {
  double r = theta - std::floor(theta);
  if (r >= 1.0) r = 0.0;  // floor rounding for values like -1e-18
  return r;
}

double circular_difference(double a, double b) {
  double d = a - b;
  d -= std::floor(d + 0.5);
  return d;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index) {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) ^
                    splitmix64(index + 0x51ED270B27A1F3ULL));
}

}  // namespace burstmap
