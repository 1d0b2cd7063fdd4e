#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace burstmap {

// Raised by numeric kernels that cannot produce a result (no bracket,
// non-convergence). Carries a human-readable diagnostic.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an argument lies outside the domain of a closed form.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

using ScalarFn = std::function<double(double)>;

// Adaptive Simpson quadrature on [lo, hi]. The recursion stops on an
// interval once the Richardson estimate is below `abs_tol` + `rel_tol`
// times the magnitude of the local estimate.
double adaptive_simpson(const ScalarFn& f, double lo, double hi,
                        double abs_tol, double rel_tol = 0.0,
                        int max_depth = 48);

struct RootOptions {
  double x_tol = 1e-12;
  int max_iter = 200;
};

// Brent's method. Requires f(lo) and f(hi) of opposite sign (or one zero).
double brent_root(const ScalarFn& f, double lo, double hi,
                  RootOptions opts = {});

// Scans [lo, hi] on `n` equal cells and returns the first cell whose end
// values change sign, refined with Brent. Returns false if no sign change.
bool find_first_root(const ScalarFn& f, double lo, double hi, int n,
                     double* root, RootOptions opts = {});

// Fractional part on the circle, always in [0, 1).
double wrap_phase(double theta);

// Shortest signed distance from `b` to `a` on the unit circle, in [-0.5, 0.5).
double circular_difference(double a, double b);

inline double circular_distance(double a, double b) {
  const double d = circular_difference(a, b);
  return d < 0 ? -d : d;
}

// 64-bit mixing used to derive independent RNG substreams from a master seed.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index = 0);

}  // namespace burstmap
