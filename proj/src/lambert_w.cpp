#include "burstmap/lambert_w.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "burstmap/numerics.hpp"

namespace burstmap {
namespace {

constexpr double kInvE = 1.0 / std::numbers::e;
constexpr double kTolerance = 1e-12;
constexpr int kMaxIterations = 50;

double initial_guess(double x) {
  if (x < -0.32) {
    // Branch-point series in p = sqrt(2 (e x + 1)).
    const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * 11.0 / 72.0));
  }
  if (x < 1.0) return x * (1.0 - x * (1.0 - 1.5 * x));
  const double l = std::log1p(x);
  return l * (1.0 - std::log1p(l) / (2.0 + l));
}

}  // namespace

double lambert_w0(double x) {
  // Allow a few ulps below -1/e, where rounding of callers lands.
  if (x < -kInvE) {
    if (x > -kInvE * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) {
      return -1.0;
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "lambert_w0: argument " << x << " below branch point -1/e";
    throw DomainError(msg.str());
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;
  if (x == -kInvE) return -1.0;

  double w = initial_guess(x);
  for (int i = 0; i < kMaxIterations; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) return w;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (std::fabs(step) <= kTolerance * (1.0 + std::fabs(w))) return w;
  }
  return w;
}

}  // namespace burstmap
