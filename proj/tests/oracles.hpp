#pragma once
// Reference computations written independently of the library kernels.

#include <array>
#include <cmath>
#include <functional>

namespace oracle {

// Composite 8-point Gauss-Legendre on n panels.
inline double gauss_legendre(const std::function<double(double)>& f, double lo, double hi,
                             int n = 400) {
  static const double x[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                              0.9602898564975363};
  static const double w[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                              0.1012285362903763};
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double c = lo + h * (k + 0.5), r = 0.5 * h;
    for (int j = 0; j < 4; ++j) s += w[j] * (f(c - r * x[j]) + f(c + r * x[j])) * r;
  }
  return s;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-13) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi), fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Jump-up value from the integral condition int_{y_i}^{y_j} y / (a - b y) dy = 0.
inline double jump_up(double a, double b, double y_i) {
  const auto integral = [&](double yj) {
    return gauss_legendre([&](double y) { return y / (a - b * y); }, y_i, yj);
  };
  const double hi = b > 0 ? a / b * (1.0 - 1e-12) : 10.0;
  return bisect(integral, 1e-9, hi);
}

using Mat = std::array<std::array<double, 2>, 2>;

struct Moments {
  std::array<double, 2> mu;
  Mat sigma;
};

// RK4 for mu' = J mu, S' = J S + S J^T + diag(eta^2, 0) with
// J = [[y, -w], [w, y]] along the silent ramp started at y_i.
inline Moments linear_sde_moments(Moments m, double y_i, double t, double eps, double w,
                                  double a, double b, double eta, int steps) {
  const auto yof = [&](double s) {
    return b == 0.0 ? y_i + eps * a * s : a / b + (y_i - a / b) * std::exp(-eps * b * s);
  };
  const auto rhs = [&](double s, const Moments& x) {
    const double y = yof(s);
    const Mat J{{{y, -w}, {w, y}}};
    Moments d{};
    for (int i = 0; i < 2; ++i) d.mu[i] = J[i][0] * x.mu[0] + J[i][1] * x.mu[1];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double v = 0.0;
        for (int k = 0; k < 2; ++k) v += J[i][k] * x.sigma[k][j] + x.sigma[i][k] * J[j][k];
        d.sigma[i][j] = v;
      }
    d.sigma[0][0] += eta * eta;
    return d;
  };
  const auto axpy = [](const Moments& x, double h, const Moments& d) {
    Moments r = x;
    for (int i = 0; i < 2; ++i) r.mu[i] += h * d.mu[i];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.sigma[i][j] += h * d.sigma[i][j];
    return r;
  };
  const double h = t / steps;
  for (int n = 0; n < steps; ++n) {
    const double s = n * h;
    const Moments k1 = rhs(s, m);
    const Moments k2 = rhs(s + h / 2, axpy(m, h / 2, k1));
    const Moments k3 = rhs(s + h / 2, axpy(m, h / 2, k2));
    const Moments k4 = rhs(s + h, axpy(m, h, k3));
    m = axpy(m, h / 6, k1);
    m = axpy(m, h / 3, k2);
    m = axpy(m, h / 3, k3);
    m = axpy(m, h / 6, k4);
  }
  return m;
}

}  // namespace oracle
