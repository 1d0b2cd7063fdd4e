#include "burstmap/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "burstmap/numerics.hpp"
#include "burstmap/parallel.hpp"

namespace burstmap {
namespace {

constexpr double kRegularization = 1e-300;

Mat2 rotation(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return {{{c, -s}, {s, c}}};
}

Mat2 mul(const Mat2& a, const Mat2& b) {
  Mat2 out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return out;
}

Mat2 transpose(const Mat2& a) { return {{{a[0][0], a[1][0]}, {a[0][1], a[1][1]}}}; }

double det(const Mat2& a) { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }

Mat2 inverse(const Mat2& a) {
  const double d = det(a);
  return {{{a[1][1] / d, -a[0][1] / d}, {-a[1][0] / d, a[0][0] / d}}};
}

Mat2 regularized(const Mat2& s) {
  const double tr = s[0][0] + s[1][1];
  const double disc = std::sqrt(std::max(0.0, 0.25 * (s[0][0] - s[1][1]) * (s[0][0] - s[1][1]) +
                                                  s[0][1] * s[1][0]));
  const double lam_min = 0.5 * tr - disc;
  const double scale = std::max({std::fabs(s[0][0]), std::fabs(s[1][1]), 1e-300});
  if (lam_min < -1e-12 * scale || std::fabs(s[0][1] - s[1][0]) > 1e-12 * scale) {
    throw std::invalid_argument("covariance is not symmetric positive semi-definite");
  }
  Mat2 out = s;
  out[0][0] += kRegularization;
  out[1][1] += kRegularization;
  return out;
}

// D_KL[p || q] for bivariate Gaussians.
double kl(const GaussianState& p, const GaussianState& q) {
  const Mat2 sp = regularized(p.sigma);
  const Mat2 sq = regularized(q.sigma);
  const Mat2 qi = inverse(sq);
  const Mat2 m = mul(qi, sp);
  const double dx = q.mu[0] - p.mu[0], dy = q.mu[1] - p.mu[1];
  const double quad = dx * (qi[0][0] * dx + qi[0][1] * dy) + dy * (qi[1][0] * dx + qi[1][1] * dy);
  // log det ratio through the eigen-free form ln(det sq) - ln(det sp).
  const double logdet = std::log(det(sq)) - std::log(det(sp));
  return 0.5 * (m[0][0] + m[1][1] + quad - 2.0 + logdet);
}

}  // namespace

GaussianState propagate_gaussian(const GaussianState& initial, double y_i,
                                 double t, const BurstModel& model, double eta) {
  if (t < 0.0) throw std::invalid_argument("propagation time must be >= 0");
  if (t == 0.0) return initial;
  const double y_end = model.silent_profile(y_i, t);
  if (y_i < kSaddleNode - 1e-12 || y_end > kHopf + 1e-9) {
    std::ostringstream msg;
    msg << "propagate_gaussian: slow path [" << y_i << ", " << y_end
        << "] leaves [y_SN, y_H] where the linearization holds";
    throw LinearizationError(msg.str());
  }
  const double w = model.params().w;
  const double Yt = model.silent_profile_integral(y_i, t);
  const double growth = std::exp(Yt);
  const Mat2 R = rotation(w * t);

  GaussianState out;
  for (int i = 0; i < 2; ++i) {
    out.mu[i] = growth * (R[i][0] * initial.mu[0] + R[i][1] * initial.mu[1]);
  }
  const Mat2 carried = mul(mul(R, initial.sigma), transpose(R));
  const double g2 = growth * growth;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.sigma[i][j] = g2 * carried[i][j];

  if (eta > 0.0) {
    // e^{2(Y(t)-Y(t'))} R e1 e1^T R^T, written with double angles.
    const auto weight = [&](double tp) {
      return std::exp(2.0 * (Yt - model.silent_profile_integral(y_i, tp)));
    };
    const auto f0 = [&](double tp) { return weight(tp); };
    const auto fc = [&](double tp) { return weight(tp) * std::cos(2.0 * w * (t - tp)); };
    const auto fs = [&](double tp) { return weight(tp) * std::sin(2.0 * w * (t - tp)); };
    const double scale = std::max(adaptive_simpson(f0, 0.0, t, 0.0, 1e-13), 1e-300);
    const double panel = w > 0.0 ? std::numbers::pi / (4.0 * std::fabs(w)) : t;
    const int n = std::max(1, static_cast<int>(std::ceil(t / panel)));
    const double tol = 1e-13 * scale / n;
    double i0 = 0.0, ic = 0.0, is = 0.0;
    for (int k = 0; k < n; ++k) {
      const double lo = t * k / n, hi = t * (k + 1) / n;
      i0 += adaptive_simpson(f0, lo, hi, tol, 1e-13);
      ic += adaptive_simpson(fc, lo, hi, tol);
      is += adaptive_simpson(fs, lo, hi, tol);
    }
    const double e2 = eta * eta;
    out.sigma[0][0] += e2 * 0.5 * (i0 + ic);
    out.sigma[1][1] += e2 * 0.5 * (i0 - ic);
    out.sigma[0][1] += e2 * 0.5 * is;
    out.sigma[1][0] += e2 * 0.5 * is;
  }
  // Enforce exact symmetry lost to rounding.
  const double off = 0.5 * (out.sigma[0][1] + out.sigma[1][0]);
  out.sigma[0][1] = out.sigma[1][0] = off;
  return out;
}

GaussianState natural_distribution(const BurstModel& model, double eta) {
  const double r = *branch_radii(kSaddleNode).r_P;
  GaussianState init;
  init.sigma = {{{r * r, 0.0}, {0.0, r * r}}};
  const double t = model.silent_time(kSaddleNode, kHopf);
  return propagate_gaussian(init, kSaddleNode, t, model, eta);
}

GaussianState kicked_distribution(const BurstModel& model,
                                  const GaussianState& natural, double eta,
                                  double A, double y) {
  if (y < kSaddleNode || y >= kHopf) {
    throw LinearizationError("kicked_distribution: y must lie in [y_SN, y_H)");
  }
  GaussianState init;
  init.mu = {A, 0.0};
  init.sigma = natural.sigma;
  return propagate_gaussian(init, y, model.silent_time(y, kHopf), model, eta);
}

GaussianState kicked_distribution(const BurstModel& model, double eta, double A,
                                  double y) {
  return kicked_distribution(model, natural_distribution(model, eta), eta, A, y);
}

double kl_symmetric(const GaussianState& p, const GaussianState& q) {
  return std::max(0.0, 0.5 * (kl(p, q) + kl(q, p)));
}

BufferResult buffer_point(const BurstModel& model, double eta, double A,
                          double period, const BufferOptions& opt) {
  if (!(A > 0.0 && A < 1.0)) throw std::invalid_argument("buffer_point needs 0 < A < 1");
  if (!(eta > 0.0)) throw std::invalid_argument("buffer_point needs eta > 0");
  if (opt.grid < 2) throw std::invalid_argument("buffer_point grid too small");
  const double T = period > 0.0 ? period : model.geometry().T;
  const GaussianState pn = natural_distribution(model, eta);
  const auto d = [&](double y) {
    return kl_symmetric(pn, kicked_distribution(model, pn, eta, A, y));
  };

  BufferResult res;
  const std::size_t n = static_cast<std::size_t>(opt.grid);
  res.d_curve.resize(n);
  const double h = (kHopf - kSaddleNode) / static_cast<double>(n);
  parallel_for(n, [&](std::size_t k) {
    const double y = kSaddleNode + h * static_cast<double>(k);
    res.d_curve[k] = {y, d(y)};
  }, opt.threads);

  std::size_t first = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (res.d_curve[k].second >= opt.d_B) { first = k; break; }
  }
  if (first == n) return res;  // buffer inactive
  res.active = true;
  if (first == 0) {
    res.y_B = kSaddleNode;
  } else {
    double lo = res.d_curve[first - 1].first, hi = res.d_curve[first].first;
    while (hi - lo > opt.y_tol) {
      const double mid = 0.5 * (lo + hi);
      if (d(mid) >= opt.d_B) hi = mid; else lo = mid;
    }
    res.y_B = hi;
  }
  res.theta_B = model.h_S_inv(res.y_B) / T;
  return res;
}

double noisy_jump_up(const ModelParams& params, const NoiseConfig& noise,
                     int n_bursts, const IntegratorOptions& options) {
  auto v = period_stats(params, noise, std::max(n_bursts, 10), 2, options).jump_up_values;
  if (v.empty()) throw NumericError("noisy_jump_up: no jump-up recorded");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

KickMap noisy_kick_map_from(const ModelParams& params, double A, double y_J,
                            const BufferResult& buffer) {
  const BurstModel model(params, y_J);
  KickMap base = build_kick_map(A, model);
  const double tb = buffer.active ? model.h_S_inv(buffer.y_B) / model.geometry().T : 0.0;
  if (!(tb > 0.0) || base.theta_w == 0.0) return base;

  std::vector<MapBranch> br;
  const auto& old = base.branches();
  const MapBranch identity{0.0, 0.0, BranchKind::Identity,
                           [](double th) { return th; }, [](double) { return 1.0; }};
  MapBranch pre = identity;
  pre.lo = 0.0;
  pre.hi = std::min(tb, base.theta_w);
  br.push_back(pre);
  for (const auto& b : old) {
    if (b.hi <= pre.hi) continue;
    MapBranch c = b;
    c.lo = std::max(c.lo, pre.hi);
    br.push_back(c);
  }
  KickMap out(std::move(br));
  out.theta_w = base.theta_w;
  out.theta_c = base.theta_c;
  out.silent_fraction = base.silent_fraction;
  out.amplitude = A;
  return out;
}

KickMap build_noisy_kick_map(const ModelParams& params, const NoiseConfig& noise,
                             double A, NoisyMapInfo* info,
                             const IntegratorOptions& options) {
  const PeriodStats st = period_stats(params, noise, 150, 2, options);
  if (st.cv > 1e-2) {
    std::ostringstream msg;
    msg << "phase reduction invalid: burst period CV " << st.cv
        << " exceeds 1e-2 at eta=" << noise.eta;
    throw PhaseReductionInvalid(msg.str());
  }
  std::vector<double> first(st.jump_up_values.begin(),
                            st.jump_up_values.begin() +
                                std::min<std::size_t>(st.jump_up_values.size(), 50));
  std::sort(first.begin(), first.end());
  const std::size_t m = first.size() / 2;
  const double y_J = first.size() % 2 ? first[m] : 0.5 * (first[m - 1] + first[m]);

  const BurstModel model(params, y_J);
  const BufferResult buf = (A > 0.0 && A < 1.0 && noise.active())
                               ? buffer_point(model, noise.white_noise_intensity(), A)
                               : BufferResult{};
  if (info) {
    info->cv = st.cv;
    info->mean_period = st.mean;
    info->y_J = y_J;
    info->buffer = buf;
  }
  return noisy_kick_map_from(params, A, y_J, buf);
}

}  // namespace burstmap
