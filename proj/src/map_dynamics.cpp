#include "burstmap/map_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "burstmap/numerics.hpp"
#include "burstmap/parallel.hpp"

namespace burstmap {

SynchronyStats synchrony(std::span<const double> phases, int n_bins) {
  if (phases.empty()) throw std::invalid_argument("synchrony of an empty set");
  const std::size_t n = phases.size();
  const int m = n_bins > 0 ? n_bins : static_cast<int>(n);
  std::vector<int> counts(static_cast<std::size_t>(m), 0);
  std::complex<double> sum{0.0, 0.0};
  for (double raw : phases) {
    const double th = wrap_phase(raw);
    int k = std::clamp(static_cast<int>(std::floor(th * m)), 0, m - 1);
    if (th < static_cast<double>(k) / m) --k;
    else if (k + 1 < m && th >= static_cast<double>(k + 1) / m) ++k;
    ++counts[static_cast<std::size_t>(k)];
    sum += std::polar(1.0, 2.0 * std::numbers::pi * th);
  }
  SynchronyStats s;
  if (m > 1) {
    double acc = 0.0;
    for (int c : counts) {
      if (c == 0) continue;
      const double p = static_cast<double>(c) / static_cast<double>(n);
      acc += p * std::log(p);
    }
    s.H = std::clamp(acc / std::log(1.0 / m), 0.0, 1.0);
  }
  s.R = std::clamp(std::abs(sum) / static_cast<double>(n), 0.0, 1.0);
  s.W = 0.5 * (s.R + 1.0 - s.H);
  return s;
}

std::vector<double> uniform_phases(int n, bool centered) {
  std::vector<double> out(static_cast<std::size_t>(std::max(n, 0)));
  for (int j = 0; j < n; ++j) {
    out[static_cast<std::size_t>(j)] =
        centered ? (j + 0.5) / n : static_cast<double>(j) / n;
  }
  return out;
}

std::vector<std::vector<double>> iterate_population(const KickMap& map,
                                                    std::vector<double> phases,
                                                    int n_iter) {
  std::vector<std::vector<double>> trace;
  trace.reserve(static_cast<std::size_t>(n_iter) + 1);
  for (double& p : phases) p = wrap_phase(p);
  trace.push_back(phases);
  for (int it = 0; it < n_iter; ++it) {
    for (double& p : phases) p = map(p);
    trace.push_back(phases);
  }
  return trace;
}

double w_bar(const std::vector<std::vector<double>>& trace, int m, int k) {
  if (k < 1 || m < k) throw std::invalid_argument("w_bar needs m >= k >= 1");
  if (trace.size() < static_cast<std::size_t>(m) + 1) {
    throw std::invalid_argument("w_bar: trace shorter than m iterates");
  }
  double s = 0.0;
  for (int j = m - k; j <= m; ++j) s += synchrony(trace[static_cast<std::size_t>(j)]).W;
  return s / (k + 1);
}

double w_bar(const KickMap& map, std::vector<double> phases, int m, int k) {
  return w_bar(iterate_population(map, std::move(phases), m), m, k);
}

LyapunovEstimate lyapunov(const KickMap& map, double theta0, int n_iter,
                          int transient, double border_tol) {
  if (n_iter < 1) throw std::invalid_argument("lyapunov needs n_iter >= 1");
  double th = wrap_phase(theta0);
  for (int i = 0; i < transient; ++i) th = map(th);
  LyapunovEstimate est;
  double sum = 0.0;
  for (int i = 0; i < n_iter; ++i) {
    const double d = std::fabs(map.derivative(th));
    if (map.border_distance(th) < border_tol || !(d > 0.0) || !std::isfinite(d)) {
      ++est.excluded;
    } else {
      sum += std::log(d);
      ++est.n_terms;
    }
    th = map(th);
  }
  est.lambda = est.n_terms > 0 ? sum / est.n_terms : 0.0;
  return est;
}

std::vector<OrbitRow> orbit_diagram(const KickMap& map,
                                    std::span<const double> taus, int n_cells,
                                    int n_iter, int k, int threads) {
  std::vector<OrbitRow> rows(taus.size());
  parallel_for(
      taus.size(),
      [&](std::size_t i) {
        const KickMap f = map.shifted(taus[i]);
        const auto init = uniform_phases(n_cells);
        const auto trace = iterate_population(f, init, n_iter);
        OrbitRow& row = rows[i];
        row.tau = taus[i];
        row.final_phases = trace.back();
        row.w_bar = w_bar(trace, n_iter, std::min(k, n_iter));
        double lam = 0.0;
        for (double th : init) lam += lyapunov(f, th, n_iter).lambda;
        row.lambda = lam / n_cells;
      },
      threads);
  return rows;
}

namespace {

// Lift interval [lo, hi] taken mod 1 overlaps the open interval (c, d).
bool arc_overlaps(double lo, double hi, double c, double d) {
  if (hi - lo >= 1.0) return true;
  const double base = std::floor(lo);
  for (double k : {base, base + 1.0}) {
    const double a = lo - k, b = hi - k;
    if (a < d && b > c) return true;
  }
  return false;
}

// Lift interval [lo, hi] taken mod 1 contained in the closed interval [c, d].
bool arc_within(double lo, double hi, double c, double d) {
  if (hi - lo >= 1.0) return false;
  const double base = std::floor(lo);
  const double a = lo - base, b = hi - base;
  if (b <= 1.0) return a >= c && b <= d;
  return false;
}

}  // namespace

LemmaCertificate lemma1_certificate(const KickMap& base, double tau,
                                    int subdivisions) {
  LemmaCertificate cert;
  const auto& br = base.branches();
  if (br.size() != 3 || br[0].kind != BranchKind::Expansive ||
      br[1].kind != BranchKind::Middle || br[2].kind != BranchKind::Identity) {
    cert.failure = "no three-branch structure (requires a weak kick, theta_w > 0)";
    return cert;
  }
  const KickMap f = base.shifted(tau);
  const double s = f.shift();
  const int n = std::max(subdivisions, 10);

  // Node values per interval; endpoints use the branch closed forms.
  struct Range { double lift_lo, lift_hi, slope_lo; };
  const auto scan = [&](const MapBranch& b) {
    Range r{std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    for (int i = 0; i <= n; ++i) {
      const double th = b.lo + (b.hi - b.lo) * i / n;
      const double v = b.value(th) + s;
      r.lift_lo = std::min(r.lift_lo, v);
      r.lift_hi = std::max(r.lift_hi, v);
      r.slope_lo = std::min(r.slope_lo, std::fabs(b.slope(th)));
    }
    return r;
  };
  const Range r1 = scan(br[0]);
  const Range r2 = scan(br[1]);
  const Range r3 = scan(br[2]);
  cert.slope_lo_expand = r1.slope_lo;
  cert.slope_lo_middle = r2.slope_lo;

  std::ostringstream why;
  if (!(cert.slope_lo_expand > 1.0)) {
    why << "expansive-branch slope bound " << cert.slope_lo_expand << " is not > 1";
  } else if (!(cert.slope_lo_middle > 0.0)) {
    why << "middle-branch slope bound is not > 0";
  } else if (!(std::log(cert.slope_lo_expand) > std::fabs(std::log(cert.slope_lo_middle)))) {
    why << "ln(slope_lo_expand) = " << std::log(cert.slope_lo_expand)
        << " does not exceed |ln(slope_lo_middle)| = "
        << std::fabs(std::log(cert.slope_lo_middle));
  } else if (std::fabs(r3.slope_lo - 1.0) > 1e-12) {
    why << "identity-interval slope differs from 1";
  } else if (!arc_within(r2.lift_lo, r2.lift_hi, br[2].lo, br[2].hi)) {
    why << "F(I2) is not contained in I3: image spans [" << wrap_phase(r2.lift_lo)
        << ", " << wrap_phase(r2.lift_hi) << "] mod 1";
  } else if (arc_overlaps(r3.lift_lo, r3.lift_hi, br[1].lo, br[1].hi)) {
    why << "F(I3) intersects I2";
  } else if (s == 0.0) {
    why << "F(I3) = I3 (zero shift)";
  }
  if (!why.str().empty()) {
    cert.failure = why.str();
    return cert;
  }

  // Escape time from I3 traced from the subdivision nodes.
  int c = 0;
  const MapBranch& id = br[2];
  for (int i = 0; i < n; ++i) {
    double th = id.lo + (id.hi - id.lo) * i / n;
    int m = 0;
    while (th >= id.lo && th < id.hi) {
      th = f(th);
      ++m;
      if (m > 1000000) {
        cert.failure = "orbit does not leave I3";
        return cert;
      }
    }
    c = std::max(c, m);
  }
  cert.escape_steps = c;
  cert.lower_bound =
      (std::log(cert.slope_lo_expand) + std::log(cert.slope_lo_middle)) / (2.0 + c);
  cert.holds = cert.lower_bound > 0.0;
  if (!cert.holds) cert.failure = "non-positive lower bound";
  return cert;
}

std::vector<std::vector<double>> ulam_matrix(const KickMap& map, int n_bins,
                                             int samples_per_bin) {
  if (n_bins < 1 || samples_per_bin < 1) {
    throw std::invalid_argument("ulam_matrix needs positive bin and sample counts");
  }
  const std::size_t n = static_cast<std::size_t>(n_bins);
  std::vector<std::vector<double>> P(n, std::vector<double>(n, 0.0));
  const double w = 1.0 / samples_per_bin;
  parallel_for(n, [&](std::size_t i) {
    for (int s = 0; s < samples_per_bin; ++s) {
      const double th = (static_cast<double>(i) + (s + 0.5) / samples_per_bin) / n_bins;
      const double img = map(th);
      const std::size_t j = std::min(
          n - 1, static_cast<std::size_t>(std::floor(img * n_bins)));
      P[i][j] += w;
    }
  });
  return P;
}

InvariantMeasure ulam_measure(const KickMap& map, int n_bins,
                              int samples_per_bin, double tol, int max_iter) {
  const auto P = ulam_matrix(map, n_bins, samples_per_bin);
  const std::size_t n = P.size();
  std::vector<double> p(n, 1.0 / static_cast<double>(n)), q(n);
  const auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out[j] += v[i] * P[i][j];
    }
  };
  InvariantMeasure res;
  for (int it = 1; it <= max_iter; ++it) {
    apply(p, q);
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) resid = std::max(resid, std::fabs(q[i] - p[i]));
    if (resid < tol) {
      res.density = p;
      res.residual = resid;
      res.iterations = it;
      double sum = 0.0;
      for (double v : res.density) sum += v;
      for (double& v : res.density) v /= sum;
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) p[i] = 0.5 * (p[i] + q[i]);
    res.residual = resid;
  }
  std::ostringstream msg;
  msg << "ulam_measure: power iteration did not converge in " << max_iter
      << " steps (residual " << res.residual << ")";
  throw NumericError(msg.str());
}

std::vector<std::vector<double>> jittered_iterate(const KickMap& map, double tau,
                                                  double cv,
                                                  std::vector<double> phases,
                                                  int n_iter, std::uint64_t seed) {
  if (cv < 0.0) throw std::invalid_argument("jitter cv must be >= 0");
  const KickMap f = map.shifted(0.0);
  const std::size_t n = phases.size();
  std::vector<std::vector<double>> trace(static_cast<std::size_t>(n_iter) + 1,
                                         std::vector<double>(n));
  for (std::size_t c = 0; c < n; ++c) {
    std::mt19937_64 rng(derive_seed(seed, 3, c));
    std::normal_distribution<double> normal(0.0, cv > 0.0 ? cv : 1.0);
    double th = wrap_phase(phases[c]);
    trace[0][c] = th;
    for (int it = 1; it <= n_iter; ++it) {
      const double zeta = cv > 0.0 ? normal(rng) : 0.0;
      th = wrap_phase(f.lift(th) + tau + zeta);
      trace[static_cast<std::size_t>(it)][c] = th;
    }
  }
  return trace;
}

}  // namespace burstmap
