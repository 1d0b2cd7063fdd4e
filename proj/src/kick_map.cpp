#include "burstmap/kick_map.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "burstmap/numerics.hpp"

namespace burstmap {

std::string to_string(BranchKind kind) {
  switch (kind) {
    case BranchKind::Expansive: return "expansive";
    case BranchKind::Middle: return "middle";
    case BranchKind::Identity: return "identity";
    case BranchKind::Composite: return "composite";
  }
  return "unknown";
}

std::string to_string(Region region) {
  switch (region) {
    case Region::I: return "I";
    case Region::II: return "II";
    case Region::III: return "III";
  }
  return "?";
}

KickMap::KickMap(std::vector<MapBranch> branches, double shift)
    : branches_(std::move(branches)), shift_(wrap_phase(shift)) {
  if (branches_.empty()) throw std::invalid_argument("KickMap needs a branch");
  if (branches_.front().lo != 0.0 || branches_.back().hi != 1.0) {
    throw std::invalid_argument("KickMap branches must cover [0, 1)");
  }
  for (std::size_t i = 0; i < branches_.size(); ++i) {
    const auto& b = branches_[i];
    if (!(b.hi > b.lo)) throw std::invalid_argument("KickMap branch is empty");
    if (i > 0 && branches_[i - 1].hi != b.lo) {
      throw std::invalid_argument("KickMap branches must abut");
    }
    if (!b.value || !b.slope) {
      throw std::invalid_argument("KickMap branch lacks an evaluator");
    }
  }
}

std::size_t KickMap::branch_index(double theta) const {
  const double t = wrap_phase(theta);
  auto it = std::upper_bound(
      branches_.begin(), branches_.end(), t,
      [](double v, const MapBranch& b) { return v < b.lo; });
  return static_cast<std::size_t>(std::distance(branches_.begin(), it)) - 1;
}

const MapBranch& KickMap::branch_at(double theta) const {
  return branches_[branch_index(theta)];
}

double KickMap::lift(double theta) const {
  const double t = wrap_phase(theta);
  return branch_at(t).value(t) + shift_;
}

double KickMap::operator()(double theta) const { return wrap_phase(lift(theta)); }

double KickMap::derivative(double theta) const {
  const double t = wrap_phase(theta);
  return branch_at(t).slope(t);
}

KickMap KickMap::shifted(double tau) const {
  KickMap out = *this;
  out.shift_ = wrap_phase(tau);
  return out;
}

std::vector<double> KickMap::borders() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < branches_.size(); ++i) out.push_back(branches_[i].lo);
  return out;
}

std::vector<double> KickMap::discontinuities(double jump_tol) const {
  std::vector<double> out;
  const auto jumps = [&](const MapBranch& left, double xl, const MapBranch& right,
                         double xr) {
    return circular_distance(wrap_phase(left.value(xl)),
                             wrap_phase(right.value(xr))) > jump_tol;
  };
  if (jumps(branches_.back(), 1.0, branches_.front(), 0.0)) out.push_back(0.0);
  for (std::size_t i = 1; i < branches_.size(); ++i) {
    const double x = branches_[i].lo;
    if (jumps(branches_[i - 1], x, branches_[i], x)) out.push_back(x);
  }
  return out;
}

double KickMap::border_distance(double theta) const {
  const double t = wrap_phase(theta);
  double d = std::min(t, 1.0 - t);
  for (double x : borders()) d = std::min(d, std::fabs(t - x));
  return d;
}

double theta_w(double A, const BurstModel& model) {
  if (!(A > 0.0)) throw std::invalid_argument("kick amplitude must be > 0");
  if (A >= 1.0) return 0.0;
  return model.h_S_inv(cutoff_slow_value(A)) / model.geometry().T;
}

namespace {

// Strong-kick branch h_P^-1 o h_S on the unit circle and its slope.
double middle_value(const BurstModel& m, double theta) {
  const double T = m.geometry().T;
  return m.h_P_inv(std::min(m.h_S(theta * T), m.geometry().y_J)) / T;
}

double middle_slope(const BurstModel& m, double theta) {
  const double T = m.geometry().T;
  const double t = theta * T;
  return m.h_P_inv_slope(m.h_S(t)) * m.h_S_rate(t);
}

// Slow-passage branch: theta + [h_P^-1(yj) - h_S^-1(yj)] / T.
double expansive_value(const BurstModel& m, double theta) {
  const double T = m.geometry().T;
  const double yj = m.jump_up(m.h_S(theta * T));
  return theta + (m.h_P_inv(yj) - m.h_S_inv(yj)) / T;
}

double expansive_slope(const BurstModel& m, double theta) {
  const double t = theta * m.geometry().T;
  const double y = m.h_S(t);
  const double yj = m.jump_up(y);
  return 1.0 + (m.h_P_inv_slope(yj) - m.h_S_inv_slope(yj)) *
                   m.jump_up_slope(y) * m.h_S_rate(t);
}

}  // namespace

std::optional<double> theta_c(const BurstModel& model) {
  const double ts = model.geometry().T_S / model.geometry().T;
  const auto g = [&](double th) { return middle_slope(model, th) + 1.0; };
  double root = 0.0;
  RootOptions opts;
  opts.x_tol = 1e-12;
  if (!find_first_root(g, 0.0, ts * (1.0 - 1e-9), 4000, &root, opts)) {
    return std::nullopt;
  }
  return root;
}

KickMap build_kick_map(double A, const BurstModel& model) {
  const double tw = theta_w(A, model);
  const double ts = model.geometry().T_S / model.geometry().T;
  auto m = std::make_shared<const BurstModel>(model);
  std::vector<MapBranch> br;
  if (tw > 0.0) {
    br.push_back({0.0, tw, BranchKind::Expansive,
                  [m](double th) { return expansive_value(*m, th); },
                  [m](double th) { return expansive_slope(*m, th); }});
  }
  br.push_back({tw, ts, BranchKind::Middle,
                [m](double th) { return middle_value(*m, th); },
                [m](double th) { return middle_slope(*m, th); }});
  br.push_back({ts, 1.0, BranchKind::Identity, [](double th) { return th; },
                [](double) { return 1.0; }});
  KickMap map(std::move(br));
  map.theta_w = tw;
  map.theta_c = theta_c(model).value_or(0.0);
  map.silent_fraction = ts;
  map.amplitude = A;
  return map;
}

double tau_C(double A, const BurstModel& model) {
  if (A >= 1.0) return 0.0;
  const double tw = theta_w(A, model);
  return 1.0 - middle_value(model, tw);
}

RegionLabel classify_region(double A, double tau, const BurstModel& model) {
  const double tc = tau_C(A, model);
  const double upper = tc + std::max(theta_w(A, model), theta_c(model).value_or(0.0));
  RegionLabel out;
  if (tau < tc) out.region = Region::I;
  else if (tau < upper) out.region = Region::II;
  else out.region = Region::III;
  out.boundary = std::fabs(tau - tc) < 1e-12 || std::fabs(tau - upper) < 1e-12;
  return out;
}

}  // namespace burstmap
