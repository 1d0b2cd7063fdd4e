#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "burstmap/model.hpp"

namespace burstmap {

enum class BranchKind {
  Expansive,     // weak-kick slow-passage branch on [0, theta_w)
  Middle,        // h_P^-1 o h_S
  Identity,      // spiking phases and, for noisy maps, the pre-buffer phases
  Composite,     // produced by composing maps
};

std::string to_string(BranchKind kind);

// One smooth piece of a circle map. `value` returns the lift (not reduced
// mod 1) for theta in [lo, hi); `slope` its derivative.
struct MapBranch {
  double lo = 0.0;
  double hi = 1.0;
  BranchKind kind = BranchKind::Identity;
  std::function<double(double)> value;
  std::function<double(double)> slope;
};

// Piecewise smooth circle map theta -> F(theta) + shift (mod 1). Branches
// are ordered, partition [0, 1), and own their left endpoint.
class KickMap {
 public:
  KickMap() = default;
  KickMap(std::vector<MapBranch> branches, double shift = 0.0);

  double operator()(double theta) const;
  // Lift value including the shift, not reduced mod 1.
  double lift(double theta) const;
  double derivative(double theta) const;
  std::size_t branch_index(double theta) const;
  const MapBranch& branch_at(double theta) const;

  // Same branches, vertical translation by tau.
  KickMap shifted(double tau) const;
  double shift() const { return shift_; }

  const std::vector<MapBranch>& branches() const { return branches_; }
  // Interior branch borders, in increasing order.
  std::vector<double> borders() const;
  // Borders where the reduced map value jumps.
  std::vector<double> discontinuities(double jump_tol = 1e-9) const;
  // Distance (on the circle) from theta to the nearest border, 0 included.
  double border_distance(double theta) const;

  // Geometry annotations; zero when not meaningful.
  double theta_w = 0.0;
  double theta_c = 0.0;
  double silent_fraction = 0.0;  // T_S / T
  double amplitude = 0.0;

 private:
  std::vector<MapBranch> branches_;
  double shift_ = 0.0;
};

// Cutoff phase: h_S^-1(y_w(A)) / T for A < 1, else 0.
double theta_w(double A, const BurstModel& model);

// Root of d/dtheta (h_P^-1 o h_S) + 1 = 0; nullopt when no sign change.
std::optional<double> theta_c(const BurstModel& model);

// Strong map when theta_w(A) = 0, weak map otherwise.
KickMap build_kick_map(double A, const BurstModel& model);

// 1 - lim F_{A,0}(theta) as theta -> theta_w+; 0 for A >= 1.
double tau_C(double A, const BurstModel& model);

enum class Region { I, II, III };
std::string to_string(Region region);

struct RegionLabel {
  Region region = Region::III;
  bool boundary = false;  // tau within 1e-12 of a region border
};

RegionLabel classify_region(double A, double tau, const BurstModel& model);

}  // namespace burstmap
