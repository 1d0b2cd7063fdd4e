#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace burstmap {

// Constants of the slow/fast normal form
//   z' = (y + i w) z + 2 z |z|^2 - z |z|^4 + I(t)
//   y' = epsilon (a - |z|^2 - b y)
struct ModelParams {
  double epsilon = 0.01;
  double w = 1.0;
  double a = 0.8;
  double b = 0.0;

  bool operator==(const ModelParams&) const = default;
};

// Linear slow ramp on the silent branch.
ModelParams preset_b0();
// Saturating exponential ramp on the silent branch.
ModelParams preset_b05();
// "b0" or "b05"; nullopt for anything else.
std::optional<ModelParams> preset_by_name(std::string_view name);

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kSaddleNode = -1.0;  // y_SN
inline constexpr double kHopf = 0.0;         // y_H

// Singular-limit burst cycle: silent passage from y_SN to y_J, then spiking
// passage back to y_SN. Times are in unscaled units.
struct BurstGeometry {
  double y_SN = kSaddleNode;
  double y_H = kHopf;
  double y_J = 0.0;
  double T_S = 0.0;
  double T_P = 0.0;
  double T = 0.0;
};

// Radii of the spiking orbits P and of the separatrix U about the rest
// branch. Absent where the family does not exist.
struct BranchRadii {
  std::optional<double> r_P;
  std::optional<double> r_U;
};
BranchRadii branch_radii(double y);

// Slow value below which a kick of amplitude `A` does not clear U:
// y_w(A) = (1 - A^2)^2 - 1 for A in [0, 1], y_SN otherwise.
double cutoff_slow_value(double A);

// Closed-form slow dynamics of the normal form. Immutable once built.
class BurstModel {
 public:
  // Throws InvalidParams if the parameters do not produce bursting.
  explicit BurstModel(ModelParams params);
  // Same closed forms, but the silent passage ends at `jump_up_override`
  // instead of jump_up(y_SN). Used for noise-shortened slow passage.
  BurstModel(ModelParams params, double jump_up_override);

  const ModelParams& params() const { return params_; }
  const BurstGeometry& geometry() const { return geometry_; }

  // y along S as a function of time since y = y_SN.
  double h_S(double t) const;
  double h_S_inv(double y) const;
  // Time along P, calibrated so that h_P_inv(y_J) = T_S. Defined on
  // [y_SN, y_J'] where y_J' = max(y_J, jump_up(y_SN)); DomainError outside.
  double h_P_inv(double y) const;

  // Derivatives: dh_S/dt, d(h_S_inv)/dy, d(h_P_inv)/dy.
  double h_S_rate(double t) const;
  double h_S_inv_slope(double y) const;
  double h_P_inv_slope(double y) const;

  // Jump-up value reached after a silent passage started at y_i in
  // [y_SN, y_H]. Throws NumericError if the closed form leaves the domain.
  double jump_up(double y_i) const;
  double jump_up_slope(double y_i) const;

  // Slow drift restricted to S and to P.
  double silent_drift(double y) const;
  double spiking_drift(double y) const;

  // Silent-branch profile started at y_i: y(t) = y_i + g(eps t), and its time
  // integral Y(t) = int_0^t y(s) ds.
  double silent_profile(double y_i, double t) const;
  double silent_profile_integral(double y_i, double t) const;
  // Time for the silent profile to go from y_i to y.
  double silent_time(double y_i, double y) const;

 private:
  void validate_drifts() const;
  double h_P_raw(double y) const;

  ModelParams params_;
  BurstGeometry geometry_;
  double c_P_ = 0.0;
  double y_domain_hi_ = 0.0;
};

}  // namespace burstmap
