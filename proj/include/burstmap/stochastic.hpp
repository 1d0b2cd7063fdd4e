#pragma once

#include <array>
#include <utility>
#include <vector>

#include "burstmap/integrator.hpp"
#include "burstmap/kick_map.hpp"
#include "burstmap/model.hpp"

namespace burstmap {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

// Gaussian law of the linearized fast variable (Re z, Im z).
struct GaussianState {
  Vec2 mu{0.0, 0.0};
  Mat2 sigma{{{0.0, 0.0}, {0.0, 0.0}}};
};

class LinearizationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Moments after time t of dx = J(s) x ds + B dW with J the fast
// linearization about the rest branch along y(s) = y_i + g(eps s) and
// B = diag(eta, 0). `eta` is the white-noise intensity. Requires y(s) to
// stay in [y_SN, y_H].
GaussianState propagate_gaussian(const GaussianState& initial, double y_i,
                                 double t, const BurstModel& model, double eta);

// Law at y_H of unkicked cells that left the spiking branch at y_SN with
// covariance r_P(y_SN)^2 I.
GaussianState natural_distribution(const BurstModel& model, double eta);

// Law at y_H of cells kicked by A at slow value y, started from mean (A, 0)
// and the natural covariance.
GaussianState kicked_distribution(const BurstModel& model, double eta, double A,
                                  double y);
GaussianState kicked_distribution(const BurstModel& model, const GaussianState& natural,
                                  double eta, double A, double y);

// Average of the two Kullback-Leibler divergences.
double kl_symmetric(const GaussianState& p, const GaussianState& q);

struct BufferOptions {
  double d_B = 10.0;
  int grid = 400;
  double y_tol = 1e-6;
  int threads = 0;
};

struct BufferResult {
  double y_B = kSaddleNode;
  double theta_B = 0.0;
  bool active = false;  // false: d < d_B on the whole grid
  std::vector<std::pair<double, double>> d_curve;  // (y, d(y))
};

// First y in [y_SN, y_H) where d(y) reaches d_B; theta_B = h_S^-1(y_B) / T.
// `period` <= 0 uses model.geometry().T.
BufferResult buffer_point(const BurstModel& model, double eta, double A,
                          double period = 0.0, const BufferOptions& options = {});

// Median jump-up slow value over `n_bursts` noisy bursts.
double noisy_jump_up(const ModelParams& params, const NoiseConfig& noise,
                     int n_bursts = 50, const IntegratorOptions& options = {});

class PhaseReductionInvalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NoisyMapInfo {
  double cv = 0.0;
  double mean_period = 0.0;
  double y_J = 0.0;
  BufferResult buffer;
};

// Four-branch weak-kick map with a pre-buffer identity branch. Geometry uses
// the measured noisy jump-up value; refuses when the period CV exceeds 1e-2.
KickMap build_noisy_kick_map(const ModelParams& params, const NoiseConfig& noise,
                             double A, NoisyMapInfo* info = nullptr,
                             const IntegratorOptions& options = {});

// Same construction from already measured statistics.
KickMap noisy_kick_map_from(const ModelParams& params, double A, double y_J,
                            const BufferResult& buffer);

}  // namespace burstmap
