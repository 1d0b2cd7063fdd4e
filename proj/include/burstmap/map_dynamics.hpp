#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "burstmap/kick_map.hpp"

namespace burstmap {

struct SynchronyStats {
  double H = 0.0;  // binned entropy, normalized to [0, 1]
  double R = 0.0;  // modulus of the mean phasor
  double W = 0.0;  // (R + 1 - H) / 2
};

// n_bins <= 0 uses one bin per phase.
SynchronyStats synchrony(std::span<const double> phases, int n_bins = 0);

// Evenly spaced phases (j + 0.5) / n, or j / n with `centered` false.
std::vector<double> uniform_phases(int n, bool centered = true);

// Iterates every phase through `map` n_iter times, storing all iterates.
// trace[0] is the initial population.
std::vector<std::vector<double>> iterate_population(const KickMap& map,
                                                    std::vector<double> phases,
                                                    int n_iter);

// Average of W over iterates m - k .. m of a trace (k + 1 values).
double w_bar(const std::vector<std::vector<double>>& trace, int m = 150,
             int k = 20);
double w_bar(const KickMap& map, std::vector<double> phases, int m = 150,
             int k = 20);

struct LyapunovEstimate {
  double lambda = 0.0;
  int n_terms = 0;
  int excluded = 0;
};

// Mean of ln|F'| along the orbit of theta0; points within `border_tol` of a
// branch border are skipped and counted.
LyapunovEstimate lyapunov(const KickMap& map, double theta0, int n_iter = 1000,
                          int transient = 0, double border_tol = 1e-9);

struct OrbitRow {
  double tau = 0.0;
  std::vector<double> final_phases;
  double w_bar = 0.0;
  double lambda = 0.0;  // averaged over all cell orbits
};

// One row per tau; cells start uniform. Rows are computed in parallel.
std::vector<OrbitRow> orbit_diagram(const KickMap& map,
                                    std::span<const double> taus,
                                    int n_cells = 100, int n_iter = 150,
                                    int k = 20, int threads = 0);

struct LemmaCertificate {
  bool holds = false;
  double lower_bound = 0.0;
  double slope_lo_expand = 0.0;  // min |F'| on the expansive interval
  double slope_lo_middle = 0.0;  // min |F'| on the middle interval
  int escape_steps = 0;          // C: max iterates spent in the identity interval
  std::string failure;           // violated clause when !holds
};

// Checks the three-interval expansion lemma for map.shifted(tau) on the
// expansive/middle/identity partition using `subdivisions` cells per interval.
LemmaCertificate lemma1_certificate(const KickMap& map, double tau,
                                    int subdivisions = 4000);

struct InvariantMeasure {
  std::vector<double> density;  // sums to 1
  double residual = 0.0;        // max |pP - p| at the returned vector
  int iterations = 0;
};

// Row-stochastic Ulam transition matrix of `map` (mid-cell sample points).
std::vector<std::vector<double>> ulam_matrix(const KickMap& map, int n_bins,
                                             int samples_per_bin);

// Dominant left fixed vector by power iteration on the lazy chain (P + I)/2,
// which shares fixed vectors with P but does not cycle.
InvariantMeasure ulam_measure(const KickMap& map, int n_bins = 200,
                              int samples_per_bin = 100, double tol = 1e-10,
                              int max_iter = 100000);

// Noisy iteration: each cell and step applies the map at shift tau + zeta,
// zeta ~ N(0, cv), from a stream seeded by (seed, cell).
std::vector<std::vector<double>> jittered_iterate(const KickMap& map, double tau,
                                                  double cv,
                                                  std::vector<double> phases,
                                                  int n_iter, std::uint64_t seed);

}  // namespace burstmap
