#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pngsfp/dynamics.hpp"
#include "pngsfp/game.hpp"

namespace pngsfp {

// Nodal density of beliefs about one binary population on [0, 1] (the grid
// coordinate is the probability of the first strategy). Trapezoid mass 1,
// zero density at both endpoints.
struct DensityGrid {
  int m = 0;  // m + 1 nodes, spacing h = 1/m
  std::vector<double> p;

  double h() const { return 1.0 / m; }
  double node(int k) const { return static_cast<double>(k) / m; }
  double mass() const;
};

// One grid per learning population; pinned populations carry none.
struct PdeState {
  std::vector<std::optional<DensityGrid>> grids;
};

// Beta(a, b) density sampled on the grid and renormalized to unit trapezoid
// mass. Requires a, b > 1 (zero boundary mass) and m >= 50.
DensityGrid density_from_beta(double a, double b, int m);

// Trapezoid-rule mean and central variance of the grid coordinate.
std::pair<double, double> grid_moments(const DensityGrid& grid);

// Mean mixed strategy by tensor-product trapezoid quadrature over the
// neighbor grids; pinned neighbors contribute their strategy directly.
// Binary populations only.
MixedStrategy mean_choice_from_density(const PopulationNetworkGame& game, int i,
                                       const PdeState& state, double beta);

// One explicit-Euler first-order-upwind step of the belief transport with zero boundary
// fluxes. Throws NumericError if dt violates the CFL bound
// dt * max|v| / h <= 0.9 (v = (xbar - mu)/(lambda + t + 1)).
PdeState pde_step(const PdeState& state, const PopulationNetworkGame& game, double t, double dt,
                  const SfpParams& params);

struct PdeMoments {
  double mean = 0.0;
  double variance = 0.0;
};

struct PdeRun {
  std::vector<double> times;                             // snapshot times
  std::vector<PdeState> snapshots;
  std::vector<std::vector<std::optional<PdeMoments>>> moments;  // [snapshot][population]
  double max_mass_drift = 0.0;  // worst |mass - 1| over every step of the run
};

// Repeated pde_step with automatic dt at 90% of the CFL bound, landing
// exactly on each requested snapshot time.
PdeRun run_pde(const PopulationNetworkGame& game, PdeState initial, double t_end,
               const SfpParams& params, const std::vector<double>& snapshot_times);

// Initial state with Beta(a_i, b_i) belief densities for learning populations.
PdeState pde_state_from_beta(const PopulationNetworkGame& game, double a, double b, int m);

// Header `t,mu,pop<i>_density`; one row per node per snapshot.
std::string density_csv(const PopulationNetworkGame& game, const PdeRun& run);

}  // namespace pngsfp
