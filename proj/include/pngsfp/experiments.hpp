#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pngsfp/abm.hpp"
#include "pngsfp/equilibrium.hpp"
#include "pngsfp/game.hpp"
#include "pngsfp/moments.hpp"
#include "pngsfp/pde.hpp"

namespace pngsfp {

enum class Solver { Abm, Moments, Pde, Homogeneous };

Solver solver_from_name(const std::string& name);

struct ExperimentConfig {
  std::string kind = "custom";     // fig1 | roa | fig4 | custom
  std::string game = "stag_hunt";  // builtin name or game-spec path
  Solver solver = Solver::Moments;
  SfpParams params{10.0, 10.0};
  int agents = 1000;
  int runs = 100;
  int steps = 10000;
  uint64_t seed = 1;
  std::string out_dir = ".";

  // RoA sweep
  int grid = 41;
  std::vector<double> variances = {0.0, 0.005, 0.01, 0.02};

  // PDE
  int pde_nodes = 200;

  // custom runs
  double t_end = 50.0;
  double step = 1e-2;
  bool tau_time = true;
  bool lyapunov = false;
  bool potential = false;
  bool svg = true;
  // Initial conditions keyed by population id: either {"dirichlet": [...]} /
  // {"beta": [a, b]} or {"point"/"mean": [...]} with optional "variance".
  std::vector<BeliefInit> init;                    // for abm (empty -> uniform Beta(2,2)-ish)
  std::optional<BeliefProfile> init_mean;          // for ode/moment solvers
  std::vector<std::vector<double>> init_variance;  // for moment solver
};

ExperimentConfig experiment_config_from_json(const std::string& json_text);

PopulationNetworkGame resolve_game(const std::string& name_or_path);

// Across-run average of run_abm series (means of all four statistics).
struct AveragedAbm {
  std::vector<int> times;
  std::vector<SystemStats> stats;
};
AveragedAbm averaged_abm(const PopulationNetworkGame& game, const SimConfig& base, int runs);

// Moment-solver means evaluated at the requested integer times (t-time RK4).
MomentTrajectory moments_at_times(const PopulationNetworkGame& game, const MomentState& start,
                                  const std::vector<int>& times, double step,
                                  const SfpParams& params);

struct Fig1Case {
  std::string name;
  double beta_a, beta_b;
};

// fig1: ABM (runs x agents) and the moment solver on the
// small/large initial-variance stag hunt. Writes fig1_<case>.csv and SVG
// overlays; returns the output file list.
std::vector<std::string> run_fig1(const ExperimentConfig& config);

// roa: region-of-attraction sweep; writes roa_var*.csv, heatmaps and
// roa_summary.csv.
struct RoaResult {
  std::vector<double> variances;
  std::vector<double> s_basin_fraction;  // per variance
  std::vector<int> unconverged;
  std::vector<std::string> files;
};
RoaResult run_roa(const ExperimentConfig& config);

// fig4: equilibrium selection on the matching pennies line.
std::vector<std::string> run_fig4(const ExperimentConfig& config);

// Arbitrary game + solver + initial conditions.
std::vector<std::string> run_custom(const ExperimentConfig& config);

}  // namespace pngsfp
