#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pngsfp/dynamics.hpp"
#include "pngsfp/game.hpp"

namespace pngsfp {

// Initial belief distribution about one observed population: a Dirichlet
// (Beta for binary populations) or a common point mass.
struct BeliefInit {
  struct Dirichlet {
    std::vector<double> alpha;
  };
  struct Point {
    std::vector<double> mu;
  };
  std::variant<Dirichlet, Point> spec;

  static BeliefInit beta(double a, double b) { return {Dirichlet{{a, b}}}; }
  static BeliefInit point(std::vector<double> mu) { return {Point{std::move(mu)}}; }
};

struct SimConfig {
  int agents = 1000;
  SfpParams params;
  int steps = 1000;
  uint64_t seed = 0;
  // Keyed by the observed population; every observer of population j samples
  // its initial belief about j from init[j].
  std::vector<BeliefInit> init;

  void validate(const PopulationNetworkGame& game) const;
};

// Weights kappa^i_j for every learning observer population i: one flat array
// per neighbor slot, laid out agent-major.
struct AgentSystem {
  struct ObserverBlock {
    int observer = 0;                      // population index i
    std::vector<int> neighbors;            // population index j per slot
    std::vector<std::vector<double>> w;    // [slot][agent * |S_j| + s]
  };
  std::vector<ObserverBlock> blocks;  // one per learning population
  int agents = 0;
  int step = 0;  // discrete time t
};

// Samples beliefs from the configured distributions and sets kappa = lambda * mu.
// Deterministic given the seed; per-(population, slot, agent) streams.
AgentSystem init_population(const SimConfig& config, const PopulationNetworkGame& game);

// Per-population sample statistics of the current state.
struct SystemStats {
  // Indexed by population, then strategy.
  std::vector<std::vector<double>> mean_strategy;
  std::vector<std::vector<double>> mean_belief;    // pooled over observers
  std::vector<std::vector<double>> belief_var;     // pooled population variance
  std::vector<std::vector<double>> strategy_var;   // within the acting population
};
SystemStats population_stats(const AgentSystem& system, const PopulationNetworkGame& game,
                             const SfpParams& params);

// One synchronous update: beliefs -> logit strategies -> population
// means -> weight increments. All agents see the same pre-step means.
void abm_step(AgentSystem& system, const PopulationNetworkGame& game, const SfpParams& params);

struct AbmSeries {
  std::vector<int> times;          // 0..steps
  std::vector<SystemStats> stats;  // state at each recorded time (before that step's update)
};

AbmSeries run_abm(const SimConfig& config, const PopulationNetworkGame& game);

// Header `t,pop<i>_mean_s<k>,pop<i>_belief_var_s<k>,pop<i>_strat_var_s<k>`.
std::string abm_csv(const PopulationNetworkGame& game, const AbmSeries& series);

SimConfig sim_config_from_json(const std::string& json_text, const PopulationNetworkGame& game);

}  // namespace pngsfp
