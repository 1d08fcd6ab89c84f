#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pngsfp/matrix.hpp"

namespace pngsfp {

// One probability vector (length |S_i|).
using MixedStrategy = std::vector<double>;

// System-wide belief about each population, indexed by population.
// Beliefs about population i are pooled across all observer populations.
using BeliefProfile = std::vector<std::vector<double>>;

constexpr double kSimplexTol = 1e-12;

// entries >= 0 and sum within kSimplexTol of 1; throws ConfigError otherwise.
void check_simplex(const std::vector<double>& x, const std::string& what);
bool is_on_simplex(const std::vector<double>& x, double tol = kSimplexTol);

struct Population {
  std::string id;
  int strategies = 0;
  // Pinned mixed strategy for populations that do not learn. All solvers
  // substitute this for the population's mean strategy and skip its updates.
  std::optional<MixedStrategy> fixed;

  bool learning() const { return !fixed.has_value(); }
  friend bool operator==(const Population&, const Population&) = default;
};

struct Edge {
  int from = 0;  // population index
  int to = 0;
  Matrix payoff_from_to;  // |S_from| x |S_to|, own strategy x opponent strategy
  Matrix payoff_to_from;  // |S_to| x |S_from|
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  int pop = 0;             // neighbor population index
  const Matrix* payoff{};  // own x neighbor payoff matrix for the observer
};

struct PopulationNetworkGame {
  std::vector<Population> populations;
  std::vector<Edge> edges;
  std::vector<double> weights;  // omega_i > 0

  // Built by validate(): neighbor lists with matrices oriented own x opponent.
  std::vector<std::vector<Neighbor>> adjacency;

  int num_populations() const { return static_cast<int>(populations.size()); }
  int strategies(int i) const { return populations[i].strategies; }
  const std::vector<Neighbor>& neighbors(int i) const { return adjacency[i]; }
  int index_of(const std::string& id) const;  // throws ConfigError if unknown

  friend bool operator==(const PopulationNetworkGame& x, const PopulationNetworkGame& y) {
    return x.populations == y.populations && x.edges == y.edges && x.weights == y.weights;
  }
};

// Checks all structural invariants and builds the adjacency index.
// Throws ConfigError on violations.
PopulationNetworkGame make_game(std::vector<Population> populations, std::vector<Edge> edges,
                                std::vector<double> weights);

// Expected payoff: sum over incident edges of x_i^T A_ij x_j.
double expected_payoff(const PopulationNetworkGame& game, int i,
                       const std::vector<MixedStrategy>& profile);

struct ZeroSumReport {
  bool zero_sum = false;
  double max_residual = 0.0;  // max |weighted payoff sum| over pure profiles
};

// Exact zero-sum decision by enumerating all pure strategy profiles; the
// weighted payoff sum is multilinear, so it vanishes on the product of
// simplices iff it vanishes on every pure profile. Enumeration is capped at
// 2^20 profiles (ConfigError beyond). Tolerance 1e-9.
ZeroSumReport is_weighted_zero_sum(const PopulationNetworkGame& game,
                                   const std::vector<double>& weights);

// Partnership game up to per-opponent-strategy payoff shifts: for every edge,
// A_ij - A_ji^T is additively separable (double-centered difference <= 1e-12).
// Column shifts A_ij -> A_ij + 1 c^T leave logit responses, QRE and
// trajectories unchanged, so this is the invariance class of the theory.
bool is_coordination(const PopulationNetworkGame& game);

// Every connected component is a star (isolated vertices and single edges
// count as stars).
bool is_star_forest(const PopulationNetworkGame& game);

// One center per connected component (max degree, lowest index on ties).
std::vector<int> star_roots(const PopulationNetworkGame& game);

// Table 1 stag hunt: symmetric bimatrix, both populations respond with
// [[1,2],[0,4]] (rows H,S) against the opponent's (H,S) mix.
PopulationNetworkGame stag_hunt();

// Five populations on a line. Populations 1 and 5 are pinned to pure H and
// pure T. Every population's payoff against the next population is the match
// matrix M = [[1,-1],[-1,1]] and against the previous population is -M.
PopulationNetworkGame asymmetric_matching_pennies();

// JSON game-spec round trip. parse(serialize(g)) == g exactly.
std::string serialize_game(const PopulationNetworkGame& game);
PopulationNetworkGame parse_game(const std::string& json_text);
PopulationNetworkGame load_game_file(const std::string& path);

}  // namespace pngsfp
