#pragma once

#include <string>
#include <vector>

#include "pngsfp/dynamics.hpp"
#include "pngsfp/game.hpp"

namespace pngsfp {

// Logit best-response map applied population-wise (pinned populations
// map to their fixed strategy).
BeliefProfile qre_map(const PopulationNetworkGame& game, const BeliefProfile& profile, double beta);

struct QreSolution {
  BeliefProfile profile;
  double residual = 0.0;  // max-norm of qre_map(x) - x at the returned profile
  int iterations = 0;
  bool converged = false;
};

// Damped fixed-point iteration x <- (1-alpha) x + alpha qre_map(x).
// Non-convergence returns the best iterate, flagged.
QreSolution solve_qre(const PopulationNetworkGame& game, double beta, const BeliefProfile& start,
                      double alpha = 0.5, double tol = 1e-12, int max_iter = 100000);

// Multistart over a deterministic low-discrepancy grid of interior profiles;
// converged solutions clustered by max-norm distance.
struct QreAtlas {
  std::vector<QreSolution> qre;  // one representative per cluster
  std::vector<int> hits;         // starts that landed in each cluster
  int unconverged = 0;
};
QreAtlas discover_qre(const PopulationNetworkGame& game, double beta, int starts = 64,
                      double cluster_tol = 1e-6);

// Perturbed payoff pi_i(x_i, beliefs) = x_i^T sum_j A_ij mu_j + v(x_i) with
// v(x) = -(1/beta) sum x ln x (0 ln 0 = 0).
double perturbed_payoff(const PopulationNetworkGame& game, int i, const MixedStrategy& x_i,
                        const BeliefProfile& beliefs, double beta);

// Entropy perturbation v alone.
double entropy_term(const MixedStrategy& x, double beta);

// L = sum_i omega_i [pi_i(x_i, mu) - pi_i(mu_i, mu)] with x_i the logit
// response; requires a weighted zero-sum game and interior beliefs about
// learning populations. Zero exactly at the QRE, decreasing along
// homogeneous trajectories.
double zero_sum_lyapunov(const PopulationNetworkGame& game, const BeliefProfile& beliefs,
                         double beta, const std::vector<double>& weights);

// Ascending potential for star-forest coordination games, built from the
// canonical partnership representative of each edge; non-decreasing along
// homogeneous trajectories.
double star_potential(const PopulationNetworkGame& game, const BeliefProfile& beliefs, double beta);

// Canonical common-payoff matrix for an edge of a coordination game:
// P = A_rl + 1 c^T with P = (A_lr + 1 d^T)^T, pinned by mean(c) = -mean(M)/2.
// Transpose-consistent: representative(l, r) == representative(r, l)^T.
Matrix coordination_representative(const PopulationNetworkGame& game, int root, int leaf);

enum class Direction { Decreasing, Increasing };

struct MonotoneReport {
  bool ok = true;
  long first_violation = -1;  // index k where v[k] -> v[k+1] breaks monotonicity
  bool equality = false;      // whole sequence flat within slack
  double worst_step = 0.0;    // most violating step delta
};

// Monotonicity up to per-step slack (absorbs integrator error).
MonotoneReport check_monotone(const std::vector<double>& values, Direction direction,
                              double slack = 1e-9);

// QRE report as JSON: profile, residual, iterations, cluster count.
std::string qre_report_json(const PopulationNetworkGame& game, const QreAtlas& atlas, double beta);

}  // namespace pngsfp
