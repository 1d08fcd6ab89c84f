#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pngsfp/game.hpp"

namespace pngsfp {

struct SfpParams {
  double beta = 10.0;    // logit temperature (rationality)
  double lambda = 10.0;  // initial weight sum

  void validate() const;
};

// Pure-strategy utilities u_s = sum over neighbors of e_s^T A_ij mu_j. Empty
// neighborhoods give the zero vector.
std::vector<double> utilities(const PopulationNetworkGame& game, int i,
                              const BeliefProfile& beliefs);

// Softmax response with max-subtraction; a total function on finite inputs.
std::vector<double> logit(const std::vector<double>& u, double beta);

// Logit response per population; pinned populations return their fixed
// strategy.
BeliefProfile response_profile(const PopulationNetworkGame& game, const BeliefProfile& beliefs,
                               double beta);

// Homogeneous belief dynamics d mu_i/dt = (x_i - mu_i)/(lambda + t + 1); pinned
// populations get a zero derivative.
BeliefProfile homogeneous_rhs(const PopulationNetworkGame& game, const BeliefProfile& state,
                              double t, const SfpParams& params);

// Limit equation in tau-time: d mu_i/dtau = x_i - mu_i.
BeliefProfile autonomous_rhs(const PopulationNetworkGame& game, const BeliefProfile& state,
                             const SfpParams& params);

// tau = ln((lambda + t + 1)/(lambda + 1)) and its inverse.
double reparam_tau_of_t(double t, double lambda);
double reparam_t_of_tau(double tau, double lambda);

struct Trajectory {
  std::vector<double> times;
  std::vector<BeliefProfile> states;
  // Worst simplex violation seen before re-projection, across all stored and
  // intermediate states.
  double max_simplex_drift = 0.0;
};

// Fixed-step classical RK4 over a flat state vector; the final partial step
// lands exactly on t1. `project` may clean the state after each step.
struct OdeResult {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
};
OdeResult integrate_ode(const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& rhs,
                        std::vector<double> y0, double t0, double t1, double step,
                        const std::function<void(std::vector<double>&)>& project = {});

// Same stepping, final state only.
std::vector<double> advance_ode(
    const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& rhs,
    std::vector<double> y0, double t0, double t1, double step,
    const std::function<void(std::vector<double>&)>& project = {});

enum class TimeScale { RealTime, TauTime };

// RK4 on the homogeneous dynamics (in t, or the autonomous tau form).
// States are re-projected onto the simplex only when drift exceeds 1e-12.
Trajectory integrate_homogeneous(const PopulationNetworkGame& game, const BeliefProfile& start,
                                 double t0, double t1, double step, const SfpParams& params,
                                 TimeScale scale = TimeScale::TauTime);

// Final state of the homogeneous flow, no intermediate storage.
BeliefProfile advance_homogeneous(const PopulationNetworkGame& game, const BeliefProfile& start,
                                  double t0, double t1, double step, const SfpParams& params,
                                  TimeScale scale = TimeScale::TauTime);

// Belief profile with pinned populations forced to their fixed strategy.
BeliefProfile make_profile(const PopulationNetworkGame& game,
                           const std::vector<std::vector<double>>& learning_beliefs);
// Uniform interior profile (pinned populations at their fixed strategy).
BeliefProfile uniform_profile(const PopulationNetworkGame& game);

std::vector<double> flatten(const BeliefProfile& p);
BeliefProfile unflatten(const PopulationNetworkGame& game, const std::vector<double>& flat);

// Header `t,pop<i>_s<k>,...`, rows in %.17g.
std::string trajectory_csv(const PopulationNetworkGame& game, const Trajectory& traj);

}  // namespace pngsfp
