#pragma once

#include <string>
#include <vector>

#include "pngsfp/dynamics.hpp"
#include "pngsfp/game.hpp"

namespace pngsfp {

// Mean belief plus per-coordinate belief variance (diagonal second-moment
// closure; no cross-coordinate or cross-population covariances).
struct MomentState {
  BeliefProfile mean;
  std::vector<std::vector<double>> var;  // Var(mu_is), pinned populations all zero

  void validate(const PopulationNetworkGame& game) const;
};

// Diagonal second derivatives of the logit choice f_{s_i} with respect to
// each neighbor belief coordinate mu_{j s_j}, evaluated at `beliefs`.
struct LogitHessianReport {
  std::vector<int> neighbor;       // population index per block
  std::vector<Matrix> d2;          // |S_i| x |S_j| blocks: d2(s_i, s_j)
};
LogitHessianReport logit_hessian_diag(const PopulationNetworkGame& game, int i,
                                      const BeliefProfile& beliefs, double beta);

// Joint mean/variance right-hand side in t-time.
struct MomentDeriv {
  BeliefProfile mean;
  std::vector<std::vector<double>> var;
};
MomentDeriv mean_variance_rhs(const PopulationNetworkGame& game, const MomentState& state,
                              double t, const SfpParams& params);

// Var(t) = ((lambda+1)/(lambda+t+1))^2 * sigma2.
double variance_closed_form(double sigma2, double lambda, double t);

// tau-time mean dynamics with the variance replaced by its closed form
// sigma2 * exp(-2 tau); converges uniformly to autonomous_rhs as tau grows.
BeliefProfile tau_mean_rhs(const PopulationNetworkGame& game, const BeliefProfile& mean,
                           const std::vector<std::vector<double>>& sigma2, double tau,
                           const SfpParams& params);

// Mean and variance of Beta(a, b).
std::pair<double, double> beta_moments(double a, double b);

struct MomentTrajectory {
  std::vector<double> times;
  std::vector<MomentState> states;
};

// RK4 in t-time on the joint mean/variance system.
MomentTrajectory integrate_moments(const PopulationNetworkGame& game, const MomentState& start,
                                   double t0, double t1, double step, const SfpParams& params);

// Same stepping without storing intermediate states; returns the state at t1.
MomentState advance_moments(const PopulationNetworkGame& game, const MomentState& start, double t0,
                            double t1, double step, const SfpParams& params);

// RK4 in tau-time on the mean system with closed-form variances. Stops early
// once the rhs max-norm falls to `stop_tol` (0 disables). Returns the final
// state and the tau actually reached.
struct TauRun {
  std::vector<double> taus;
  std::vector<BeliefProfile> means;
  bool converged = false;
};
TauRun integrate_moments_tau(const PopulationNetworkGame& game, const BeliefProfile& mean0,
                             const std::vector<std::vector<double>>& sigma2, double tau_end,
                             double step, const SfpParams& params, double stop_tol = 0.0);

// Header `t,mean_pop<i>_s<k>,var_pop<i>_s<k>,...`.
std::string moment_csv(const PopulationNetworkGame& game, const MomentTrajectory& traj);

// Moment state with every learning population's coordinates at the given
// mean/variance (binary populations: mean m for the first strategy).
MomentState uniform_binary_moment_state(const PopulationNetworkGame& game, double mean_first,
                                        double variance);

}  // namespace pngsfp
