#include "pngsfp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pngsfp/csv.hpp"

namespace pngsfp {

void SfpParams::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be finite and >= 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0");
}

std::vector<double> utilities(const PopulationNetworkGame& game, int i,
                              const BeliefProfile& beliefs) {
  if (static_cast<int>(beliefs.size()) != game.num_populations())
    throw ConfigError("belief profile must cover all populations");
  std::vector<double> u(game.strategies(i), 0.0);
  for (const auto& nb : game.neighbors(i)) {
    const auto& mu = beliefs[nb.pop];
    if (static_cast<int>(mu.size()) != game.strategies(nb.pop))
      throw ConfigError("missing or malformed neighbor belief");
    matvec_acc(*nb.payoff, mu.data(), u.data());
  }
  return u;
}

std::vector<double> logit(const std::vector<double>& u, double beta) {
  std::vector<double> x(u.size());
  double m = -HUGE_VAL;
  for (double v : u) m = std::max(m, beta * v);
  double sum = 0.0;
  for (size_t s = 0; s < u.size(); ++s) sum += (x[s] = std::exp(beta * u[s] - m));
  for (double& v : x) v /= sum;
  return x;
}

BeliefProfile response_profile(const PopulationNetworkGame& game, const BeliefProfile& beliefs,
                               double beta) {
  BeliefProfile x(game.num_populations());
  for (int i = 0; i < game.num_populations(); ++i) {
    const auto& pop = game.populations[i];
    x[i] = pop.learning() ? logit(utilities(game, i, beliefs), beta) : *pop.fixed;
  }
  return x;
}

BeliefProfile homogeneous_rhs(const PopulationNetworkGame& game, const BeliefProfile& state,
                              double t, const SfpParams& params) {
  BeliefProfile d = autonomous_rhs(game, state, params);
  const double scale = 1.0 / (params.lambda + t + 1.0);
  for (auto& di : d)
    for (double& v : di) v *= scale;
  return d;
}

BeliefProfile autonomous_rhs(const PopulationNetworkGame& game, const BeliefProfile& state,
                             const SfpParams& params) {
  BeliefProfile d(game.num_populations());
  for (int i = 0; i < game.num_populations(); ++i) {
    const auto& pop = game.populations[i];
    if (!pop.learning()) {
      d[i].assign(pop.strategies, 0.0);
      continue;
    }
    std::vector<double> x = logit(utilities(game, i, state), params.beta);
    d[i].resize(pop.strategies);
    for (int s = 0; s < pop.strategies; ++s) d[i][s] = x[s] - state[i][s];
  }
  return d;
}

double reparam_tau_of_t(double t, double lambda) {
  return std::log((lambda + t + 1.0) / (lambda + 1.0));
}

double reparam_t_of_tau(double tau, double lambda) {
  return (lambda + 1.0) * std::expm1(tau);
}

namespace {

template <typename OnStep>
void rk4_loop(const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& rhs,
              std::vector<double>& y, double t0, double t1, double step,
              const std::function<void(std::vector<double>&)>& project, OnStep&& on_step) {
  if (!(step > 0.0)) throw ConfigError("step must be positive");
  if (!(t1 > t0)) throw ConfigError("t1 must exceed t0");
  const size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = t0;
  while (t < t1) {
    const double h = std::min(step, t1 - t);
    rhs(t, y, k1);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, tmp, k2);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(t + 0.5 * h, tmp, k3);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(t + h, tmp, k4);
    for (size_t i = 0; i < n; ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t = (t1 - t <= step * (1.0 + 1e-12)) ? t1 : t + h;
    for (double v : y)
      if (!std::isfinite(v))
        throw NumericError("non-finite state at t = " + std::to_string(t));
    if (project) project(y);
    on_step(t, y);
  }
}

}  // namespace

OdeResult integrate_ode(const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& rhs,
                        std::vector<double> y0, double t0, double t1, double step,
                        const std::function<void(std::vector<double>&)>& project) {
  OdeResult out;
  out.times.push_back(t0);
  out.states.push_back(y0);
  std::vector<double> y = std::move(y0);
  rk4_loop(rhs, y, t0, t1, step, project, [&](double t, const std::vector<double>& state) {
    out.times.push_back(t);
    out.states.push_back(state);
  });
  return out;
}

std::vector<double> advance_ode(
    const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& rhs,
    std::vector<double> y0, double t0, double t1, double step,
    const std::function<void(std::vector<double>&)>& project) {
  if (t1 <= t0) return y0;
  std::vector<double> y = std::move(y0);
  rk4_loop(rhs, y, t0, t1, step, project, [](double, const std::vector<double>&) {});
  return y;
}

std::vector<double> flatten(const BeliefProfile& p) {
  std::vector<double> flat;
  for (const auto& mu : p) flat.insert(flat.end(), mu.begin(), mu.end());
  return flat;
}

BeliefProfile unflatten(const PopulationNetworkGame& game, const std::vector<double>& flat) {
  BeliefProfile p(game.num_populations());
  size_t k = 0;
  for (int i = 0; i < game.num_populations(); ++i) {
    p[i].assign(flat.begin() + k, flat.begin() + k + game.strategies(i));
    k += game.strategies(i);
  }
  return p;
}

namespace {

// Clip negatives and renormalize each population block, but only when the
// drift actually exceeds tolerance; records the worst violation seen.
void project_simplex_blocks(const PopulationNetworkGame& game, std::vector<double>& flat,
                            double* max_drift) {
  size_t k = 0;
  for (int i = 0; i < game.num_populations(); ++i) {
    const int ns = game.strategies(i);
    double sum = 0.0, neg = 0.0;
    for (int s = 0; s < ns; ++s) {
      sum += flat[k + s];
      neg = std::min(neg, flat[k + s]);
    }
    const double drift = std::max(std::abs(sum - 1.0), -neg);
    if (max_drift) *max_drift = std::max(*max_drift, drift);
    if (drift > 1e-12) {
      double clipped = 0.0;
      for (int s = 0; s < ns; ++s) clipped += (flat[k + s] = std::max(flat[k + s], 0.0));
      for (int s = 0; s < ns; ++s) flat[k + s] /= clipped;
    }
    k += ns;
  }
}

}  // namespace

Trajectory integrate_homogeneous(const PopulationNetworkGame& game, const BeliefProfile& start,
                                 double t0, double t1, double step, const SfpParams& params,
                                 TimeScale scale) {
  params.validate();
  Trajectory traj;
  auto rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
    BeliefProfile state = unflatten(game, y);
    BeliefProfile d = scale == TimeScale::RealTime ? homogeneous_rhs(game, state, t, params)
                                                   : autonomous_rhs(game, state, params);
    dy = flatten(d);
  };
  auto project = [&](std::vector<double>& y) {
    project_simplex_blocks(game, y, &traj.max_simplex_drift);
  };
  OdeResult r = integrate_ode(rhs, flatten(start), t0, t1, step, project);
  traj.times = std::move(r.times);
  traj.states.reserve(r.states.size());
  for (auto& y : r.states) traj.states.push_back(unflatten(game, y));
  return traj;
}

BeliefProfile advance_homogeneous(const PopulationNetworkGame& game, const BeliefProfile& start,
                                  double t0, double t1, double step, const SfpParams& params,
                                  TimeScale scale) {
  params.validate();
  auto rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
    BeliefProfile state = unflatten(game, y);
    BeliefProfile d = scale == TimeScale::RealTime ? homogeneous_rhs(game, state, t, params)
                                                   : autonomous_rhs(game, state, params);
    dy = flatten(d);
  };
  auto project = [&](std::vector<double>& y) { project_simplex_blocks(game, y, nullptr); };
  return unflatten(game, advance_ode(rhs, flatten(start), t0, t1, step, project));
}

BeliefProfile make_profile(const PopulationNetworkGame& game,
                           const std::vector<std::vector<double>>& learning_beliefs) {
  if (static_cast<int>(learning_beliefs.size()) != game.num_populations())
    throw ConfigError("need one belief vector per population");
  BeliefProfile p(game.num_populations());
  for (int i = 0; i < game.num_populations(); ++i) {
    const auto& pop = game.populations[i];
    p[i] = pop.learning() ? learning_beliefs[i] : *pop.fixed;
    if (static_cast<int>(p[i].size()) != pop.strategies)
      throw ConfigError("belief length mismatch for population " + pop.id);
    check_simplex(p[i], "belief about population " + pop.id);
  }
  return p;
}

BeliefProfile uniform_profile(const PopulationNetworkGame& game) {
  BeliefProfile p(game.num_populations());
  for (int i = 0; i < game.num_populations(); ++i) {
    const auto& pop = game.populations[i];
    if (pop.learning())
      p[i].assign(pop.strategies, 1.0 / pop.strategies);
    else
      p[i] = *pop.fixed;
  }
  return p;
}

std::string trajectory_csv(const PopulationNetworkGame& game, const Trajectory& traj) {
  CsvWriter csv;
  csv.field("t");
  for (int i = 0; i < game.num_populations(); ++i)
    for (int s = 0; s < game.strategies(i); ++s)
      csv.field("pop" + game.populations[i].id + "_s" + std::to_string(s));
  csv.endrow();
  for (size_t r = 0; r < traj.times.size(); ++r) {
    csv.number(traj.times[r]);
    for (const auto& mu : traj.states[r])
      for (double v : mu) csv.number(v);
    csv.endrow();
  }
  return csv.str();
}

}  // namespace pngsfp
