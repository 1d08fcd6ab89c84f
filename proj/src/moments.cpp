#include "pngsfp/moments.hpp"

#include <algorithm>
#include <cmath>

#include "pngsfp/csv.hpp"

namespace pngsfp {

void MomentState::validate(const PopulationNetworkGame& game) const {
  if (static_cast<int>(mean.size()) != game.num_populations() ||
      static_cast<int>(var.size()) != game.num_populations())
    throw ConfigError("moment state must cover all populations");
  for (int i = 0; i < game.num_populations(); ++i) {
    const auto& pop = game.populations[i];
    if (static_cast<int>(mean[i].size()) != pop.strategies ||
        static_cast<int>(var[i].size()) != pop.strategies)
      throw ConfigError("moment state shape mismatch for population " + pop.id);
    check_simplex(mean[i], "mean belief about population " + pop.id);
    for (int s = 0; s < pop.strategies; ++s) {
      const double v = var[i][s];
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ConfigError("belief variance must be finite and >= 0");
      // Bhatia-Davis bound for [0,1]-valued coordinates.
      if (v > mean[i][s] * (1.0 - mean[i][s]) + 1e-9)
        throw ConfigError("belief variance exceeds the Bhatia-Davis bound");
      if (!pop.learning() && v != 0.0)
        throw ConfigError("pinned populations carry zero variance");
    }
  }
}

LogitHessianReport logit_hessian_diag(const PopulationNetworkGame& game, int i,
                                      const BeliefProfile& beliefs, double beta) {
  const std::vector<double> u = utilities(game, i, beliefs);
  const std::vector<double> f = logit(u, beta);
  const int ns = game.strategies(i);

  LogitHessianReport rep;
  for (const auto& nb : game.neighbors(i)) {
    const Matrix& a = *nb.payoff;
    Matrix block(ns, a.cols);
    for (int sj = 0; sj < a.cols; ++sj) {
      // Second derivative of softmax(beta * u) along the utility direction
      // d = beta * A[:, sj]:  d2 f_s = f_s ((d_s - m)^2 - v) with m, v the
      // f-weighted mean and variance of d.
      double m = 0.0;
      for (int s = 0; s < ns; ++s) m += f[s] * beta * a(s, sj);
      double v = 0.0;
      for (int s = 0; s < ns; ++s) {
        const double c = beta * a(s, sj) - m;
        v += f[s] * c * c;
      }
      for (int s = 0; s < ns; ++s) {
        const double c = beta * a(s, sj) - m;
        block(s, sj) = f[s] * (c * c - v);
      }
    }
    rep.neighbor.push_back(nb.pop);
    rep.d2.push_back(std::move(block));
  }
  return rep;
}

MomentDeriv mean_variance_rhs(const PopulationNetworkGame& game, const MomentState& state,
                              double t, const SfpParams& params) {
  const double scale = 1.0 / (params.lambda + t + 1.0);
  MomentDeriv d;
  d.mean = tau_mean_rhs(game, state.mean, state.var, 0.0, params);
  d.var.resize(game.num_populations());
  for (int i = 0; i < game.num_populations(); ++i) {
    const auto& pop = game.populations[i];
    d.var[i].assign(pop.strategies, 0.0);
    for (int s = 0; s < pop.strategies; ++s) {
      d.mean[i][s] *= scale;
      if (pop.learning()) d.var[i][s] = -2.0 * state.var[i][s] * scale;
    }
  }
  return d;
}

double variance_closed_form(double sigma2, double lambda, double t) {
  if (!(sigma2 >= 0.0)) throw ConfigError("sigma2 must be >= 0");
  if (!(t >= 0.0)) throw ConfigError("t must be >= 0");
  const double r = (lambda + 1.0) / (lambda + t + 1.0);
  return r * r * sigma2;
}

BeliefProfile tau_mean_rhs(const PopulationNetworkGame& game, const BeliefProfile& mean,
                           const std::vector<std::vector<double>>& sigma2, double tau,
                           const SfpParams& params) {
  const double decay = std::exp(-2.0 * tau);
  BeliefProfile d(game.num_populations());
  for (int i = 0; i < game.num_populations(); ++i) {
    const auto& pop = game.populations[i];
    d[i].assign(pop.strategies, 0.0);
    if (!pop.learning()) continue;
    const std::vector<double> f = logit(utilities(game, i, mean), params.beta);
    for (int s = 0; s < pop.strategies; ++s) d[i][s] = f[s] - mean[i][s];
    const LogitHessianReport h = logit_hessian_diag(game, i, mean, params.beta);
    for (size_t b = 0; b < h.neighbor.size(); ++b) {
      const int j = h.neighbor[b];
      if (!game.populations[j].learning()) continue;  // pinned beliefs carry no variance
      for (int s = 0; s < pop.strategies; ++s)
        for (int sj = 0; sj < game.strategies(j); ++sj)
          d[i][s] += 0.5 * h.d2[b](s, sj) * sigma2[j][sj] * decay;
    }
  }
  return d;
}

std::pair<double, double> beta_moments(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("Beta parameters must be positive");
  const double mean = a / (a + b);
  const double var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
  return {mean, var};
}

namespace {

std::vector<double> flatten_moments(const MomentState& st) {
  std::vector<double> flat = flatten(st.mean);
  for (const auto& v : st.var) flat.insert(flat.end(), v.begin(), v.end());
  return flat;
}

MomentState unflatten_moments(const PopulationNetworkGame& game, const std::vector<double>& flat) {
  MomentState st;
  const size_t half = flat.size() / 2;
  st.mean = unflatten(game, {flat.begin(), flat.begin() + half});
  auto vars = unflatten(game, {flat.begin() + half, flat.end()});
  st.var.assign(vars.begin(), vars.end());
  return st;
}

}  // namespace

MomentTrajectory integrate_moments(const PopulationNetworkGame& game, const MomentState& start,
                                   double t0, double t1, double step, const SfpParams& params) {
  params.validate();
  start.validate(game);
  const size_t half = flatten(start.mean).size();
  auto rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
    MomentDeriv d = mean_variance_rhs(game, unflatten_moments(game, y), t, params);
    dy = flatten_moments({d.mean, d.var});
  };
  auto project = [&](std::vector<double>& y) {
    for (size_t k = half; k < y.size(); ++k) y[k] = std::max(y[k], 0.0);
  };
  OdeResult r = integrate_ode(rhs, flatten_moments(start), t0, t1, step, project);
  MomentTrajectory traj;
  traj.times = std::move(r.times);
  for (auto& y : r.states) traj.states.push_back(unflatten_moments(game, y));
  return traj;
}

MomentState advance_moments(const PopulationNetworkGame& game, const MomentState& start, double t0,
                            double t1, double step, const SfpParams& params) {
  if (!(step > 0.0)) throw ConfigError("step must be positive");
  if (!(t1 >= t0)) throw ConfigError("t1 must be >= t0");
  const size_t half = flatten(start.mean).size();
  std::vector<double> y = flatten_moments(start);
  const size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto eval = [&](double t, const std::vector<double>& s, std::vector<double>& out) {
    MomentDeriv d = mean_variance_rhs(game, unflatten_moments(game, s), t, params);
    out = flatten_moments({d.mean, d.var});
  };
  double t = t0;
  while (t < t1) {
    const double h = std::min(step, t1 - t);
    eval(t, y, k1);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    eval(t + 0.5 * h, tmp, k2);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    eval(t + 0.5 * h, tmp, k3);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    eval(t + h, tmp, k4);
    for (size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t = (t1 - t <= step * (1.0 + 1e-12)) ? t1 : t + h;
    for (size_t i = half; i < n; ++i) y[i] = std::max(y[i], 0.0);
  }
  for (double v : y)
    if (!std::isfinite(v)) throw NumericError("non-finite moment state at t = " + std::to_string(t));
  return unflatten_moments(game, y);
}

TauRun integrate_moments_tau(const PopulationNetworkGame& game, const BeliefProfile& mean0,
                             const std::vector<std::vector<double>>& sigma2, double tau_end,
                             double step, const SfpParams& params, double stop_tol) {
  params.validate();
  TauRun run;
  run.taus.push_back(0.0);
  run.means.push_back(mean0);

  std::vector<double> y = flatten(mean0);
  const size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto eval = [&](double tau, const std::vector<double>& s, std::vector<double>& out) {
    out = flatten(tau_mean_rhs(game, unflatten(game, s), sigma2, tau, params));
  };
  double tau = 0.0;
  while (tau < tau_end) {
    const double h = std::min(step, tau_end - tau);
    eval(tau, y, k1);
    if (stop_tol > 0.0) {
      double norm = 0.0;
      for (double v : k1) norm = std::max(norm, std::abs(v));
      if (norm <= stop_tol) {
        run.converged = true;
        break;
      }
    }
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    eval(tau + 0.5 * h, tmp, k2);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    eval(tau + 0.5 * h, tmp, k3);
    for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    eval(tau + h, tmp, k4);
    for (size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    tau = (tau_end - tau <= step * (1.0 + 1e-12)) ? tau_end : tau + h;
    for (double v : y)
      if (!std::isfinite(v)) throw NumericError("non-finite state at tau = " + std::to_string(tau));
    run.taus.push_back(tau);
    run.means.push_back(unflatten(game, y));
  }
  return run;
}

std::string moment_csv(const PopulationNetworkGame& game, const MomentTrajectory& traj) {
  CsvWriter csv;
  csv.field("t");
  for (int i = 0; i < game.num_populations(); ++i)
    for (int s = 0; s < game.strategies(i); ++s)
      csv.field("mean_pop" + game.populations[i].id + "_s" + std::to_string(s));
  for (int i = 0; i < game.num_populations(); ++i)
    for (int s = 0; s < game.strategies(i); ++s)
      csv.field("var_pop" + game.populations[i].id + "_s" + std::to_string(s));
  csv.endrow();
  for (size_t r = 0; r < traj.times.size(); ++r) {
    csv.number(traj.times[r]);
    for (const auto& mu : traj.states[r].mean)
      for (double v : mu) csv.number(v);
    for (const auto& vv : traj.states[r].var)
      for (double v : vv) csv.number(v);
    csv.endrow();
  }
  return csv.str();
}

MomentState uniform_binary_moment_state(const PopulationNetworkGame& game, double mean_first,
                                        double variance) {
  MomentState st;
  st.mean.resize(game.num_populations());
  st.var.resize(game.num_populations());
  for (int i = 0; i < game.num_populations(); ++i) {
    const auto& pop = game.populations[i];
    if (!pop.learning()) {
      st.mean[i] = *pop.fixed;
      st.var[i].assign(pop.strategies, 0.0);
      continue;
    }
    if (pop.strategies != 2)
      throw ConfigError("uniform_binary_moment_state needs binary populations");
    st.mean[i] = {mean_first, 1.0 - mean_first};
    st.var[i] = {variance, variance};
  }
  st.validate(game);
  return st;
}

}  // namespace pngsfp
