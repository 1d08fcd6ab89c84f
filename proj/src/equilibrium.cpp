#include "pngsfp/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace pngsfp {

BeliefProfile qre_map(const PopulationNetworkGame& game, const BeliefProfile& profile,
                      double beta) {
  return response_profile(game, profile, beta);
}

namespace {

double profile_distance(const BeliefProfile& a, const BeliefProfile& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t s = 0; s < a[i].size(); ++s) d = std::max(d, std::abs(a[i][s] - b[i][s]));
  return d;
}

}  // namespace

QreSolution solve_qre(const PopulationNetworkGame& game, double beta, const BeliefProfile& start,
                      double alpha, double tol, int max_iter) {
  if (!(alpha > 0.0) || alpha > 1.0) throw ConfigError("damping must be in (0, 1]");
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");

  QreSolution best;
  best.profile = start;
  best.residual = HUGE_VAL;

  BeliefProfile x = start;
  for (int it = 0; it < max_iter; ++it) {
    BeliefProfile tx = qre_map(game, x, beta);
    const double res = profile_distance(tx, x);
    if (res < best.residual) {
      best.profile = x;
      best.residual = res;
      best.iterations = it;
    }
    if (res <= tol) {
      best.converged = true;
      return best;
    }
    for (size_t i = 0; i < x.size(); ++i)
      for (size_t s = 0; s < x[i].size(); ++s)
        x[i][s] = (1.0 - alpha) * x[i][s] + alpha * tx[i][s];
  }
  best.converged = false;
  return best;
}

QreAtlas discover_qre(const PopulationNetworkGame& game, double beta, int starts,
                      double cluster_tol) {
  QreAtlas atlas;
  // Kronecker (additive golden-ratio) sequence over the interior of each
  // simplex: deterministic, well spread, never on the boundary.
  constexpr double kPhiConj = 0.6180339887498949;
  int coord = 0;
  for (int k = 0; k < starts; ++k) {
    BeliefProfile p(game.num_populations());
    for (int i = 0; i < game.num_populations(); ++i) {
      const auto& pop = game.populations[i];
      if (!pop.learning()) {
        p[i] = *pop.fixed;
        continue;
      }
      std::vector<double> w(pop.strategies);
      double sum = 0.0;
      for (int s = 0; s < pop.strategies; ++s) {
        double u = std::fmod(0.5 + kPhiConj * (1 + k) * (1 + coord), 1.0);
        ++coord;
        sum += (w[s] = 0.02 + 0.96 * u);
      }
      for (double& v : w) v /= sum;
      p[i] = std::move(w);
    }
    QreSolution sol = solve_qre(game, beta, p);
    if (!sol.converged) {
      ++atlas.unconverged;
      continue;
    }
    bool merged = false;
    for (size_t c = 0; c < atlas.qre.size() && !merged; ++c)
      if (profile_distance(atlas.qre[c].profile, sol.profile) <= cluster_tol) {
        ++atlas.hits[c];
        if (sol.residual < atlas.qre[c].residual) atlas.qre[c] = sol;
        merged = true;
      }
    if (!merged) {
      atlas.qre.push_back(std::move(sol));
      atlas.hits.push_back(1);
    }
  }
  return atlas;
}

double entropy_term(const MixedStrategy& x, double beta) {
  if (!(beta > 0.0)) throw ConfigError("entropy perturbation needs beta > 0");
  double h = 0.0;
  for (double v : x) {
    if (v < 0.0) throw ConfigError("negative probability");
    if (v > 0.0) h -= v * std::log(v);
  }
  return h / beta;
}

double perturbed_payoff(const PopulationNetworkGame& game, int i, const MixedStrategy& x_i,
                        const BeliefProfile& beliefs, double beta) {
  const std::vector<double> u = utilities(game, i, beliefs);
  if (x_i.size() != u.size()) throw ConfigError("strategy length mismatch");
  double payoff = 0.0;
  for (size_t s = 0; s < u.size(); ++s) payoff += x_i[s] * u[s];
  return payoff + entropy_term(x_i, beta);
}

double zero_sum_lyapunov(const PopulationNetworkGame& game, const BeliefProfile& beliefs,
                         double beta, const std::vector<double>& weights) {
  ZeroSumReport zs = is_weighted_zero_sum(game, weights);
  if (!zs.zero_sum)
    throw ConfigError("zero_sum_lyapunov: game is not weighted zero-sum (residual " +
                      std::to_string(zs.max_residual) + ")");
  double total = 0.0;
  for (int i = 0; i < game.num_populations(); ++i) {
    const auto& pop = game.populations[i];
    if (!pop.learning()) continue;  // pinned populations contribute exactly 0
    for (double v : beliefs[i])
      if (!(v > 0.0))
        throw ConfigError("zero_sum_lyapunov: boundary belief about population " + pop.id);
    const std::vector<double> x = logit(utilities(game, i, beliefs), beta);
    total += weights[i] * (perturbed_payoff(game, i, x, beliefs, beta) -
                           perturbed_payoff(game, i, beliefs[i], beliefs, beta));
  }
  return total;
}

Matrix coordination_representative(const PopulationNetworkGame& game, int root, int leaf) {
  const Matrix* a_rl = nullptr;
  for (const auto& nb : game.neighbors(root))
    if (nb.pop == leaf) a_rl = nb.payoff;
  const Matrix* a_lr = nullptr;
  for (const auto& nb : game.neighbors(leaf))
    if (nb.pop == root) a_lr = nb.payoff;
  if (!a_rl || !a_lr) throw ConfigError("no edge between the requested populations");

  // M = A_rl - A_lr^T must factor as M[s][t] = d_s - c_t; then
  // P = A_rl + 1 c^T is the shared payoff matrix both endpoints maximize.
  const Matrix at = a_lr->transposed();
  const int r = a_rl->rows, c = a_rl->cols;
  std::vector<double> colmean(c, 0.0);
  double grand = 0.0;
  for (int p = 0; p < r; ++p)
    for (int q = 0; q < c; ++q) {
      const double d = (*a_rl)(p, q) - at(p, q);
      colmean[q] += d / r;
      grand += d / (r * c);
    }
  Matrix rep = *a_rl;
  for (int q = 0; q < c; ++q) {
    const double shift = 0.5 * grand - colmean[q];
    for (int p = 0; p < r; ++p) rep(p, q) += shift;
  }
  // Consistency: rep^T must equal A_lr up to a per-root-strategy shift.
  Matrix check = rep.transposed();
  for (int q = 0; q < check.cols; ++q) {
    const double delta = check(0, q) - (*a_lr)(0, q);
    for (int p = 0; p < check.rows; ++p)
      if (std::abs(check(p, q) - (*a_lr)(p, q) - delta) > 1e-9)
        throw ConfigError("edge is not a coordination subgame");
  }
  return rep;
}

double star_potential(const PopulationNetworkGame& game, const BeliefProfile& beliefs,
                      double beta) {
  if (!is_coordination(game)) throw ConfigError("star_potential needs a coordination game");
  if (!is_star_forest(game)) throw ConfigError("star_potential needs a star-forest network");

  double total = 0.0;
  for (int root : star_roots(game)) {
    total += entropy_term(beliefs[root], beta);
    for (const auto& nb : game.neighbors(root)) {
      const Matrix p = coordination_representative(game, root, nb.pop);
      double quad = 0.0;
      for (int s = 0; s < p.rows; ++s)
        for (int t = 0; t < p.cols; ++t) quad += beliefs[root][s] * p(s, t) * beliefs[nb.pop][t];
      total += quad + entropy_term(beliefs[nb.pop], beta);
    }
  }
  return total;
}

MonotoneReport check_monotone(const std::vector<double>& values, Direction direction,
                              double slack) {
  MonotoneReport rep;
  double max_abs_step = 0.0;
  for (size_t k = 0; k + 1 < values.size(); ++k) {
    const double delta = values[k + 1] - values[k];
    max_abs_step = std::max(max_abs_step, std::abs(delta));
    const double violation = direction == Direction::Decreasing ? delta : -delta;
    if (violation > slack) {
      if (rep.ok) {
        rep.ok = false;
        rep.first_violation = static_cast<long>(k);
      }
      if (violation > rep.worst_step) rep.worst_step = violation;
    }
  }
  rep.equality = rep.ok && max_abs_step <= slack;
  return rep;
}

std::string qre_report_json(const PopulationNetworkGame& game, const QreAtlas& atlas,
                            double beta) {
  nlohmann::json j;
  j["beta"] = beta;
  j["clusters"] = atlas.qre.size();
  j["unconverged_starts"] = atlas.unconverged;
  j["qre"] = nlohmann::json::array();
  for (size_t c = 0; c < atlas.qre.size(); ++c) {
    nlohmann::json entry;
    entry["residual"] = atlas.qre[c].residual;
    entry["iterations"] = atlas.qre[c].iterations;
    entry["starts"] = atlas.hits[c];
    nlohmann::json prof = nlohmann::json::object();
    for (int i = 0; i < game.num_populations(); ++i)
      prof[game.populations[i].id] = atlas.qre[c].profile[i];
    entry["profile"] = std::move(prof);
    j["qre"].push_back(std::move(entry));
  }
  return j.dump(2);
}

}  // namespace pngsfp
