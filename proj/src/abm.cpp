#include "pngsfp/abm.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "pngsfp/csv.hpp"
#include "pngsfp/rng.hpp"

namespace pngsfp {

void SimConfig::validate(const PopulationNetworkGame& game) const {
  params.validate();
  if (agents < 1) throw ConfigError("need at least one agent per population");
  if (steps < 0) throw ConfigError("steps must be >= 0");
  if (!(params.lambda > 0.0))
    throw ConfigError("the agent simulation needs lambda > 0 (beliefs are weights / weight sum)");
  if (static_cast<int>(init.size()) != game.num_populations())
    throw ConfigError("need one initial belief distribution per observed population");
  for (int j = 0; j < game.num_populations(); ++j) {
    const int ns = game.strategies(j);
    if (const auto* d = std::get_if<BeliefInit::Dirichlet>(&init[j].spec)) {
      if (static_cast<int>(d->alpha.size()) != ns)
        throw ConfigError("Dirichlet parameter count must match the strategy count");
      for (double a : d->alpha)
        if (!(a > 0.0)) throw ConfigError("Dirichlet parameters must be positive");
    } else {
      const auto& p = std::get<BeliefInit::Point>(init[j].spec);
      if (static_cast<int>(p.mu.size()) != ns)
        throw ConfigError("point-mass belief length must match the strategy count");
      check_simplex(p.mu, "point-mass initial belief");
    }
  }
}

AgentSystem init_population(const SimConfig& config, const PopulationNetworkGame& game) {
  config.validate(game);
  AgentSystem sys;
  sys.agents = config.agents;
  sys.step = 0;
  for (int i = 0; i < game.num_populations(); ++i) {
    if (!game.populations[i].learning()) continue;
    AgentSystem::ObserverBlock block;
    block.observer = i;
    for (const auto& nb : game.neighbors(i)) {
      const int j = nb.pop;
      const int ns = game.strategies(j);
      std::vector<double> w(static_cast<size_t>(config.agents) * ns);
      for (int k = 0; k < config.agents; ++k) {
        Rng rng = Rng::stream(config.seed, 1 + i, 1 + j, k);
        std::vector<double> mu;
        if (const auto* d = std::get_if<BeliefInit::Dirichlet>(&config.init[j].spec))
          mu = rng.dirichlet(d->alpha);
        else
          mu = std::get<BeliefInit::Point>(config.init[j].spec).mu;
        for (int s = 0; s < ns; ++s) w[static_cast<size_t>(k) * ns + s] = config.params.lambda * mu[s];
      }
      block.neighbors.push_back(j);
      block.w.push_back(std::move(w));
    }
    sys.blocks.push_back(std::move(block));
  }
  return sys;
}

namespace {

struct Accum {
  std::vector<double> sum, sumsq;
  long long n = 0;
  void init(int size) {
    sum.assign(size, 0.0);
    sumsq.assign(size, 0.0);
    n = 0;
  }
  void add(const double* x, int size) {
    for (int s = 0; s < size; ++s) {
      sum[s] += x[s];
      sumsq[s] += x[s] * x[s];
    }
    ++n;
  }
};

// One pass over all agents: computes strategies and statistics from the
// current weights and, if requested, applies the synchronous weight update
// with the pre-step population means.
void sweep(AgentSystem& sys, const PopulationNetworkGame& game, const SfpParams& params,
           SystemStats* stats, bool apply_update) {
  const int npop = game.num_populations();
  std::vector<Accum> strat(npop), belief(npop);
  for (int j = 0; j < npop; ++j) {
    strat[j].init(game.strategies(j));
    belief[j].init(game.strategies(j));
  }

  int max_s = 0;
  for (int j = 0; j < npop; ++j) max_s = std::max(max_s, game.strategies(j));
  std::vector<double> mu(max_s), u(max_s), x(max_s);

  for (auto& block : sys.blocks) {
    const int i = block.observer;
    const int ns_i = game.strategies(i);
    const int slots = static_cast<int>(block.neighbors.size());
    std::vector<const Matrix*> payoff(slots);
    for (int slot = 0; slot < slots; ++slot) payoff[slot] = game.neighbors(i)[slot].payoff;
    for (int k = 0; k < sys.agents; ++k) {
      std::fill(u.begin(), u.begin() + ns_i, 0.0);
      for (int slot = 0; slot < slots; ++slot) {
        const int j = block.neighbors[slot];
        const int ns_j = game.strategies(j);
        const double* w = block.w[slot].data() + static_cast<size_t>(k) * ns_j;
        double wsum = 0.0;
        for (int s = 0; s < ns_j; ++s) wsum += w[s];
        for (int s = 0; s < ns_j; ++s) mu[s] = w[s] / wsum;
        belief[j].add(mu.data(), ns_j);
        matvec_acc(*payoff[slot], mu.data(), u.data());
      }
      if (ns_i == 2) {
        x[0] = 1.0 / (1.0 + std::exp(params.beta * (u[1] - u[0])));
        x[1] = 1.0 - x[0];
      } else {
        // Logit with max-subtraction.
        double m = -HUGE_VAL;
        for (int s = 0; s < ns_i; ++s) m = std::max(m, params.beta * u[s]);
        double xsum = 0.0;
        for (int s = 0; s < ns_i; ++s) xsum += (x[s] = std::exp(params.beta * u[s] - m));
        for (int s = 0; s < ns_i; ++s) x[s] /= xsum;
      }
      strat[i].add(x.data(), ns_i);
    }
  }

  // Population means; pinned populations report their fixed strategy.
  std::vector<std::vector<double>> xbar(npop);
  for (int j = 0; j < npop; ++j) {
    const auto& pop = game.populations[j];
    if (!pop.learning())
      xbar[j] = *pop.fixed;
    else {
      xbar[j].resize(pop.strategies);
      for (int s = 0; s < pop.strategies; ++s) xbar[j][s] = strat[j].sum[s] / strat[j].n;
    }
  }

  if (stats) {
    stats->mean_strategy.assign(npop, {});
    stats->mean_belief.assign(npop, {});
    stats->belief_var.assign(npop, {});
    stats->strategy_var.assign(npop, {});
    for (int j = 0; j < npop; ++j) {
      const int ns = game.strategies(j);
      stats->mean_strategy[j] = xbar[j];
      stats->strategy_var[j].assign(ns, 0.0);
      if (game.populations[j].learning() && strat[j].n > 0)
        for (int s = 0; s < ns; ++s) {
          const double mean = xbar[j][s];
          stats->strategy_var[j][s] = std::max(0.0, strat[j].sumsq[s] / strat[j].n - mean * mean);
        }
      if (belief[j].n > 0) {
        stats->mean_belief[j].assign(ns, 0.0);
        stats->belief_var[j].assign(ns, 0.0);
        for (int s = 0; s < ns; ++s) {
          const double mean = belief[j].sum[s] / belief[j].n;
          stats->mean_belief[j][s] = mean;
          stats->belief_var[j][s] =
              std::max(0.0, belief[j].sumsq[s] / belief[j].n - mean * mean);
        }
      } else {  // nobody observes j
        stats->mean_belief[j] = xbar[j];
        stats->belief_var[j].assign(ns, 0.0);
      }
    }
  }

  if (apply_update) {
    // Synchronous update: every agent adds the same pre-step mean to its weights.
    for (auto& block : sys.blocks)
      for (size_t slot = 0; slot < block.neighbors.size(); ++slot) {
        const int j = block.neighbors[slot];
        const int ns_j = game.strategies(j);
        double* w = block.w[slot].data();
        const double* add = xbar[j].data();
        for (int k = 0; k < sys.agents; ++k, w += ns_j)
          for (int s = 0; s < ns_j; ++s) w[s] += add[s];
      }
    ++sys.step;
  }
}

}  // namespace

SystemStats population_stats(const AgentSystem& system, const PopulationNetworkGame& game,
                             const SfpParams& params) {
  SystemStats stats;
  sweep(const_cast<AgentSystem&>(system), game, params, &stats, /*apply_update=*/false);
  return stats;
}

void abm_step(AgentSystem& system, const PopulationNetworkGame& game, const SfpParams& params) {
  sweep(system, game, params, nullptr, /*apply_update=*/true);
}

AbmSeries run_abm(const SimConfig& config, const PopulationNetworkGame& game) {
  AgentSystem sys = init_population(config, game);
  AbmSeries series;
  series.times.reserve(config.steps + 1);
  series.stats.reserve(config.steps + 1);
  for (int t = 0; t < config.steps; ++t) {
    SystemStats st;
    sweep(sys, game, config.params, &st, /*apply_update=*/true);
    series.times.push_back(t);
    series.stats.push_back(std::move(st));
  }
  series.times.push_back(config.steps);
  series.stats.push_back(population_stats(sys, game, config.params));
  return series;
}

std::string abm_csv(const PopulationNetworkGame& game, const AbmSeries& series) {
  CsvWriter csv;
  csv.field("t");
  for (int i = 0; i < game.num_populations(); ++i) {
    const std::string id = game.populations[i].id;
    for (int s = 0; s < game.strategies(i); ++s) csv.field("pop" + id + "_mean_s" + std::to_string(s));
    for (int s = 0; s < game.strategies(i); ++s)
      csv.field("pop" + id + "_belief_var_s" + std::to_string(s));
    for (int s = 0; s < game.strategies(i); ++s)
      csv.field("pop" + id + "_strat_var_s" + std::to_string(s));
  }
  csv.endrow();
  for (size_t r = 0; r < series.times.size(); ++r) {
    csv.integer(series.times[r]);
    const SystemStats& st = series.stats[r];
    for (int i = 0; i < game.num_populations(); ++i) {
      for (double v : st.mean_strategy[i]) csv.number(v);
      for (double v : st.belief_var[i]) csv.number(v);
      for (double v : st.strategy_var[i]) csv.number(v);
    }
    csv.endrow();
  }
  return csv.str();
}

SimConfig sim_config_from_json(const std::string& json_text, const PopulationNetworkGame& game) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sim config is not valid JSON: ") + e.what());
  }
  SimConfig cfg;
  try {
    cfg.agents = j.value("agents", 1000);
    cfg.steps = j.value("steps", 1000);
    cfg.seed = j.value("seed", 0ULL);
    cfg.params.beta = j.value("beta", 10.0);
    cfg.params.lambda = j.value("lambda", 10.0);
    cfg.init.clear();
    const auto& init = j.at("init");
    for (int p = 0; p < game.num_populations(); ++p) {
      const auto& jp = init.at(game.populations[p].id);
      if (jp.contains("point"))
        cfg.init.push_back(BeliefInit::point(jp.at("point").get<std::vector<double>>()));
      else
        cfg.init.push_back(BeliefInit{
            BeliefInit::Dirichlet{jp.at("dirichlet").get<std::vector<double>>()}});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad sim config: ") + e.what());
  }
  cfg.validate(game);
  return cfg;
}

}  // namespace pngsfp
