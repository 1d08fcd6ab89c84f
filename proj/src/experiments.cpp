#include "pngsfp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pngsfp/csv.hpp"
#include "pngsfp/rng.hpp"
#include "pngsfp/svg.hpp"

namespace pngsfp {

namespace {

namespace fs = std::filesystem;

// Deterministic task fan-out: every slot is written by exactly one task, so
// results do not depend on the worker count.
void parallel_for(int n, const std::function<void(int)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<unsigned>(hw, n > 0 ? n : 1));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += workers) fn(i);
    });
  for (auto& t : pool) t.join();
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

std::vector<int> thinned_times(int steps) {
  std::vector<int> times;
  for (int t = 0; t <= std::min(steps, 100); ++t) times.push_back(t);
  double t = 100.0;
  while (t < steps) {
    t = std::max(t * 1.08, t + 1.0);
    times.push_back(std::min(steps, static_cast<int>(t)));
  }
  times.push_back(steps);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

}  // namespace

Solver solver_from_name(const std::string& name) {
  if (name == "abm") return Solver::Abm;
  if (name == "moments") return Solver::Moments;
  if (name == "pde") return Solver::Pde;
  if (name == "homog" || name == "homogeneous") return Solver::Homogeneous;
  throw ConfigError("unknown solver '" + name + "' (abm|moments|pde|homog)");
}

PopulationNetworkGame resolve_game(const std::string& name_or_path) {
  if (name_or_path == "stag_hunt") return stag_hunt();
  if (name_or_path == "matching_pennies" || name_or_path == "asymmetric_matching_pennies")
    return asymmetric_matching_pennies();
  return load_game_file(name_or_path);
}

ExperimentConfig experiment_config_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config is not valid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg.kind = j.value("kind", cfg.kind);
    cfg.game = j.value("game", cfg.game);
    if (j.contains("solver")) cfg.solver = solver_from_name(j.at("solver").get<std::string>());
    cfg.params.beta = j.value("beta", cfg.params.beta);
    cfg.params.lambda = j.value("lambda", cfg.params.lambda);
    cfg.agents = j.value("agents", cfg.agents);
    cfg.runs = j.value("runs", cfg.runs);
    cfg.steps = j.value("steps", cfg.steps);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_dir = j.value("out", cfg.out_dir);
    cfg.grid = j.value("grid", cfg.grid);
    if (j.contains("variances")) cfg.variances = j.at("variances").get<std::vector<double>>();
    cfg.pde_nodes = j.value("pde_nodes", cfg.pde_nodes);
    cfg.t_end = j.value("t_end", cfg.t_end);
    cfg.step = j.value("step", cfg.step);
    cfg.tau_time = j.value("tau_time", cfg.tau_time);
    cfg.lyapunov = j.value("lyapunov", cfg.lyapunov);
    cfg.potential = j.value("potential", cfg.potential);
    cfg.svg = j.value("svg", cfg.svg);

    if (j.contains("init")) {
      const PopulationNetworkGame game = resolve_game(cfg.game);
      const auto& init = j.at("init");
      cfg.init.clear();
      BeliefProfile means(game.num_populations());
      cfg.init_variance.assign(game.num_populations(), {});
      bool any_mean = false;
      for (int i = 0; i < game.num_populations(); ++i) {
        const auto& pop = game.populations[i];
        if (!init.contains(pop.id)) {
          cfg.init.push_back(BeliefInit{
              BeliefInit::Dirichlet{std::vector<double>(pop.strategies, 2.0)}});
          means[i] = pop.learning() ? std::vector<double>(pop.strategies, 1.0 / pop.strategies)
                                    : *pop.fixed;
          cfg.init_variance[i].assign(pop.strategies, 0.0);
          continue;
        }
        const auto& ji = init.at(pop.id);
        if (ji.contains("beta")) {
          auto ab = ji.at("beta").get<std::vector<double>>();
          if (ab.size() != 2 || pop.strategies != 2)
            throw ConfigError("'beta' initial distributions need binary populations");
          cfg.init.push_back(BeliefInit::beta(ab[0], ab[1]));
          auto [m, v] = beta_moments(ab[0], ab[1]);
          means[i] = {m, 1.0 - m};
          cfg.init_variance[i] = {v, v};
          any_mean = true;
        } else if (ji.contains("dirichlet")) {
          auto alpha = ji.at("dirichlet").get<std::vector<double>>();
          cfg.init.push_back(BeliefInit{BeliefInit::Dirichlet{alpha}});
          double a0 = 0.0;
          for (double a : alpha) a0 += a;
          means[i].resize(alpha.size());
          cfg.init_variance[i].resize(alpha.size());
          for (size_t s = 0; s < alpha.size(); ++s) {
            means[i][s] = alpha[s] / a0;
            cfg.init_variance[i][s] = means[i][s] * (1.0 - means[i][s]) / (a0 + 1.0);
          }
          any_mean = true;
        } else {
          std::vector<double> mu = ji.contains("point")
                                       ? ji.at("point").get<std::vector<double>>()
                                       : ji.at("mean").get<std::vector<double>>();
          cfg.init.push_back(BeliefInit::point(mu));
          means[i] = mu;
          cfg.init_variance[i] = ji.contains("variance")
                                     ? ji.at("variance").get<std::vector<double>>()
                                     : std::vector<double>(mu.size(), 0.0);
          any_mean = true;
        }
      }
      if (any_mean) cfg.init_mean = means;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad experiment config: ") + e.what());
  }
  return cfg;
}

AveragedAbm averaged_abm(const PopulationNetworkGame& game, const SimConfig& base, int runs) {
  if (runs < 1) throw ConfigError("need at least one run");
  std::vector<AbmSeries> results(runs);
  parallel_for(runs, [&](int r) {
    SimConfig cfg = base;
    cfg.seed = Rng::mix(base.seed, static_cast<uint64_t>(r));
    results[r] = run_abm(cfg, game);
  });

  AveragedAbm avg;
  avg.times = results.front().times;
  avg.stats.resize(avg.times.size());
  const int npop = game.num_populations();
  for (size_t t = 0; t < avg.times.size(); ++t) {
    SystemStats& acc = avg.stats[t];
    acc = results.front().stats[t];
    for (int r = 1; r < runs; ++r) {
      const SystemStats& st = results[r].stats[t];
      for (int i = 0; i < npop; ++i)
        for (size_t s = 0; s < acc.mean_strategy[i].size(); ++s) {
          acc.mean_strategy[i][s] += st.mean_strategy[i][s];
          acc.mean_belief[i][s] += st.mean_belief[i][s];
          acc.belief_var[i][s] += st.belief_var[i][s];
          acc.strategy_var[i][s] += st.strategy_var[i][s];
        }
    }
    for (int i = 0; i < npop; ++i)
      for (size_t s = 0; s < acc.mean_strategy[i].size(); ++s) {
        acc.mean_strategy[i][s] /= runs;
        acc.mean_belief[i][s] /= runs;
        acc.belief_var[i][s] /= runs;
        acc.strategy_var[i][s] /= runs;
      }
  }
  return avg;
}

MomentTrajectory moments_at_times(const PopulationNetworkGame& game, const MomentState& start,
                                  const std::vector<int>& times, double step,
                                  const SfpParams& params) {
  MomentTrajectory traj;
  MomentState state = start;
  double t = 0.0;
  for (int target : times) {
    if (target > t) {
      state = advance_moments(game, state, t, target, step, params);
      t = target;
    }
    traj.times.push_back(t);
    traj.states.push_back(state);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// fig1

std::vector<std::string> run_fig1(const ExperimentConfig& config) {
  const PopulationNetworkGame game = stag_hunt();
  const std::vector<Fig1Case> cases = {{"small", 280.0, 120.0}, {"large", 14.0, 6.0}};
  std::vector<std::string> files;

  std::vector<SvgSeries> belief_series, strategy_series;
  const char* colors[2][2] = {{"#2d6cdf", "#9ec2ff"}, {"#d0342c", "#ffb3ad"}};

  for (size_t c = 0; c < cases.size(); ++c) {
    const auto& cs = cases[c];
    SimConfig sim;
    sim.agents = config.agents;
    sim.steps = config.steps;
    sim.params = config.params;
    sim.seed = Rng::mix(config.seed, 1000 + c);
    sim.init.assign(2, BeliefInit::beta(cs.beta_a, cs.beta_b));
    AveragedAbm abm = averaged_abm(game, sim, config.runs);

    auto [mean_h, var0] = beta_moments(cs.beta_a, cs.beta_b);
    MomentState m0 = uniform_binary_moment_state(game, mean_h, var0);
    const std::vector<int> marks = thinned_times(config.steps);
    MomentTrajectory mom = moments_at_times(game, m0, marks, config.step, config.params);

    CsvWriter csv;
    csv.field("t");
    for (const char* grp : {"abm_mean", "abm_belief", "abm_belief_var", "abm_strat_var"})
      for (int i = 0; i < 2; ++i)
        for (int s = 0; s < 2; ++s)
          csv.field(std::string(grp) + "_pop" + game.populations[i].id + "_s" + std::to_string(s));
    for (const char* grp : {"moment_mean", "moment_var"})
      for (int i = 0; i < 2; ++i)
        for (int s = 0; s < 2; ++s)
          csv.field(std::string(grp) + "_pop" + game.populations[i].id + "_s" + std::to_string(s));
    csv.endrow();

    SvgSeries abm_belief{"abm " + cs.name, colors[c][0], 3.0, {}, {}};
    SvgSeries mom_belief{"moment " + cs.name, colors[c][1], 1.5, {}, {}};
    SvgSeries abm_strat{"abm " + cs.name, colors[c][0], 3.0, {}, {}};
    SvgSeries mom_strat{"moment " + cs.name, colors[c][1], 1.5, {}, {}};

    for (size_t k = 0; k < marks.size(); ++k) {
      const int t = marks[k];
      const SystemStats& st = abm.stats[t];
      csv.integer(t);
      for (int i = 0; i < 2; ++i)
        for (int s = 0; s < 2; ++s) csv.number(st.mean_strategy[i][s]);
      for (int i = 0; i < 2; ++i)
        for (int s = 0; s < 2; ++s) csv.number(st.mean_belief[i][s]);
      for (int i = 0; i < 2; ++i)
        for (int s = 0; s < 2; ++s) csv.number(st.belief_var[i][s]);
      for (int i = 0; i < 2; ++i)
        for (int s = 0; s < 2; ++s) csv.number(st.strategy_var[i][s]);
      for (int i = 0; i < 2; ++i)
        for (int s = 0; s < 2; ++s) csv.number(mom.states[k].mean[i][s]);
      for (int i = 0; i < 2; ++i)
        for (int s = 0; s < 2; ++s) csv.number(mom.states[k].var[i][s]);
      csv.endrow();

      const double tp = t + 1.0;  // log axis
      abm_belief.x.push_back(tp);
      abm_belief.y.push_back(st.mean_belief[1][1]);  // belief about pop 2, S coordinate
      mom_belief.x.push_back(tp);
      mom_belief.y.push_back(mom.states[k].mean[1][1]);
      abm_strat.x.push_back(tp);
      abm_strat.y.push_back(st.mean_strategy[0][1]);  // pop 1 mean P(S)
      mom_strat.x.push_back(tp);
      mom_strat.y.push_back(mom.states[k].mean[0][1]);
    }
    const std::string path = out_path(config, "fig1_" + cs.name + ".csv");
    write_file(path, csv.str());
    files.push_back(path);
    belief_series.push_back(abm_belief);
    belief_series.push_back(mom_belief);
    strategy_series.push_back(abm_strat);
    strategy_series.push_back(mom_strat);
  }

  if (config.svg) {
    const std::string p1 = out_path(config, "fig1_beliefs.svg");
    write_file(p1, svg_line_chart({"Mean belief about population 2 (S)", "t + 1", "mu2S", true},
                                  belief_series));
    const std::string p2 = out_path(config, "fig1_strategies.svg");
    write_file(p2, svg_line_chart({"Population 1 mean P(S)", "t + 1", "x1S", true},
                                  strategy_series));
    files.push_back(p1);
    files.push_back(p2);
  }
  return files;
}

// ---------------------------------------------------------------------------
// roa

RoaResult run_roa(const ExperimentConfig& config) {
  const PopulationNetworkGame game = resolve_game(config.game);
  if (game.num_populations() != 2 || game.strategies(0) != 2 || game.strategies(1) != 2)
    throw ConfigError("the RoA sweep expects a 2-population binary game");
  const SfpParams params = config.params;

  QreAtlas atlas = discover_qre(game, params.beta);
  if (atlas.qre.empty()) throw NumericError("no QRE found by multistart");
  // Order clusters by population 1's P(S): index 0 is the most S-dominant.
  std::vector<int> order(atlas.qre.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return atlas.qre[a].profile[0][1] > atlas.qre[b].profile[0][1];
  });
  std::vector<BeliefProfile> qre;
  for (int k : order) qre.push_back(atlas.qre[k].profile);

  RoaResult result;
  result.variances = config.variances;
  const int n = config.grid;
  if (n < 2) throw ConfigError("grid must have at least 2 points per axis");

  const std::string qre_path = out_path(config, "roa_qre.json");
  write_file(qre_path, qre_report_json(game, atlas, params.beta));
  result.files.push_back(qre_path);

  for (size_t vi = 0; vi < config.variances.size(); ++vi) {
    const double sigma2 = config.variances[vi];
    if (!(sigma2 >= 0.0)) throw ConfigError("variances must be >= 0");
    std::vector<int> label(static_cast<size_t>(n) * n, -1);

    parallel_for(n * n, [&](int cell) {
      const int ix = cell % n;  // mu2H axis
      const int iy = cell / n;  // mu1H axis
      const double mu2 = static_cast<double>(ix) / (n - 1);
      const double mu1 = static_cast<double>(iy) / (n - 1);
      BeliefProfile mean{{mu1, 1.0 - mu1}, {mu2, 1.0 - mu2}};
      // Bhatia-Davis feasibility: a coordinate with mean m cannot carry more
      // variance than m(1-m).
      std::vector<std::vector<double>> s2(2);
      for (int i = 0; i < 2; ++i) {
        const double cap = mean[i][0] * (1.0 - mean[i][0]);
        s2[i].assign(2, std::min(sigma2, cap));
      }
      TauRun run = integrate_moments_tau(game, mean, s2, 200.0, config.step, params, 1e-8);
      if (!run.converged) return;
      const BeliefProfile& fin = run.means.back();
      double best = HUGE_VAL;
      for (size_t q = 0; q < qre.size(); ++q) {
        double d2 = 0.0;
        for (int i = 0; i < 2; ++i)
          for (int s = 0; s < 2; ++s) {
            const double d = fin[i][s] - qre[q][i][s];
            d2 += d * d;
          }
        if (d2 < best) {
          best = d2;
          label[cell] = static_cast<int>(q);
        }
      }
    });

    long s_cells = 0, unconv = 0;
    CsvWriter csv;
    csv.field("mu2H");
    csv.field("mu1H");
    csv.field("label");
    csv.endrow();
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int lab = label[static_cast<size_t>(iy) * n + ix];
        csv.number(static_cast<double>(ix) / (n - 1));
        csv.number(static_cast<double>(iy) / (n - 1));
        csv.integer(lab);
        if (lab == 0) ++s_cells;
        if (lab < 0) ++unconv;
      }

    std::ostringstream tag;
    tag << "roa_var" << sigma2;
    const std::string path = out_path(config, tag.str() + ".csv");
    write_file(path, csv.str());
    result.files.push_back(path);

    if (config.svg) {
      std::vector<std::string> colors = {"#f2c94c", "#2d6cdf", "#27ae60", "#8e44ad"};
      std::vector<std::string> legend;
      for (size_t q = 0; q < qre.size(); ++q)
        legend.push_back("QRE " + std::to_string(q) + (q == 0 ? " (S)" : ""));
      const std::string hp = out_path(config, tag.str() + ".svg");
      write_file(hp, svg_heatmap("RoA, initial variance " + std::to_string(sigma2), label, n, n,
                                 colors, legend));
      result.files.push_back(hp);
    }
    result.s_basin_fraction.push_back(static_cast<double>(s_cells) / (n * n));
    result.unconverged.push_back(static_cast<int>(unconv));
  }

  CsvWriter summary;
  summary.field("variance");
  summary.field("s_basin_fraction");
  summary.field("unconverged");
  summary.endrow();
  for (size_t vi = 0; vi < result.variances.size(); ++vi) {
    summary.number(result.variances[vi]);
    summary.number(result.s_basin_fraction[vi]);
    summary.integer(result.unconverged[vi]);
    summary.endrow();
  }
  const std::string spath = out_path(config, "roa_summary.csv");
  write_file(spath, summary.str());
  result.files.push_back(spath);
  return result;
}

// ---------------------------------------------------------------------------
// fig4

std::vector<std::string> run_fig4(const ExperimentConfig& config) {
  const PopulationNetworkGame game = asymmetric_matching_pennies();
  // Beliefs about populations 1, 3 and 5 keep the same distributions across
  // cases; the per-case beliefs about populations 2 and 4 are this project's
  // documented defaults.
  struct Case {
    std::string name;
    double a2, b2, a4, b4;
  };
  const std::vector<Case> cases = {{"B(2,8)-B(8,2)", 2, 8, 8, 2},
                                   {"B(5,5)-B(5,5)", 5, 5, 5, 5},
                                   {"B(8,2)-B(2,8)", 8, 2, 2, 8}};
  std::vector<std::string> files;
  std::vector<SvgSeries> series;
  const char* colors[3] = {"#2d6cdf", "#d0342c", "#27ae60"};

  for (size_t c = 0; c < cases.size(); ++c) {
    SimConfig sim;
    sim.agents = config.agents;
    sim.steps = config.steps;
    sim.params = config.params;
    sim.seed = Rng::mix(config.seed, 2000 + c);
    sim.init = {BeliefInit::beta(20, 10), BeliefInit::beta(cases[c].a2, cases[c].b2),
                BeliefInit::beta(6, 4), BeliefInit::beta(cases[c].a4, cases[c].b4),
                BeliefInit::beta(10, 5)};
    AveragedAbm abm = averaged_abm(game, sim, config.runs);

    const std::vector<int> marks = thinned_times(config.steps);
    CsvWriter csv;
    csv.field("t");
    for (int i = 1; i <= 3; ++i) {
      csv.field("pop" + std::to_string(i + 1) + "_mean_H");
      csv.field("pop" + std::to_string(i + 1) + "_strat_var_H");
    }
    csv.endrow();
    SvgSeries mean_line{cases[c].name, colors[c], 2.5, {}, {}};
    SvgSeries hi{"", colors[c], 0.8, {}, {}}, lo{"", colors[c], 0.8, {}, {}};
    for (int t : marks) {
      const SystemStats& st = abm.stats[t];
      csv.integer(t);
      for (int i = 1; i <= 3; ++i) {
        csv.number(st.mean_strategy[i][0]);
        csv.number(st.strategy_var[i][0]);
      }
      csv.endrow();
      mean_line.x.push_back(t + 1.0);
      mean_line.y.push_back(st.mean_strategy[2][0]);
      hi.x.push_back(t + 1.0);
      hi.y.push_back(st.mean_strategy[2][0] + st.strategy_var[2][0]);
      lo.x.push_back(t + 1.0);
      lo.y.push_back(st.mean_strategy[2][0] - st.strategy_var[2][0]);
    }
    const std::string path = out_path(config, "fig4_case" + std::to_string(c) + ".csv");
    write_file(path, csv.str());
    files.push_back(path);
    series.push_back(hi);
    series.push_back(lo);
    series.push_back(mean_line);
  }

  if (config.svg) {
    const std::string p = out_path(config, "fig4.svg");
    write_file(p, svg_line_chart({"Population 3 mean P(H), variance band", "t + 1", "x3H", true},
                                 series));
    files.push_back(p);
  }
  return files;
}

// ---------------------------------------------------------------------------
// custom

std::vector<std::string> run_custom(const ExperimentConfig& config) {
  const PopulationNetworkGame game = resolve_game(config.game);
  std::vector<std::string> files;

  const bool want_lyapunov = config.lyapunov;
  const bool want_potential = config.potential;
  if (want_lyapunov && !is_weighted_zero_sum(game, game.weights).zero_sum)
    throw ConfigError("lyapunov column requested but the game is not weighted zero-sum");
  if (want_potential && !(is_coordination(game) && is_star_forest(game)))
    throw ConfigError("potential column requested but the game is not star coordination");

  auto init_mean = [&]() -> BeliefProfile {
    if (config.init_mean) {
      BeliefProfile p = *config.init_mean;
      for (int i = 0; i < game.num_populations(); ++i)
        if (!game.populations[i].learning()) p[i] = *game.populations[i].fixed;
      for (int i = 0; i < game.num_populations(); ++i)
        check_simplex(p[i], "initial belief about population " + game.populations[i].id);
      return p;
    }
    return uniform_profile(game);
  };

  auto emit_profile_csv = [&](const std::vector<double>& times,
                              const std::vector<BeliefProfile>& states, const std::string& name) {
    CsvWriter csv;
    csv.field(config.tau_time ? "tau" : "t");
    for (int i = 0; i < game.num_populations(); ++i)
      for (int s = 0; s < game.strategies(i); ++s)
        csv.field("pop" + game.populations[i].id + "_s" + std::to_string(s));
    if (want_lyapunov) csv.field("lyapunov");
    if (want_potential) csv.field("potential");
    csv.endrow();
    for (size_t k = 0; k < times.size(); ++k) {
      csv.number(times[k]);
      for (const auto& mu : states[k])
        for (double v : mu) csv.number(v);
      if (want_lyapunov)
        csv.number(zero_sum_lyapunov(game, states[k], config.params.beta, game.weights));
      if (want_potential) csv.number(star_potential(game, states[k], config.params.beta));
      csv.endrow();
    }
    const std::string path = out_path(config, name);
    write_file(path, csv.str());
    files.push_back(path);

    if (config.svg) {
      std::vector<SvgSeries> series;
      const char* palette[6] = {"#2d6cdf", "#d0342c", "#27ae60", "#8e44ad", "#e67e22", "#16a085"};
      int cidx = 0;
      for (int i = 0; i < game.num_populations(); ++i) {
        if (!game.populations[i].learning()) continue;
        SvgSeries s{"pop " + game.populations[i].id, palette[cidx % 6], 1.8, {}, {}};
        ++cidx;
        for (size_t k = 0; k < times.size(); ++k) {
          s.x.push_back(times[k]);
          s.y.push_back(states[k][i][0]);
        }
        series.push_back(std::move(s));
      }
      const std::string svg_path = out_path(config, name.substr(0, name.size() - 4) + ".svg");
      write_file(svg_path,
                 svg_line_chart({"first-strategy coordinate",
                                 config.tau_time ? "tau" : "t", "mu", false},
                                series));
      files.push_back(svg_path);
    }
  };

  switch (config.solver) {
    case Solver::Homogeneous: {
      Trajectory traj = integrate_homogeneous(game, init_mean(), 0.0, config.t_end, config.step,
                                              config.params,
                                              config.tau_time ? TimeScale::TauTime : TimeScale::RealTime);
      emit_profile_csv(traj.times, traj.states, "custom_homogeneous.csv");
      break;
    }
    case Solver::Moments: {
      MomentState st;
      st.mean = init_mean();
      st.var = config.init_variance.empty()
                   ? std::vector<std::vector<double>>(game.num_populations())
                   : config.init_variance;
      for (int i = 0; i < game.num_populations(); ++i) {
        if (st.var[i].empty()) st.var[i].assign(game.strategies(i), 0.0);
        if (!game.populations[i].learning()) st.var[i].assign(game.strategies(i), 0.0);
      }
      st.validate(game);
      if (config.tau_time) {
        TauRun run = integrate_moments_tau(game, st.mean, st.var, config.t_end, config.step,
                                           config.params);
        emit_profile_csv(run.taus, run.means, "custom_moments.csv");
      } else {
        MomentTrajectory traj =
            integrate_moments(game, st, 0.0, config.t_end, config.step, config.params);
        const std::string path = out_path(config, "custom_moments.csv");
        write_file(path, moment_csv(game, traj));
        files.push_back(path);
      }
      break;
    }
    case Solver::Pde: {
      PdeState st;
      st.grids.resize(game.num_populations());
      for (int i = 0; i < game.num_populations(); ++i) {
        if (!game.populations[i].learning()) continue;
        const auto* d = config.init.empty()
                            ? nullptr
                            : std::get_if<BeliefInit::Dirichlet>(&config.init[i].spec);
        if (d && d->alpha.size() == 2)
          st.grids[i] = density_from_beta(d->alpha[0], d->alpha[1], config.pde_nodes);
        else
          st.grids[i] = density_from_beta(2.0, 2.0, config.pde_nodes);
      }
      std::vector<double> snaps;
      for (int k = 0; k <= 10; ++k) snaps.push_back(config.t_end * k / 10.0);
      PdeRun run = run_pde(game, std::move(st), config.t_end, config.params, snaps);
      const std::string dpath = out_path(config, "custom_density.csv");
      write_file(dpath, density_csv(game, run));
      files.push_back(dpath);
      CsvWriter mom;
      mom.field("t");
      for (int i = 0; i < game.num_populations(); ++i)
        if (game.populations[i].learning()) {
          mom.field("mean_pop" + game.populations[i].id);
          mom.field("var_pop" + game.populations[i].id);
        }
      mom.endrow();
      for (size_t k = 0; k < run.times.size(); ++k) {
        mom.number(run.times[k]);
        for (int i = 0; i < game.num_populations(); ++i)
          if (game.populations[i].learning()) {
            mom.number(run.moments[k][i]->mean);
            mom.number(run.moments[k][i]->variance);
          }
        mom.endrow();
      }
      const std::string mpath = out_path(config, "custom_density_moments.csv");
      write_file(mpath, mom.str());
      files.push_back(mpath);
      break;
    }
    case Solver::Abm: {
      SimConfig sim;
      sim.agents = config.agents;
      sim.steps = config.steps;
      sim.params = config.params;
      sim.seed = config.seed;
      sim.init = config.init;
      if (sim.init.empty())
        for (int i = 0; i < game.num_populations(); ++i)
          sim.init.push_back(BeliefInit{
              BeliefInit::Dirichlet{std::vector<double>(game.strategies(i), 2.0)}});
      AbmSeries series = config.runs <= 1
                             ? run_abm(sim, game)
                             : [&] {
                                 AveragedAbm avg = averaged_abm(game, sim, config.runs);
                                 AbmSeries s;
                                 s.times = avg.times;
                                 s.stats = avg.stats;
                                 return s;
                               }();
      const std::string path = out_path(config, "custom_abm.csv");
      write_file(path, abm_csv(game, series));
      files.push_back(path);
      break;
    }
  }
  return files;
}

}  // namespace pngsfp
