#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pngsfp/experiments.hpp"

using namespace pngsfp;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonOpts {
  std::string config_path, out_dir, game, solver;
  uint64_t seed = 0;
  double beta = -1.0, lambda = -1.0;
  int steps = -1, grid = -1, agents = -1, runs = -1;
  bool has_seed = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "experiment config JSON");
  cmd->add_option("--seed", o.seed, "RNG seed")->each([&](std::string) { o.has_seed = true; });
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--solver", o.solver, "abm|moments|pde|homog");
  cmd->add_option("--beta", o.beta, "logit temperature");
  cmd->add_option("--lambda", o.lambda, "initial weight sum");
  cmd->add_option("--steps", o.steps, "ABM steps / discrete horizon");
  cmd->add_option("--grid", o.grid, "RoA grid resolution");
  cmd->add_option("--agents", o.agents, "agents per population");
  cmd->add_option("--runs", o.runs, "independent ABM runs");
  cmd->add_option("--game", o.game, "builtin game name or game-spec file");
}

ExperimentConfig build_config(const CommonOpts& o, const std::string& kind) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = experiment_config_from_json(slurp(o.config_path));
  cfg.kind = kind;
  if (!o.game.empty()) cfg.game = o.game;
  if (!o.solver.empty()) cfg.solver = solver_from_name(o.solver);
  if (o.beta >= 0.0) cfg.params.beta = o.beta;
  if (o.lambda >= 0.0) cfg.params.lambda = o.lambda;
  if (o.steps >= 0) cfg.steps = o.steps;
  if (o.grid > 0) cfg.grid = o.grid;
  if (o.agents > 0) cfg.agents = o.agents;
  if (o.runs > 0) cfg.runs = o.runs;
  if (o.has_seed) cfg.seed = o.seed;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  return cfg;
}

void report_files(const std::vector<std::string>& files) {
  for (const auto& f : files) std::cout << "wrote " << f << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smooth fictitious play in population network games"};
  app.require_subcommand(1);

  CommonOpts fig1_o, roa_o, fig4_o, custom_o, qre_o, validate_o;
  auto* fig1 = app.add_subcommand("fig1", "stag hunt: variance-dependent equilibrium selection");
  add_common(fig1, fig1_o);
  auto* roa = app.add_subcommand("roa", "regions of attraction over initial mean beliefs");
  add_common(roa, roa_o);
  auto* fig4 = app.add_subcommand("fig4", "matching pennies: unique equilibrium selection");
  add_common(fig4, fig4_o);
  auto* custom = app.add_subcommand("custom", "arbitrary game + solver run");
  add_common(custom, custom_o);

  auto* qre = app.add_subcommand("qre", "multistart QRE report");
  double qre_beta = 10.0;
  int qre_starts = 64;
  add_common(qre, qre_o);
  qre->add_option("--qre-beta", qre_beta, "temperature for the report (overrides --beta)");
  qre->add_option("--starts", qre_starts, "multistart count");

  auto* validate = app.add_subcommand("validate", "parse and classify a game spec");
  std::string validate_path;
  validate->add_option("game", validate_path, "game-spec file or builtin name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (fig1->parsed()) {
      ExperimentConfig cfg = build_config(fig1_o, "fig1");
      if (fig1_o.config_path.empty()) {
        cfg.params = {10.0, 10.0};
        if (fig1_o.beta >= 0) cfg.params.beta = fig1_o.beta;
        if (fig1_o.lambda >= 0) cfg.params.lambda = fig1_o.lambda;
      }
      report_files(run_fig1(cfg));
    } else if (roa->parsed()) {
      ExperimentConfig cfg = build_config(roa_o, "roa");
      if (roa_o.config_path.empty()) {
        cfg.params = {5.0, 0.0};
        if (roa_o.beta >= 0) cfg.params.beta = roa_o.beta;
        if (roa_o.lambda >= 0) cfg.params.lambda = roa_o.lambda;
      }
      RoaResult r = run_roa(cfg);
      for (size_t v = 0; v < r.variances.size(); ++v)
        std::cout << "variance " << r.variances[v] << ": S-basin fraction "
                  << r.s_basin_fraction[v] << " (" << r.unconverged[v] << " unconverged)\n";
      report_files(r.files);
    } else if (fig4->parsed()) {
      ExperimentConfig cfg = build_config(fig4_o, "fig4");
      report_files(run_fig4(cfg));
    } else if (custom->parsed()) {
      report_files(run_custom(build_config(custom_o, "custom")));
    } else if (qre->parsed()) {
      ExperimentConfig cfg = build_config(qre_o, "qre");
      if (qre_o.beta >= 0) cfg.params.beta = qre_o.beta;
      if (qre->count("--qre-beta")) cfg.params.beta = qre_beta;
      const PopulationNetworkGame game = resolve_game(cfg.game);
      QreAtlas atlas = discover_qre(game, cfg.params.beta, qre_starts);
      std::cout << qre_report_json(game, atlas, cfg.params.beta) << "\n";
    } else if (validate->parsed()) {
      const PopulationNetworkGame game = resolve_game(validate_path);
      ZeroSumReport zs = is_weighted_zero_sum(game, game.weights);
      std::cout << "populations: " << game.num_populations() << "\n"
                << "edges: " << game.edges.size() << "\n"
                << "weighted zero-sum (own weights): " << (zs.zero_sum ? "yes" : "no")
                << " (max residual " << zs.max_residual << ")\n"
                << "coordination: " << (is_coordination(game) ? "yes" : "no") << "\n"
                << "star forest: " << (is_star_forest(game) ? "yes" : "no") << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
