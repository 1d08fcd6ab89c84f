#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pngsfp/abm.hpp"
#include "pngsfp/equilibrium.hpp"
#include "pngsfp/experiments.hpp"
#include "pngsfp/moments.hpp"
#include "pngsfp/pde.hpp"

namespace py = pybind11;
using namespace pngsfp;

namespace {

SfpParams make_params(double beta, double lambda) { return {beta, lambda}; }

}  // namespace

PYBIND11_MODULE(_pngsfp, m) {
  m.doc() = "Smooth fictitious play in population network games";

  py::register_exception<ConfigError>(m, "GameConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

  py::class_<PopulationNetworkGame>(m, "Game")
      .def_static("stag_hunt", &stag_hunt)
      .def_static("matching_pennies", &asymmetric_matching_pennies)
      .def_static("from_json", &parse_game)
      .def_static("from_file", &load_game_file)
      .def("to_json", &serialize_game)
      .def_property_readonly("num_populations", &PopulationNetworkGame::num_populations)
      .def("strategies", &PopulationNetworkGame::strategies)
      .def_property_readonly("weights",
                             [](const PopulationNetworkGame& g) { return g.weights; })
      .def("__eq__", [](const PopulationNetworkGame& a, const PopulationNetworkGame& b) {
        return a == b;
      });

  m.def("expected_payoff", &expected_payoff, py::arg("game"), py::arg("population"),
        py::arg("profile"));
  m.def("is_weighted_zero_sum", [](const PopulationNetworkGame& g, std::vector<double> w) {
    auto r = is_weighted_zero_sum(g, w);
    return py::make_tuple(r.zero_sum, r.max_residual);
  });
  m.def("is_coordination", &is_coordination);
  m.def("is_star_forest", &is_star_forest);

  m.def("utilities", &utilities);
  m.def("logit", &logit);
  m.def("qre_map", &qre_map);
  m.def(
      "solve_qre",
      [](const PopulationNetworkGame& g, double beta, std::optional<BeliefProfile> start,
         double alpha, double tol, int max_iter) {
        auto sol = solve_qre(g, beta, start ? *start : uniform_profile(g), alpha, tol, max_iter);
        py::dict d;
        d["profile"] = sol.profile;
        d["residual"] = sol.residual;
        d["iterations"] = sol.iterations;
        d["converged"] = sol.converged;
        return d;
      },
      py::arg("game"), py::arg("beta"), py::arg("start") = std::nullopt, py::arg("alpha") = 0.5,
      py::arg("tol") = 1e-12, py::arg("max_iter") = 100000);
  m.def("discover_qre", [](const PopulationNetworkGame& g, double beta, int starts) {
    auto atlas = discover_qre(g, beta, starts);
    py::list out;
    for (const auto& q : atlas.qre) out.append(q.profile);
    return out;
  }, py::arg("game"), py::arg("beta"), py::arg("starts") = 64);

  m.def("zero_sum_lyapunov", &zero_sum_lyapunov);
  m.def("star_potential", &star_potential);
  m.def("variance_closed_form", &variance_closed_form);
  m.def("beta_moments", [](double a, double b) {
    auto [mean, var] = beta_moments(a, b);
    return py::make_tuple(mean, var);
  });

  m.def(
      "integrate_homogeneous",
      [](const PopulationNetworkGame& g, const BeliefProfile& start, double t_end, double step,
         double beta, double lambda, bool tau_time) {
        auto traj = integrate_homogeneous(g, start, 0.0, t_end, step, make_params(beta, lambda),
                                          tau_time ? TimeScale::TauTime : TimeScale::RealTime);
        return py::make_tuple(traj.times, traj.states);
      },
      py::arg("game"), py::arg("start"), py::arg("t_end"), py::arg("step") = 1e-2,
      py::arg("beta") = 10.0, py::arg("lam") = 10.0, py::arg("tau_time") = true);

  m.def(
      "integrate_moments",
      [](const PopulationNetworkGame& g, const BeliefProfile& mean,
         const std::vector<std::vector<double>>& var, double t_end, double step, double beta,
         double lambda) {
        MomentState st{mean, var};
        auto traj = integrate_moments(g, st, 0.0, t_end, step, make_params(beta, lambda));
        py::list means, vars;
        for (const auto& s : traj.states) {
          means.append(s.mean);
          vars.append(s.var);
        }
        return py::make_tuple(traj.times, means, vars);
      },
      py::arg("game"), py::arg("mean"), py::arg("var"), py::arg("t_end"), py::arg("step") = 1e-2,
      py::arg("beta") = 10.0, py::arg("lam") = 10.0);

  m.def(
      "run_abm",
      [](const PopulationNetworkGame& g, int agents, int steps, uint64_t seed, double beta,
         double lambda, const std::vector<std::vector<double>>& dirichlet_init) {
        SimConfig cfg;
        cfg.agents = agents;
        cfg.steps = steps;
        cfg.seed = seed;
        cfg.params = make_params(beta, lambda);
        for (const auto& alpha : dirichlet_init)
          cfg.init.push_back(BeliefInit{BeliefInit::Dirichlet{alpha}});
        auto series = run_abm(cfg, g);
        py::dict d;
        d["times"] = series.times;
        py::list mean_strategy, mean_belief, belief_var, strategy_var;
        for (const auto& st : series.stats) {
          mean_strategy.append(st.mean_strategy);
          mean_belief.append(st.mean_belief);
          belief_var.append(st.belief_var);
          strategy_var.append(st.strategy_var);
        }
        d["mean_strategy"] = mean_strategy;
        d["mean_belief"] = mean_belief;
        d["belief_var"] = belief_var;
        d["strategy_var"] = strategy_var;
        return d;
      },
      py::arg("game"), py::arg("agents"), py::arg("steps"), py::arg("seed"),
      py::arg("beta") = 10.0, py::arg("lam") = 10.0, py::arg("dirichlet_init"));

  m.def(
      "run_pde",
      [](const PopulationNetworkGame& g, double a, double b, int nodes, double t_end, double beta,
         double lambda, const std::vector<double>& snapshots) {
        auto run = run_pde(g, pde_state_from_beta(g, a, b, nodes), t_end,
                           make_params(beta, lambda), snapshots);
        py::dict d;
        d["times"] = run.times;
        d["max_mass_drift"] = run.max_mass_drift;
        py::list means, vars;
        for (size_t k = 0; k < run.times.size(); ++k) {
          py::list mk, vk;
          for (int i = 0; i < g.num_populations(); ++i) {
            if (run.moments[k][i]) {
              mk.append(run.moments[k][i]->mean);
              vk.append(run.moments[k][i]->variance);
            } else {
              mk.append(py::none());
              vk.append(py::none());
            }
          }
          means.append(mk);
          vars.append(vk);
        }
        d["mean"] = means;
        d["variance"] = vars;
        return d;
      },
      py::arg("game"), py::arg("a"), py::arg("b"), py::arg("nodes"), py::arg("t_end"),
      py::arg("beta") = 10.0, py::arg("lam") = 10.0, py::arg("snapshots"));
}
