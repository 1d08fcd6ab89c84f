#include <cmath>

#include "doctest.h"
#include "pngsfp/equilibrium.hpp"
#include "pngsfp/moments.hpp"
#include "pngsfp/rng.hpp"

using namespace pngsfp;

namespace {

BeliefProfile random_interior(const PopulationNetworkGame& game, Rng& rng) {
  BeliefProfile b(game.num_populations());
  for (int i = 0; i < game.num_populations(); ++i) {
    const auto& pop = game.populations[i];
    if (!pop.learning()) {
      b[i] = *pop.fixed;
      continue;
    }
    auto x = rng.dirichlet(std::vector<double>(pop.strategies, 1.0));
    for (double& v : x) v = 0.05 + 0.9 * v;
    double sum = 0.0;
    for (double v : x) sum += v;
    for (double& v : x) v /= sum;
    b[i] = std::move(x);
  }
  return b;
}

}  // namespace

TEST_CASE("qre_map basics") {
  const auto g = stag_hunt();
  // beta = 0 maps everything to uniform.
  auto u = qre_map(g, {{0.9, 0.1}, {0.2, 0.8}}, 0.0);
  CHECK(u[0][0] == doctest::Approx(0.5));
  CHECK(u[1][1] == doctest::Approx(0.5));
  // Hand value at mu = (0.7, 0.3): logit((1.3, 1.2), 10).
  auto m = qre_map(g, {{0.7, 0.3}, {0.7, 0.3}}, 10.0);
  const double xh = 1.0 / (1.0 + std::exp(-1.0));
  for (int i = 0; i < 2; ++i) {
    CHECK(m[i][0] == doctest::Approx(xh).epsilon(1e-12));
    CHECK(m[i][1] == doctest::Approx(1.0 - xh).epsilon(1e-12));
  }
}

TEST_CASE("fixed points map to themselves") {
  const auto g = stag_hunt();
  BeliefProfile x{{0.999, 0.001}, {0.999, 0.001}};
  for (int k = 0; k < 300; ++k) x = qre_map(g, x, 10.0);
  auto fx = qre_map(g, x, 10.0);
  for (int i = 0; i < 2; ++i)
    for (int s = 0; s < 2; ++s) CHECK(std::abs(fx[i][s] - x[i][s]) < 1e-14);
}

TEST_CASE("solve_qre on the matching pennies line") {
  const auto mp = asymmetric_matching_pennies();
  auto sol = solve_qre(mp, 10.0, uniform_profile(mp));
  CHECK(sol.converged);
  CHECK(sol.residual <= 1e-12);
  // Population 3 mixes fifty-fifty.
  CHECK(std::abs(sol.profile[2][0] - 0.5) < 1e-9);
  CHECK(std::abs(sol.profile[2][1] - 0.5) < 1e-9);
  // Populations 2 and 4 play T almost surely.
  CHECK(sol.profile[1][1] > 0.999);
  CHECK(sol.profile[3][1] > 0.999);
}

TEST_CASE("beta = 0 converges to uniform in one application") {
  const auto g = stag_hunt();
  auto sol = solve_qre(g, 0.0, {{0.88, 0.12}, {0.13, 0.87}});
  CHECK(sol.converged);
  for (int i = 0; i < 2; ++i) CHECK(sol.profile[i][0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("stag hunt at beta = 5 has two attracting QRE") {
  const auto g = stag_hunt();
  auto near_h = solve_qre(g, 5.0, {{0.95, 0.05}, {0.95, 0.05}});
  auto near_s = solve_qre(g, 5.0, {{0.05, 0.95}, {0.05, 0.95}});
  CHECK(near_h.converged);
  CHECK(near_s.converged);
  CHECK(near_h.residual <= 1e-12);
  CHECK(near_s.residual <= 1e-12);
  CHECK(near_h.profile[0][0] > 0.9);   // H-dominant
  CHECK(near_s.profile[0][0] < 0.05);  // S-dominant
  auto atlas = discover_qre(g, 5.0);
  CHECK(atlas.qre.size() == 2);
  CHECK(atlas.unconverged == 0);
}

TEST_CASE("zero-sum uniqueness: multistart agreement on matching pennies") {
  const auto mp = asymmetric_matching_pennies();
  Rng rng(21);
  std::vector<BeliefProfile> found;
  for (int k = 0; k < 20; ++k) {
    auto sol = solve_qre(mp, 10.0, random_interior(mp, rng));
    CHECK(sol.converged);
    found.push_back(sol.profile);
  }
  for (size_t a = 0; a < found.size(); ++a)
    for (size_t b = a + 1; b < found.size(); ++b)
      for (int i = 0; i < mp.num_populations(); ++i)
        for (int s = 0; s < 2; ++s) CHECK(std::abs(found[a][i][s] - found[b][i][s]) <= 1e-8);
}

TEST_CASE("perturbed payoff and its maximizer") {
  const auto lone = make_game({{"solo", 3, std::nullopt}}, {}, {1.0});
  const double beta = 2.0;
  // Uniform strategy, zero payoffs: value is ln(3)/beta.
  const BeliefProfile none{{1.0 / 3, 1.0 / 3, 1.0 / 3}};
  CHECK(perturbed_payoff(lone, 0, {1.0 / 3, 1.0 / 3, 1.0 / 3}, none, beta) ==
        doctest::Approx(std::log(3.0) / beta).epsilon(1e-12));
  CHECK_THROWS_AS(perturbed_payoff(lone, 0, {1.0 / 3, 1.0 / 3, 1.0 / 3}, none, 0.0), ConfigError);

  // The logit response maximizes pi over the simplex.
  const auto g = stag_hunt();
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto b = random_interior(g, rng);
    const auto star = logit(utilities(g, 0, b), beta);
    const double best = perturbed_payoff(g, 0, star, b, beta);
    // Dense grid oracle over the binary simplex.
    double grid_best = -1e300;
    for (int k = 1; k < 4000; ++k) {
      const double p = k / 4000.0;
      grid_best = std::max(grid_best, perturbed_payoff(g, 0, {p, 1.0 - p}, b, beta));
    }
    CHECK(best >= grid_best - 1e-8);
    CHECK(std::abs(best - grid_best) < 1e-6);
  }
}

TEST_CASE("zero-sum Lyapunov function") {
  const auto mp = asymmetric_matching_pennies();
  const double beta = 10.0;
  const std::vector<double> w(5, 1.0);

  // Non-negative everywhere, zero at the QRE.
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial)
    CHECK(zero_sum_lyapunov(mp, random_interior(mp, rng), beta, w) >= 0.0);

  auto sol = solve_qre(mp, beta, uniform_profile(mp));
  CHECK(zero_sum_lyapunov(mp, sol.profile, beta, w) <= 1e-10);

  // L > 0 away from the QRE (minimum is unique).
  auto off = sol.profile;
  off[2] = {0.6, 0.4};
  CHECK(zero_sum_lyapunov(mp, off, beta, w) > 1e-4);

  // Refuses non-zero-sum games and boundary beliefs.
  CHECK_THROWS_AS(zero_sum_lyapunov(stag_hunt(), {{0.5, 0.5}, {0.5, 0.5}}, beta, {1.0, 1.0}),
                  ConfigError);
  auto boundary = uniform_profile(mp);
  boundary[2] = {1.0, 0.0};
  CHECK_THROWS_AS(zero_sum_lyapunov(mp, boundary, beta, w), ConfigError);
}

TEST_CASE("Lyapunov value cross-checked against a direct maximization oracle") {
  const auto mp = asymmetric_matching_pennies();
  const double beta = 10.0;
  const auto b = uniform_profile(mp);
  // L = sum_i w_i (max_x pi_i(x) - pi_i(mu_i)). pi is strictly concave on the
  // binary simplex, so golden-section search finds the maximum to machine
  // precision without touching the logit formula.
  auto maximize = [&](int i) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 1e-15, hi = 1.0 - 1e-15;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = perturbed_payoff(mp, i, {x1, 1.0 - x1}, b, beta);
    double f2 = perturbed_payoff(mp, i, {x2, 1.0 - x2}, b, beta);
    for (int it = 0; it < 200; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = perturbed_payoff(mp, i, {x2, 1.0 - x2}, b, beta);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = perturbed_payoff(mp, i, {x1, 1.0 - x1}, b, beta);
      }
    }
    return std::max(f1, f2);
  };
  double expect = 0.0;
  for (int i = 1; i <= 3; ++i) expect += maximize(i) - perturbed_payoff(mp, i, b[i], b, beta);
  const double got = zero_sum_lyapunov(mp, b, beta, {1, 1, 1, 1, 1});
  CHECK(got == doctest::Approx(expect).epsilon(1e-10));
  CHECK(got >= 0.0);
}

TEST_CASE("star potential on the stag hunt") {
  const auto g = stag_hunt();
  const double beta = 10.0;
  const BeliefProfile uniform{{0.5, 0.5}, {0.5, 0.5}};
  // Canonical representative keeps the Table 1 entry sum: mu^T P mu at uniform
  // is 7/4, plus two entropy terms.
  CHECK(star_potential(g, uniform, beta) ==
        doctest::Approx(7.0 / 4.0 + 2.0 * std::log(2.0) / beta).epsilon(1e-12));
  // Entropy share vanishes as beta grows.
  CHECK(star_potential(g, uniform, 1e9) == doctest::Approx(7.0 / 4.0).epsilon(1e-9));

  // Either endpoint of a single edge may serve as the center.
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto b = random_interior(g, rng);
    const Matrix p01 = coordination_representative(g, 0, 1);
    const Matrix p10 = coordination_representative(g, 1, 0);
    CHECK(p01.rows == 2);
    double v01 = 0.0, v10 = 0.0;
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t) {
        v01 += b[0][s] * p01(s, t) * b[1][t];
        v10 += b[1][s] * p10(s, t) * b[0][t];
      }
    CHECK(v01 == doctest::Approx(v10).epsilon(1e-12));
  }

  CHECK_THROWS_AS(star_potential(asymmetric_matching_pennies(), uniform_profile(asymmetric_matching_pennies()), beta),
                  ConfigError);
}

TEST_CASE("canonical representative is symmetric for the stag hunt") {
  const auto g = stag_hunt();
  const Matrix p = coordination_representative(g, 0, 1);
  CHECK(p == p.transposed());
  // Column shifts leave utility differences unchanged.
  const Matrix& raw = g.edges[0].payoff_from_to;
  for (int c = 0; c < 2; ++c)
    CHECK(p(0, c) - p(1, c) == doctest::Approx(raw(0, c) - raw(1, c)).epsilon(1e-12));
}

TEST_CASE("check_monotone") {
  auto down = check_monotone({5.0, 4.0, 2.0, 1.5}, Direction::Decreasing);
  CHECK(down.ok);
  CHECK_FALSE(down.equality);
  auto flat = check_monotone({1.0, 1.0, 1.0}, Direction::Decreasing);
  CHECK(flat.ok);
  CHECK(flat.equality);
  auto broken = check_monotone({3.0, 2.0, 2.5, 1.0}, Direction::Decreasing);
  CHECK_FALSE(broken.ok);
  CHECK(broken.first_violation == 1);
  CHECK(broken.worst_step == doctest::Approx(0.5));
  auto up = check_monotone({0.0, 0.1, 0.1 + 5e-10}, Direction::Increasing);
  CHECK(up.ok);
  // Slack absorbs integrator noise.
  auto noisy = check_monotone({2.0, 1.0, 1.0 + 5e-10}, Direction::Decreasing, 1e-9);
  CHECK(noisy.ok);
}

namespace {

PopulationNetworkGame rock_paper_scissors() {
  Matrix a{{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}};
  return make_game({{"row", 3, std::nullopt}, {"col", 3, std::nullopt}}, {{0, 1, a, a}},
                   {1.0, 1.0});
}

}  // namespace

TEST_CASE("rock-paper-scissors: uniform QRE at every temperature") {
  const auto rps = rock_paper_scissors();
  CHECK(is_weighted_zero_sum(rps, {1.0, 1.0}).zero_sum);
  CHECK_FALSE(is_coordination(rps));
  Rng rng(61);
  // The cyclic payoff gives the response map purely imaginary eigenvalues
  // (+-i beta/sqrt(3) at the uniform point), so the damped iteration needs
  // damping below 2/(1 + beta^2/3); the solver must flag runs that spiral.
  auto spiral = solve_qre(rps, 12.0, random_interior(rps, rng), 0.5, 1e-12, 5000);
  CHECK_FALSE(spiral.converged);
  for (auto [beta, alpha] : {std::pair{0.5, 0.5}, {3.0, 0.3}, {12.0, 0.03}}) {
    auto sol = solve_qre(rps, beta, random_interior(rps, rng), alpha, 1e-12, 1000000);
    CHECK(sol.converged);
    for (int i = 0; i < 2; ++i)
      for (int s = 0; s < 3; ++s) CHECK(std::abs(sol.profile[i][s] - 1.0 / 3.0) < 1e-9);
  }
  // The Lyapunov value decreases along the three-strategy flow too.
  const SfpParams params{3.0, 10.0};
  auto traj = integrate_homogeneous(rps, random_interior(rps, rng), 0.0, 25.0, 1e-2, params,
                                    TimeScale::TauTime);
  std::vector<double> lyap;
  for (const auto& state : traj.states)
    lyap.push_back(zero_sum_lyapunov(rps, state, params.beta, rps.weights));
  auto rep = check_monotone(lyap, Direction::Decreasing, 1e-9);
  CHECK(rep.ok);
  CHECK(lyap.back() < 1e-10);
  // Mean derivative tangency for a 3-simplex moment state.
  MomentState st;
  st.mean = random_interior(rps, rng);
  st.var = {{0.02, 0.01, 0.015}, {0.01, 0.01, 0.01}};
  auto d = mean_variance_rhs(rps, st, 0.0, params);
  for (int i = 0; i < 2; ++i)
    CHECK(std::abs(d.mean[i][0] + d.mean[i][1] + d.mean[i][2]) < 1e-14);
}

TEST_CASE("moment trajectories on the zero-sum game reach the QRE") {
  // Heterogeneous convergence: integrate the mean dynamics with initial
  // variance from random interior means and check the terminal fixed-point
  // defect.
  const auto mp = asymmetric_matching_pennies();
  const SfpParams params{10.0, 10.0};
  Rng rng(71);
  for (int run = 0; run < 5; ++run) {
    const BeliefProfile start = random_interior(mp, rng);
    std::vector<std::vector<double>> s2(5);
    for (int i = 0; i < 5; ++i)
      s2[i].assign(2, mp.populations[i].learning() ? 0.01 : 0.0);
    TauRun traj = integrate_moments_tau(mp, start, s2, 40.0, 1e-2, params);
    const auto final = traj.means.back();
    const auto mapped = qre_map(mp, final, params.beta);
    double residual = 0.0;
    for (int i = 0; i < 5; ++i)
      for (int s = 0; s < 2; ++s)
        residual = std::max(residual, std::abs(mapped[i][s] - final[i][s]));
    CHECK(residual <= 1e-6);
    CHECK(std::abs(final[2][0] - 0.5) < 1e-6);
  }
}

TEST_CASE("damped iteration residual is monotone on sampled runs (flagged, not fatal)") {
  // Not guaranteed by the theory, so a violation only warns.
  Rng rng(81);
  for (const auto& game : {stag_hunt(), asymmetric_matching_pennies()}) {
    const double beta = 10.0;
    for (int run = 0; run < 5; ++run) {
      BeliefProfile x = random_interior(game, rng);
      double prev = 1e300;
      for (int it = 0; it < 300; ++it) {
        BeliefProfile tx = qre_map(game, x, beta);
        double res = 0.0;
        for (size_t i = 0; i < x.size(); ++i)
          for (size_t s = 0; s < x[i].size(); ++s)
            res = std::max(res, std::abs(tx[i][s] - x[i][s]));
        WARN_LE(res, prev * (1.0 + 1e-12));
        prev = res;
        for (size_t i = 0; i < x.size(); ++i)
          for (size_t s = 0; s < x[i].size(); ++s) x[i][s] = 0.5 * (x[i][s] + tx[i][s]);
      }
    }
  }
}

TEST_CASE("qre report JSON mentions every cluster") {
  const auto g = stag_hunt();
  auto atlas = discover_qre(g, 5.0);
  const std::string json = qre_report_json(g, atlas, 5.0);
  CHECK(json.find("\"clusters\": 2") != std::string::npos);
  CHECK(json.find("\"residual\"") != std::string::npos);
}
