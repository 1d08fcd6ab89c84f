#include <cmath>

#include "doctest.h"
#include "pngsfp/dynamics.hpp"
#include "pngsfp/rng.hpp"

using namespace pngsfp;

TEST_CASE("utilities against Table 1 columns") {
  const auto g = stag_hunt();
  BeliefProfile b{{0.5, 0.5}, {1.0, 0.0}};
  auto u = utilities(g, 0, b);  // belief about population 2 is pure H
  CHECK(u[0] == doctest::Approx(1.0));
  CHECK(u[1] == doctest::Approx(0.0));
  b[1] = {0.0, 1.0};  // pure S
  u = utilities(g, 0, b);
  CHECK(u[0] == doctest::Approx(2.0));
  CHECK(u[1] == doctest::Approx(4.0));

  auto lone = make_game({{"solo", 3, std::nullopt}}, {}, {1.0});
  auto u0 = utilities(lone, 0, {{0.2, 0.3, 0.5}});
  CHECK(u0 == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("logit basics") {
  CHECK(logit({3.0, -1.0, 7.0}, 0.0) == std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});
  auto same = logit({2.5, 2.5, 2.5, 2.5}, 8.0);
  for (double v : same) CHECK(v == doctest::Approx(0.25));
  auto x = logit({1.0, 0.0}, 10.0);
  CHECK(x[0] == doctest::Approx(std::exp(10.0) / (std::exp(10.0) + 1.0)).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(4.5398e-5).epsilon(1e-4));
}

TEST_CASE("logit stays on the simplex for huge utilities") {
  for (double scale : {1.0, 50.0, 250.0, 700.0}) {
    auto x = logit({scale, -scale, 0.25 * scale}, 1.0);
    double sum = 0.0;
    for (double v : x) {
      CHECK(v >= 0.0);
      CHECK(std::isfinite(v));
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("logit is strictly monotone in each utility") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> u{rng.uniform(), rng.uniform(), rng.uniform()};
    auto base = logit(u, 4.0);
    u[1] += 0.05;
    auto bumped = logit(u, 4.0);
    CHECK(bumped[1] > base[1]);
  }
}

TEST_CASE("homogeneous rhs hand value from the stag hunt") {
  const auto g = stag_hunt();
  const SfpParams params{10.0, 10.0};
  BeliefProfile mu{{0.7, 0.3}, {0.7, 0.3}};
  auto d = homogeneous_rhs(g, mu, 0.0, params);
  const double x_h = 1.0 / (1.0 + std::exp(-1.0));  // u = (1.3, 1.2)
  CHECK(d[0][0] == doctest::Approx((x_h - 0.7) / 11.0).epsilon(1e-9));
  CHECK(d[0][0] == doctest::Approx(2.824e-3).epsilon(1e-3));
  // Simplex tangency.
  CHECK(d[0][0] + d[0][1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(d[1][0] + d[1][1] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("QRE is a fixed point of both rhs forms") {
  const auto g = stag_hunt();
  const SfpParams params{10.0, 10.0};
  // Iterate the logit map to a fixed point first.
  BeliefProfile mu{{0.99, 0.01}, {0.99, 0.01}};
  for (int k = 0; k < 200; ++k) mu = response_profile(g, mu, params.beta);
  for (auto* rhs : {&mu}) {
    (void)rhs;
    auto dt = homogeneous_rhs(g, mu, 3.0, params);
    auto dtau = autonomous_rhs(g, mu, params);
    for (int i = 0; i < 2; ++i)
      for (int s = 0; s < 2; ++s) {
        CHECK(std::abs(dt[i][s]) < 1e-12);
        CHECK(std::abs(dtau[i][s]) < 1e-12);
      }
  }
}

TEST_CASE("autonomous rhs equals scaled homogeneous rhs") {
  const auto g = stag_hunt();
  const SfpParams params{7.0, 4.0};
  BeliefProfile mu{{0.42, 0.58}, {0.81, 0.19}};
  const double t = 2.5;
  auto a = autonomous_rhs(g, mu, params);
  auto h = homogeneous_rhs(g, mu, t, params);
  for (int i = 0; i < 2; ++i)
    for (int s = 0; s < 2; ++s)
      CHECK(a[i][s] == doctest::Approx(h[i][s] * (params.lambda + t + 1.0)).epsilon(1e-13));
}

TEST_CASE("pinned populations keep zero derivative") {
  const auto mp = asymmetric_matching_pennies();
  const SfpParams params{10.0, 10.0};
  BeliefProfile mu = uniform_profile(mp);
  auto d = autonomous_rhs(mp, mu, params);
  CHECK(d[0] == std::vector<double>{0.0, 0.0});
  CHECK(d[4] == std::vector<double>{0.0, 0.0});
}

TEST_CASE("time reparameterization") {
  CHECK(reparam_tau_of_t(0.0, 3.7) == 0.0);
  CHECK(reparam_tau_of_t(11.0, 10.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    const double lambda = 20.0 * rng.uniform();
    const double t = 1e4 * rng.uniform();
    CHECK(std::abs(reparam_t_of_tau(reparam_tau_of_t(t, lambda), lambda) - t) <=
          1e-12 * (1.0 + t));
  }
}

TEST_CASE("RK4 integrator accuracy and order on dy/dt = -y") {
  auto rhs = [](double, const std::vector<double>& y, std::vector<double>& dy) {
    dy = {-y[0]};
  };
  auto r = integrate_ode(rhs, {1.0}, 0.0, 1.0, 1e-3);
  CHECK(r.times.back() == 1.0);
  CHECK(std::abs(r.states.back()[0] - std::exp(-1.0)) < 1e-10);

  auto err = [&](double h) {
    auto run = integrate_ode(rhs, {1.0}, 0.0, 1.0, h);
    return std::abs(run.states.back()[0] - std::exp(-1.0));
  };
  const double ratio = err(0.02) / err(0.01);
  CHECK(ratio > 10.0);  // ~16 for a 4th order scheme
  CHECK(ratio < 24.0);
}

TEST_CASE("integrator handles rhs == 0 and lands exactly on t1") {
  auto rhs = [](double, const std::vector<double>& y, std::vector<double>& dy) {
    dy.assign(y.size(), 0.0);
  };
  auto r = integrate_ode(rhs, {0.25, 0.75}, 0.0, 0.997, 0.01);
  CHECK(r.times.back() == 0.997);
  CHECK(r.states.back() == std::vector<double>{0.25, 0.75});
}

TEST_CASE("integrator reports non-finite blowups") {
  auto rhs = [](double, const std::vector<double>& y, std::vector<double>& dy) {
    dy = {y[0] * y[0]};
  };
  CHECK_THROWS_AS(integrate_ode(rhs, {10.0}, 0.0, 10.0, 0.1), NumericError);
}

TEST_CASE("homogeneous trajectories stay on the simplex without projection") {
  const auto g = stag_hunt();
  const SfpParams params{10.0, 10.0};
  auto traj = integrate_homogeneous(g, {{0.7, 0.3}, {0.6, 0.4}}, 0.0, 50.0, 1e-2, params,
                                    TimeScale::RealTime);
  CHECK(traj.max_simplex_drift <= 1e-9);
  for (const auto& state : traj.states)
    for (const auto& mu : state)
      for (double v : mu) CHECK(v > 0.0);  // never reaches the boundary
}

TEST_CASE("t-time and tau-time homogeneous trajectories coincide under reparam") {
  const auto g = stag_hunt();
  const SfpParams params{10.0, 10.0};
  const BeliefProfile start{{0.55, 0.45}, {0.35, 0.65}};

  BeliefProfile in_t = start, in_tau = start;
  double t_prev = 0.0, tau_prev = 0.0;
  for (double t : {1.0, 5.0, 10.0, 25.0, 40.0}) {
    const double tau = reparam_tau_of_t(t, params.lambda);
    in_t = advance_homogeneous(g, in_t, t_prev, t, 1e-2, params, TimeScale::RealTime);
    in_tau = advance_homogeneous(g, in_tau, tau_prev, tau, 1e-3, params, TimeScale::TauTime);
    t_prev = t;
    tau_prev = tau;
    for (int i = 0; i < 2; ++i)
      for (int s = 0; s < 2; ++s) CHECK(std::abs(in_t[i][s] - in_tau[i][s]) < 1e-6);
  }
}

TEST_CASE("trajectory CSV format") {
  const auto g = stag_hunt();
  Trajectory traj;
  traj.times = {0.0, 0.5};
  traj.states = {{{0.7, 0.3}, {0.6, 0.4}}, {{0.71, 0.29}, {0.61, 0.39}}};
  const std::string csv = trajectory_csv(g, traj);
  CHECK(csv.substr(0, csv.find('\n')) == "t,pop1_s0,pop1_s1,pop2_s0,pop2_s1");
  CHECK(csv.find("0.70999999999999996") != std::string::npos);  // 17 significant digits
}
