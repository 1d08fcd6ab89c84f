import math

import pytest

import _pngsfp as png


def test_stag_hunt_payoffs():
    g = png.Game.stag_hunt()
    assert g.num_populations == 2
    assert png.expected_payoff(g, 0, [[0.0, 1.0], [0.0, 1.0]]) == pytest.approx(4.0)
    assert png.expected_payoff(g, 0, [[1.0, 0.0], [0.5, 0.5]]) == pytest.approx(1.5)
    assert png.is_coordination(g)
    assert png.is_star_forest(g)
    zero_sum, residual = png.is_weighted_zero_sum(g, [1.0, 1.0])
    assert not zero_sum and residual >= 8.0


def test_game_json_round_trip():
    g = png.Game.matching_pennies()
    assert png.Game.from_json(g.to_json()) == g


def test_logit_and_qre():
    assert png.logit([3.0, -2.0], 0.0) == pytest.approx([0.5, 0.5])
    x = png.logit([1.0, 0.0], 10.0)
    assert x[0] == pytest.approx(math.exp(10.0) / (math.exp(10.0) + 1.0))

    mp = png.Game.matching_pennies()
    sol = png.solve_qre(mp, 10.0)
    assert sol["converged"]
    assert sol["residual"] <= 1e-12
    assert sol["profile"][2][0] == pytest.approx(0.5, abs=1e-9)

    sh = png.Game.stag_hunt()
    qre = png.discover_qre(sh, 5.0)
    assert len(qre) == 2


def test_variance_closed_form_and_beta_moments():
    assert png.variance_closed_form(0.01, 10.0, 11.0) == pytest.approx(0.0025)
    mean, var = png.beta_moments(14.0, 6.0)
    assert mean == pytest.approx(0.7)
    assert var == pytest.approx(0.01)


def test_homogeneous_trajectory_reaches_a_qre():
    g = png.Game.stag_hunt()
    times, states = png.integrate_homogeneous(
        g, [[0.85, 0.15], [0.85, 0.15]], t_end=30.0, step=0.01, beta=10.0, lam=10.0
    )
    final = states[-1]
    res = png.qre_map(g, final, 10.0)
    for i in range(2):
        for s in range(2):
            assert res[i][s] == pytest.approx(final[i][s], abs=1e-6)


def test_moment_variance_decay():
    g = png.Game.stag_hunt()
    times, means, variances = png.integrate_moments(
        g, [[0.7, 0.3], [0.7, 0.3]], [[0.01, 0.01], [0.01, 0.01]], t_end=20.0
    )
    expected = png.variance_closed_form(0.01, 10.0, times[-1])
    assert variances[-1][0][0] == pytest.approx(expected, rel=1e-7)


def test_abm_smoke():
    g = png.Game.stag_hunt()
    out = png.run_abm(g, agents=100, steps=50, seed=1,
                      dirichlet_init=[[14.0, 6.0], [14.0, 6.0]])
    assert out["times"][-1] == 50
    # Belief variance decays.
    assert out["belief_var"][50][1][0] < out["belief_var"][0][1][0]
    # Determinism.
    again = png.run_abm(g, agents=100, steps=50, seed=1,
                        dirichlet_init=[[14.0, 6.0], [14.0, 6.0]])
    assert again["mean_strategy"][50] == out["mean_strategy"][50]


def test_pde_smoke():
    g = png.Game.stag_hunt()
    out = png.run_pde(g, a=14.0, b=6.0, nodes=100, t_end=2.0, snapshots=[0.0, 2.0])
    assert out["max_mass_drift"] < 1e-6
    assert out["variance"][1][0] < out["variance"][0][0]


def test_errors_surface_as_python_exceptions():
    g = png.Game.stag_hunt()
    with pytest.raises(ValueError):
        png.is_weighted_zero_sum(g, [1.0, -1.0])
    with pytest.raises(ValueError):
        png.Game.from_json("{}")
