"""Special-case reference solvers: degeneracies, branches, conserved ratio."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp

import nmsir as nm
from nmsir.analysis import final_size_pairwise, reproduction_numbers

from conftest import rel_sup_diff

N, DEG = 1000, 15
TAU = 0.35


def _params(dist, i0=5, t_end=25.0):
    return nm.EpidemicParams(tau=TAU, dist=dist, initial_infected=i0, t_end=t_end)


def _no_recovery_oracle(t_eval):
    """Pairwise system without any recovery, integrated at tight tolerance."""
    link = TAU * (DEG - 1.0) / DEG

    def ode(t, u):
        S, SS, I, SI = u
        c = link * SI / S
        return [-TAU * SI, -2 * c * SS, TAU * SI, c * SS - c * SI - TAU * SI]

    S0, I0 = N - 5.0, 5.0
    u0 = [S0, DEG / N * S0 * S0, I0, DEG / N * S0 * I0]
    sol = solve_ivp(
        ode, (0.0, t_eval[-1]), u0, t_eval=t_eval, rtol=1e-11, atol=1e-11
    )
    return sol.y


def test_gamma_chain_with_one_stage_equals_markovian():
    p_gamma = _params(nm.GammaErlang(1, 2 / 3), t_end=20.0)
    p_exp = _params(nm.Exponential(2 / 3), t_end=20.0)
    chain = nm.solve_gamma_chain(p_gamma, num_nodes=N, degree=DEG, h=1e-2)
    markov = nm.solve_markovian_pairwise(p_exp, num_nodes=N, degree=DEG, h=1e-2)
    for name in ("S", "I", "SI", "SS"):
        np.testing.assert_allclose(
            chain.series(name), markov.series(name), rtol=1e-12, atol=1e-9
        )


def test_markovian_instant_recovery_limit():
    # gamma -> infinity (approximated by 1e3): nodes recover before they can
    # transmit, so the epidemic never takes off and the final size stays ~I0.
    p = _params(nm.Exponential(1000.0), t_end=5.0)
    traj = nm.solve_markovian_pairwise(p, num_nodes=N, degree=DEG, h=1e-3)
    assert traj.final_size(N) < 5.1
    assert traj.I[-1] < 1e-6


def test_fixed_delay_before_sigma_is_no_recovery_branch():
    p = _params(nm.FixedDuration(1.5), t_end=1.49)
    traj = nm.solve_fixed_delay_pairwise(p, num_nodes=N, degree=DEG, h=1e-2, t_end=1.4)
    oracle = _no_recovery_oracle(traj.t)
    assert np.max(np.abs(traj.S - oracle[0])) < 1e-6 * N
    assert np.max(np.abs(traj.I - oracle[2])) < 1e-6 * N


def test_uniform_before_lower_endpoint_is_no_recovery_branch():
    p = _params(nm.UniformInterval(1, 2), t_end=1.0)
    traj = nm.solve_uniform_delay_pairwise(p, num_nodes=N, degree=DEG, h=1e-2, t_end=0.9)
    oracle = _no_recovery_oracle(traj.t)
    assert np.max(np.abs(traj.I - oracle[2])) < 1e-6 * N


def test_sigma_not_on_grid_rejected():
    p = _params(nm.FixedDuration(1.5))
    with pytest.raises(ValueError, match="divide"):
        nm.solve_fixed_delay_pairwise(p, num_nodes=N, degree=DEG, h=0.4)


def test_kind_mismatch_rejected():
    p = _params(nm.Exponential(1.0))
    with pytest.raises(ValueError):
        nm.solve_gamma_chain(p, num_nodes=N, degree=DEG, h=1e-2)
    with pytest.raises(ValueError):
        nm.solve_fixed_delay_pairwise(p, num_nodes=N, degree=DEG, h=1e-2)
    with pytest.raises(ValueError):
        nm.solve_uniform_delay_pairwise(p, num_nodes=N, degree=DEG, h=1e-2)
    with pytest.raises(ValueError):
        nm.solve_markovian_pairwise(
            _params(nm.GammaErlang(3, 2 / 3)), num_nodes=N, degree=DEG, h=1e-2
        )


@pytest.mark.parametrize(
    "dist,solver",
    [
        (nm.Exponential(2 / 3), nm.solve_markovian_pairwise),
        (nm.FixedDuration(1.5), nm.solve_fixed_delay_pairwise),
        (nm.GammaErlang(3, 2 / 3), nm.solve_gamma_chain),
        (nm.UniformInterval(1, 2), nm.solve_uniform_delay_pairwise),
    ],
    ids=["exp", "fixed", "gamma", "uniform"],
)
def test_first_integral_drift_below_1e5(dist, solver):
    p = _params(dist, t_end=25.0)
    traj = solver(p, num_nodes=N, degree=DEG, h=1e-3)
    u = traj.SS / traj.S ** (2.0 * (DEG - 1) / DEG)
    assert np.max(np.abs(u / u[0] - 1.0)) < 1e-5


@pytest.mark.parametrize(
    "dist,solver",
    [
        (nm.Exponential(2 / 3), nm.solve_markovian_pairwise),
        (nm.FixedDuration(1.5), nm.solve_fixed_delay_pairwise),
        (nm.UniformInterval(1, 2), nm.solve_uniform_delay_pairwise),
    ],
    ids=["exp", "fixed", "uniform"],
)
def test_final_size_satisfies_pairwise_relation(dist, solver):
    p = _params(dist, t_end=40.0)
    traj = solver(p, num_nodes=N, degree=DEG, h=2e-3)
    rep = reproduction_numbers(TAU, DEG, N, N - 5.0, dist)
    theorem = final_size_pairwise(rep.r0p, DEG)
    s_traj = traj.S[-1] / (N - 5.0)
    attack_traj = 1.0 - s_traj
    assert abs(attack_traj - theorem.attack_rate) / theorem.attack_rate < 0.02


def test_gamma_chain_aggregate_matches_survival_quadrature():
    # Sum of stage occupancies equals the convolution of incidence with the
    # Erlang survival function plus the newborn boundary term.
    dist = nm.GammaErlang(3, 2 / 3)
    p = _params(dist, t_end=20.0)
    h = 1e-3
    traj = nm.solve_gamma_chain(p, num_nodes=N, degree=DEG, h=h)
    m = len(traj.t) - 1
    xi = np.asarray(dist.survival(np.arange(m + 1) * h))
    incidence = TAU * traj.SI
    conv = np.convolve(incidence, xi)[: m + 1]
    ends = 0.5 * (incidence[0] * xi + incidence * xi[0])
    i_quad = h * (conv - ends) + 5.0 * xi
    assert rel_sup_diff(i_quad, traj.I) < 1e-3


def test_gamma_chain_stage_layout():
    p = _params(nm.GammaErlang(3, 2 / 3), t_end=5.0)
    traj = nm.solve_gamma_chain(p, num_nodes=N, degree=DEG, h=1e-2)
    stages = traj.extra["I_stages"]
    assert stages.shape == (3, len(traj.t))
    np.testing.assert_allclose(stages.sum(axis=0), traj.I, rtol=1e-12)
    # Newborn seeding: all initial infecteds start in stage one.
    assert stages[0, 0] == 5.0
    assert stages[1, 0] == stages[2, 0] == 0.0
