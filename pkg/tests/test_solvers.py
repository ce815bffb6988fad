"""Renewal-equation solvers vs closed-form references and generic-core checks."""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

import nmsir as nm
from nmsir.solvers import StepContractionError

from conftest import rel_sup_diff

N, DEG = 1000, 15


def _params(dist, i0=5, t_end=25.0):
    return nm.EpidemicParams(tau=0.35, dist=dist, initial_infected=i0, t_end=t_end)


# -- trivial branches ---------------------------------------------------------


def test_zero_initial_infecteds_stay_constant():
    p = _params(nm.Exponential(2 / 3), i0=0, t_end=5.0)
    for solve in (nm.solve_pairwise, nm.solve_meanfield):
        traj = solve(p, num_nodes=N, degree=DEG, config=nm.SolverConfig(h=0.01))
        assert np.allclose(traj.S, N, atol=1e-10)
        assert np.allclose(traj.I, 0.0, atol=1e-10)


# -- special-case oracles ------------------------------------------------------


def test_meanfield_exponential_matches_classical_ode():
    p = _params(nm.Exponential(2 / 3))
    mf = nm.solve_meanfield(p, num_nodes=N, degree=DEG, config=nm.SolverConfig(h=1e-3))
    ref = nm.solve_markovian_meanfield(p, num_nodes=N, degree=DEG, h=1e-3)
    assert rel_sup_diff(mf.I, ref.I) < 1e-4
    assert rel_sup_diff(mf.S, ref.S) < 1e-4


def test_meanfield_fixed_matches_delayed_ode():
    p = _params(nm.FixedDuration(1.5))
    mf = nm.solve_meanfield(p, num_nodes=N, degree=DEG, config=nm.SolverConfig(h=1e-3))
    ref = nm.solve_fixed_delay_meanfield(p, num_nodes=N, degree=DEG, h=1e-3)
    assert rel_sup_diff(mf.I, ref.I) < 1e-4


def test_pairwise_exponential_matches_markovian_ode():
    p = _params(nm.Exponential(2 / 3))
    pw = nm.solve_pairwise(p, num_nodes=N, degree=DEG, config=nm.SolverConfig(h=1e-3))
    ref = nm.solve_markovian_pairwise(p, num_nodes=N, degree=DEG, h=1e-3)
    assert rel_sup_diff(pw.I, ref.I) < 1e-3
    assert rel_sup_diff(pw.SI, ref.SI) < 1e-3


def test_pairwise_gamma_matches_stage_chain_coarse():
    # Full-resolution equivalence is acceptance criterion 3; this guards the
    # wiring at a cheaper step size.
    p = _params(nm.GammaErlang(3, 2 / 3))
    pw = nm.solve_pairwise(p, num_nodes=N, degree=DEG, config=nm.SolverConfig(h=5e-3))
    ref = nm.solve_gamma_chain(p, num_nodes=N, degree=DEG, h=5e-3)
    assert rel_sup_diff(pw.I, ref.I) < 1e-2


# -- structural invariants ------------------------------------------------------


def test_first_integral_exact_by_construction():
    p = _params(nm.UniformInterval(1, 2))
    pw = nm.solve_pairwise(p, num_nodes=N, degree=DEG, config=nm.SolverConfig(h=0.01))
    u = pw.SS / pw.S ** (2.0 * (DEG - 1) / DEG)
    assert np.max(np.abs(u / u[0] - 1.0)) < 1e-12


def test_independent_ss_drift_shrinks_with_h():
    p = _params(nm.Exponential(2 / 3), t_end=20.0)
    drifts = []
    for h in (0.02, 0.01):
        pw = nm.solve_pairwise(p, num_nodes=N, degree=DEG, config=nm.SolverConfig(h=h))
        u = pw.extra["SS_independent"] / pw.S ** (2.0 * (DEG - 1) / DEG)
        drifts.append(np.max(np.abs(u / u[0] - 1.0)))
    assert drifts[1] < drifts[0]
    assert drifts[1] < 5e-3


def test_node_conservation_with_independent_recovered_quadrature():
    # S + I + R_indep = N where R_indep integrates incidence against the cdf
    # (piecewise trapezoid: a jump node carries the average of its one-sided
    # limits, as for any discontinuous integrand).
    for dist in (nm.Exponential(2 / 3), nm.FixedDuration(1.5), nm.UniformInterval(1, 2)):
        p = _params(dist)
        pw = nm.solve_pairwise(p, num_nodes=N, degree=DEG, config=nm.SolverConfig(h=0.01))
        h = 0.01
        m = len(pw.t) - 1
        ages = np.arange(m + 1) * h
        cdf = np.asarray(dist.cdf(ages))
        atom, loc = dist.has_point_mass()
        if atom:
            cdf[int(round(loc / h))] = 0.5
        incidence = 0.35 * pw.SI
        conv = np.convolve(incidence, cdf)[: m + 1]
        ends = 0.5 * (incidence[0] * cdf + incidence * cdf[0])
        r_indep = h * (conv - ends) + 5.0 * np.asarray(dist.cdf(ages))
        assert np.max(np.abs(pw.S + pw.I + r_indep - N)) < 1e-3 * N


def test_series_nonnegative_all_kinds(all_dists):
    for dist in all_dists.values():
        p = _params(dist, t_end=20.0)
        pw = nm.solve_pairwise(p, num_nodes=N, degree=DEG, config=nm.SolverConfig(h=0.01))
        for name in ("S", "I", "R", "SI", "SS"):
            assert pw.series(name).min() > -1e-9


def test_susceptibles_strictly_decreasing_while_si_positive():
    p = _params(nm.GammaErlang(3, 2 / 3), t_end=15.0)
    pw = nm.solve_pairwise(p, num_nodes=N, degree=DEG, config=nm.SolverConfig(h=0.01))
    active = pw.SI[:-1] > 1e-8
    assert np.all(np.diff(pw.S)[active] < 0.0)


# -- stepping machinery ----------------------------------------------------------


def test_contraction_failure_raises():
    p = _params(nm.Exponential(2 / 3), t_end=10.0)
    with pytest.raises(StepContractionError):
        nm.solve_pairwise(p, num_nodes=N, degree=DEG, config=nm.SolverConfig(h=0.5))


def test_grid_snap_warning_recorded():
    p = _params(nm.FixedDuration(1.5037), t_end=5.0)
    pw = nm.solve_pairwise(p, num_nodes=N, degree=DEG, config=nm.SolverConfig(h=0.01))
    assert "grid_snap" in pw.meta
    assert pw.meta["dist"] == "fixed:sigma=1.5"


def test_support_below_half_step_rejected():
    p = _params(nm.FixedDuration(0.004), t_end=5.0)
    with pytest.raises(ValueError):
        nm.solve_pairwise(p, num_nodes=N, degree=DEG, config=nm.SolverConfig(h=0.01))


def test_tabulated_age_density_matches_newborn_for_exponential():
    # Memorylessness: any initial age profile with the same mass is
    # indistinguishable from newborn seeding under an exponential law.
    dist = nm.Exponential(2 / 3)
    p = _params(dist, t_end=10.0)
    ages = np.linspace(0.0, 40.0, 4001)
    density = 5.0 * (2 / 3) * np.exp(-(2 / 3) * ages)
    cfg = nm.SolverConfig(h=0.01, initial_age_density=(ages, density))
    tab = nm.solve_pairwise(p, num_nodes=N, degree=DEG, config=cfg)
    newborn = nm.solve_pairwise(
        p, num_nodes=N, degree=DEG, config=nm.SolverConfig(h=0.01)
    )
    assert rel_sup_diff(tab.I, newborn.I) < 1e-3


def test_tabulated_age_density_matches_stage_seeded_chain():
    # Erlang law with aged initial infecteds: an infected of age a occupies
    # stage j with probability (ra)^(j-1)/(j-1)! e^(-ra) / xi(a), so a stage
    # chain seeded with those occupancies is an independent oracle for the
    # generic solver's tabulated-age boundary machinery.
    shape, gamma = 3, 2.0 / 3.0
    dist = nm.GammaErlang(shape, gamma)
    r = dist.rate
    i0_total, tau = 5.0, 0.35
    n, Nf = float(DEG), float(N)
    s0 = Nf - i0_total

    ages = np.linspace(0.0, 12.0, 2401)
    density = ages * np.exp(-ages)
    density *= i0_total / np.trapezoid(density, ages)

    p = nm.EpidemicParams(tau=tau, dist=dist, initial_infected=5, t_end=12.0)
    cfg = nm.SolverConfig(h=5e-3, initial_age_density=(ages, density))
    general = nm.solve_pairwise(p, num_nodes=N, degree=DEG, config=cfg)

    xi = np.asarray(dist.survival(ages))
    stage_mass = [
        np.trapezoid(density * (r * ages) ** j * np.exp(-r * ages) / math.factorial(j) / xi, ages)
        for j in range(shape)
    ]
    assert sum(stage_mass) == pytest.approx(i0_total, rel=1e-6)

    link = tau * (n - 1.0) / n

    def chain(t, u):
        S, SS = u[0], u[1]
        i_st = u[2 : 2 + shape]
        si_st = u[2 + shape :]
        si = si_st.sum()
        c = link * si / S
        du = np.empty_like(u)
        du[0] = -tau * si
        du[1] = -2.0 * c * SS
        du[2] = tau * si - r * i_st[0]
        du[3:2 + shape] = r * (i_st[:-1] - i_st[1:])
        loss = c + tau + r
        du[2 + shape] = c * SS - loss * si_st[0]
        du[3 + shape:] = r * si_st[:-1] - loss * si_st[1:]
        return du

    u0 = np.concatenate(
        [[s0, (n / Nf) * s0 * s0], stage_mass, (n / Nf) * s0 * np.asarray(stage_mass)]
    )
    sol = solve_ivp(chain, (0.0, 12.0), u0, t_eval=general.t, rtol=1e-10, atol=1e-10)
    i_chain = sol.y[2 : 2 + shape].sum(axis=0)
    assert rel_sup_diff(general.I, i_chain) < 2e-3


def test_tabulated_age_density_rejected_for_bounded_support():
    p = _params(nm.FixedDuration(1.5), t_end=5.0)
    ages = np.linspace(0, 1, 11)
    cfg = nm.SolverConfig(h=0.01, initial_age_density=(ages, np.ones(11)))
    with pytest.raises(ValueError, match="survival"):
        nm.solve_pairwise(p, num_nodes=N, degree=DEG, config=cfg)


# -- generic memory integrator -----------------------------------------------------


def test_memory_ide_reduces_to_heun_second_order():
    errs = []
    for h in (0.02, 0.01):
        t, _, y = nm.solve_memory_ide(
            forcing=lambda x, y: -y, y0=1.0, h=h, t_end=5.0
        )
        errs.append(np.max(np.abs(y - np.exp(-t))))
    ratio = errs[0] / errs[1]
    assert 3.0 < ratio < 5.0  # order 2 halving
    assert errs[1] < 1e-4


def test_memory_ide_linear_renewal_closed_form():
    # y'(t) = -int_0^t f(t-a) y(a) da with f the Exp(4) density has the
    # resolvent solution y(t) = (1 + 2 t) exp(-2 t) (double root at s = -2).
    t, _, y = nm.solve_memory_ide(
        forcing=lambda x, y: 0.0,
        memory_kernel=lambda ages, xs, ys: 4.0 * np.exp(-4.0 * ages) * ys,
        y0=1.0,
        h=5e-3,
        t_end=8.0,
    )
    exact = (1.0 + 2.0 * t) * np.exp(-2.0 * t)
    assert np.max(np.abs(y - exact)) < 1e-4


def test_memory_ide_matches_ode_oracle_with_damping():
    # x' = -0.4 x y, y' = 0.5 - 0.3 y - z with z' reproducing the memory term
    # for kernel 0.8 e^{-1.2 a} (x + y/2) damped by exp(-(Phi(t)-Phi(a))):
    # differentiating gives z' = 0.8 (x + y/2) - (1.2 + G(x,y)) z.
    def g_rate(x, y):
        return 0.2 + 0.1 * y

    def ode(t, u):
        x, y, z = u
        return [
            -0.4 * x * y,
            0.5 - 0.3 * y - z,
            0.8 * (x + 0.5 * y) - (1.2 + g_rate(x, y)) * z,
        ]

    sol = solve_ivp(ode, (0, 6.0), [1.0, 0.5, 0.0], rtol=1e-11, atol=1e-12,
                    dense_output=True)
    t, x, y = nm.solve_memory_ide(
        deriv_x=lambda x, y: -0.4 * x * y,
        forcing=lambda x, y: 0.5 - 0.3 * y,
        memory_kernel=lambda ages, xs, ys: 0.8 * np.exp(-1.2 * ages) * (xs + 0.5 * ys),
        exponent_rate=g_rate,
        x0=1.0,
        y0=0.5,
        h=2e-3,
        t_end=6.0,
    )
    exact = sol.sol(t)
    assert np.max(np.abs(x - exact[0])) < 1e-5
    assert np.max(np.abs(y - exact[1])) < 1e-5
