"""Closed-form special-case solvers used as cross-checks and fast paths.

For particular recovery laws the general renewal systems collapse to ordinary
or delay differential equations:

* exponential       -> the classical Markovian pairwise / mean-field ODEs,
* fixed duration    -> DDEs with one discrete delay plus a state jump when
                       the initial (newborn) infecteds all recover at sigma,
* Erlang (gamma)    -> a linear chain of K exponential stages for both nodes
                       and links,
* uniform interval  -> distributed delays over a moving window, reduced here
                       to discrete-delay form through cumulative auxiliary
                       variables (the windowed integrals telescope).

All solvers use fixed-step classical RK4 on the same grid as the generic
solver.  Delayed evaluations at RK4 stage times are served by cubic Hermite
interpolation of the stored node history; branch switches and state jumps
are aligned to grid nodes, and each step evaluates the branch chosen by its
*starting* node so that every step integrates a smooth piece.
"""

from __future__ import annotations

import math

import numpy as np

from .recovery import Exponential, FixedDuration, GammaErlang, UniformInterval
from .trajectory import EpidemicParams, Trajectory

__all__ = [
    "solve_markovian_pairwise",
    "solve_markovian_meanfield",
    "solve_fixed_delay_pairwise",
    "solve_fixed_delay_meanfield",
    "solve_gamma_chain",
    "solve_uniform_delay_pairwise",
]


def _grid(t_end: float, h: float) -> tuple[int, float]:
    steps = int(round(t_end / h))
    if steps < 1:
        raise ValueError("t_end must cover at least one step")
    return steps, steps * h


def _node_index(value: float, h: float, name: str) -> int:
    j = int(round(value / h))
    if j < 1:
        raise ValueError(f"{name}={value} must be at least one step h={h}")
    if abs(j * h - value) > 1e-9 * max(1.0, value):
        raise ValueError(f"h={h} must divide {name}={value} (snap it first)")
    return j


def _march_delay_rk4(rhs, u0, h: float, steps: int, jumps: dict | None = None):
    """Classical RK4 with node history, Hermite delayed lookup, node jumps.

    ``rhs(t, u, lookup, t0)`` receives the step's starting node time ``t0``
    for branch decisions.  ``jumps`` maps node index -> fn(u) -> u, applied
    after the step landing on that node; the pre-jump state and left-limit
    derivative stay available to interpolation of the preceding panel.
    Delayed arguments must trail the current time by at least one step.
    """
    jumps = jumps or {}
    u0 = np.asarray(u0, dtype=float)
    m = u0.size
    U = np.empty((steps + 1, m))
    D = np.zeros((steps + 1, m))
    U[0] = u0
    pre_jump: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def lookup(tq: float) -> np.ndarray:
        j = tq / h
        j0 = int(j)
        theta = j - j0
        if theta < 1e-9:
            return U[j0]
        if theta > 1.0 - 1e-9:
            return U[j0 + 1]
        right = pre_jump.get(j0 + 1)
        u_r, d_r = right if right is not None else (U[j0 + 1], D[j0 + 1])
        t2 = theta * theta
        t3 = t2 * theta
        return (
            (2 * t3 - 3 * t2 + 1) * U[j0]
            + ((t3 - 2 * t2 + theta) * h) * D[j0]
            + (-2 * t3 + 3 * t2) * u_r
            + ((t3 - t2) * h) * d_r
        )

    for k in range(steps):
        t0 = k * h
        uk = U[k]
        k1 = rhs(t0, uk, lookup, t0)
        D[k] = k1
        k2 = rhs(t0 + 0.5 * h, uk + 0.5 * h * k1, lookup, t0)
        k3 = rhs(t0 + 0.5 * h, uk + 0.5 * h * k2, lookup, t0)
        k4 = rhs(t0 + h, uk + h * k3, lookup, t0)
        u_new = uk + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (k + 1) in jumps:
            d_pre = rhs((k + 1) * h, u_new, lookup, t0)
            pre_jump[k + 1] = (u_new.copy(), np.asarray(d_pre, dtype=float))
            u_new = jumps[k + 1](u_new)
        U[k + 1] = u_new
    D[steps] = rhs(steps * h, U[steps], lookup, (steps - 1) * h)
    return U


def _base_meta(model, params, num_nodes, degree, S0, I0, h, t_end):
    return {
        "source": "solver",
        "model": model,
        "N": num_nodes,
        "n": degree,
        "tau": params.tau,
        "dist": params.dist.spec_string(),
        "I0": I0,
        "S0": S0,
        "h": h,
        "t_end": t_end,
    }


def _initial_conditions(params, num_nodes, S0, I0):
    I0 = float(params.initial_infected if I0 is None else I0)
    S0 = float(num_nodes - I0 if S0 is None else S0)
    if I0 < 0 or S0 <= 0:
        raise ValueError("need I0 >= 0 and S0 > 0")
    return S0, I0


def solve_markovian_pairwise(
    params: EpidemicParams,
    *,
    num_nodes: float,
    degree: float,
    S0: float | None = None,
    I0: float | None = None,
    h: float = 1e-3,
    t_end: float | None = None,
) -> Trajectory:
    """Classic four-equation Markovian pairwise SIR (exponential recovery)."""
    if not isinstance(params.dist, Exponential):
        raise ValueError("markovian reference requires an exponential recovery law")
    gamma = params.dist.rate
    tau, n, N = params.tau, float(degree), float(num_nodes)
    S0, I0 = _initial_conditions(params, num_nodes, S0, I0)
    steps, t_end = _grid(params.t_end if t_end is None else t_end, h)
    link = tau * (n - 1.0) / n

    def rhs(t, u, lookup, t0):
        S, SS, I, SI = u
        c = link * SI / S
        return np.array(
            [
                -tau * SI,
                -2.0 * c * SS,
                tau * SI - gamma * I,
                c * SS - c * SI - tau * SI - gamma * SI,
            ]
        )

    u0 = [S0, (n / N) * S0 * S0, I0, (n / N) * S0 * I0]
    U = _march_delay_rk4(rhs, u0, h, steps)
    t = np.arange(steps + 1) * h
    S, SS, I, SI = U.T
    meta = _base_meta("special:markovian", params, num_nodes, degree, S0, I0, h, t_end)
    return Trajectory(t, S, I, N - S - I, SI, SS, meta)


def solve_markovian_meanfield(
    params: EpidemicParams,
    *,
    num_nodes: float,
    degree: float,
    S0: float | None = None,
    I0: float | None = None,
    h: float = 1e-3,
    t_end: float | None = None,
) -> Trajectory:
    """Classical mean-field SIR ODE with rate tau*n/N (exponential recovery)."""
    if not isinstance(params.dist, Exponential):
        raise ValueError("markovian reference requires an exponential recovery law")
    gamma = params.dist.rate
    tau, n, N = params.tau, float(degree), float(num_nodes)
    S0, I0 = _initial_conditions(params, num_nodes, S0, I0)
    steps, t_end = _grid(params.t_end if t_end is None else t_end, h)
    coupling = tau * n / N

    def rhs(t, u, lookup, t0):
        S, I = u
        return np.array([-coupling * S * I, coupling * S * I - gamma * I])

    U = _march_delay_rk4(rhs, [S0, I0], h, steps)
    t = np.arange(steps + 1) * h
    S, I = U.T
    meta = _base_meta(
        "special:markovian_meanfield", params, num_nodes, degree, S0, I0, h, t_end
    )
    return Trajectory(t, S, I, N - S - I, (n / N) * S * I, (n / N) * S * S, meta)


def solve_fixed_delay_pairwise(
    params: EpidemicParams,
    *,
    num_nodes: float,
    degree: float,
    S0: float | None = None,
    I0: float | None = None,
    h: float = 1e-3,
    t_end: float | None = None,
) -> Trajectory:
    """Pairwise model with a fixed infectious period: method of steps.

    On [0, sigma) the system is the no-recovery pairwise ODE; at sigma the
    newborn initial infecteds recover in one jump ([I] -= I0 and [SI] loses
    its surviving initial links); past sigma the delayed removal terms are
    active, weighted by the accumulated exponential factor.
    """
    if not isinstance(params.dist, FixedDuration):
        raise ValueError("fixed-delay reference requires a fixed-duration recovery law")
    sigma = params.dist.sigma
    tau, n, N = params.tau, float(degree), float(num_nodes)
    S0, I0 = _initial_conditions(params, num_nodes, S0, I0)
    steps, t_end = _grid(params.t_end if t_end is None else t_end, h)
    j_sigma = _node_index(sigma, h, "sigma")
    link = tau * (n - 1.0) / n
    half = 0.5 * h

    def rhs(t, u, lookup, t0):
        S, SS, I, SI, phi = u
        c = link * SI / S
        dS = -tau * SI
        dSS = -2.0 * c * SS
        dI = tau * SI
        dSI = c * SS - c * SI - tau * SI
        dphi = c + tau
        if t0 > sigma - half:
            Sd, SSd, Id, SId, phid = lookup(t - sigma)
            dI -= tau * SId
            dSI -= link * (SSd * SId / Sd) * math.exp(-(phi - phid))
        return np.array([dS, dSS, dI, dSI, dphi])

    def recover_newborns(u):
        u = u.copy()
        u[2] -= I0
        u[3] -= (n / N) * S0 * I0 * math.exp(-u[4])
        return u

    u0 = [S0, (n / N) * S0 * S0, I0, (n / N) * S0 * I0, 0.0]
    jumps = {j_sigma: recover_newborns} if j_sigma <= steps else None
    U = _march_delay_rk4(rhs, u0, h, steps, jumps)
    t = np.arange(steps + 1) * h
    S, SS, I, SI, phi = U.T
    meta = _base_meta("special:fixed", params, num_nodes, degree, S0, I0, h, t_end)
    traj = Trajectory(t, S, I, N - S - I, SI, SS, meta)
    traj.extra["Phi"] = phi
    return traj


def solve_fixed_delay_meanfield(
    params: EpidemicParams,
    *,
    num_nodes: float,
    degree: float,
    S0: float | None = None,
    I0: float | None = None,
    h: float = 1e-3,
    t_end: float | None = None,
) -> Trajectory:
    """Mean-field model with a fixed infectious period (delayed removal)."""
    if not isinstance(params.dist, FixedDuration):
        raise ValueError("fixed-delay reference requires a fixed-duration recovery law")
    sigma = params.dist.sigma
    tau, n, N = params.tau, float(degree), float(num_nodes)
    S0, I0 = _initial_conditions(params, num_nodes, S0, I0)
    steps, t_end = _grid(params.t_end if t_end is None else t_end, h)
    j_sigma = _node_index(sigma, h, "sigma")
    coupling = tau * n / N
    half = 0.5 * h

    def rhs(t, u, lookup, t0):
        S, I = u
        dI = coupling * S * I
        if t0 > sigma - half:
            Sd, Id = lookup(t - sigma)
            dI -= coupling * Sd * Id
        return np.array([-coupling * S * I, dI])

    def recover_newborns(u):
        u = u.copy()
        u[1] -= I0
        return u

    jumps = {j_sigma: recover_newborns} if j_sigma <= steps else None
    U = _march_delay_rk4(rhs, [S0, I0], h, steps, jumps)
    t = np.arange(steps + 1) * h
    S, I = U.T
    meta = _base_meta(
        "special:fixed_meanfield", params, num_nodes, degree, S0, I0, h, t_end
    )
    return Trajectory(t, S, I, N - S - I, (n / N) * S * I, (n / N) * S * S, meta)


def solve_gamma_chain(
    params: EpidemicParams,
    *,
    num_nodes: float,
    degree: float,
    S0: float | None = None,
    I0: float | None = None,
    h: float = 1e-3,
    t_end: float | None = None,
) -> Trajectory:
    """Multi-stage (Erlang) pairwise chain: K exponential stages of rate K*gamma.

    Nodes follow the standard stage chain; links carry the same stage
    structure with the pairwise loss terms applied per stage.  The aggregated
    [I] and [SI] series solve the general model with the Erlang kernel.
    Stage-resolved series are exposed in ``extra``.
    """
    if not isinstance(params.dist, GammaErlang):
        raise ValueError("gamma-chain reference requires an Erlang recovery law")
    K = params.dist.shape
    stage_rate = params.dist.rate  # K * gamma
    tau, n, N = params.tau, float(degree), float(num_nodes)
    S0, I0 = _initial_conditions(params, num_nodes, S0, I0)
    steps, t_end = _grid(params.t_end if t_end is None else t_end, h)
    link = tau * (n - 1.0) / n

    # State layout: [S, SS, I_1..I_K, SI_1..SI_K]
    def rhs(t, u, lookup, t0):
        S, SS = u[0], u[1]
        I_st = u[2 : 2 + K]
        SI_st = u[2 + K :]
        SI = SI_st.sum()
        c = link * SI / S
        du = np.empty_like(u)
        du[0] = -tau * SI
        du[1] = -2.0 * c * SS
        du[2] = tau * SI - stage_rate * I_st[0]
        for j in range(1, K):
            du[2 + j] = stage_rate * (I_st[j - 1] - I_st[j])
        loss = c + tau + stage_rate
        du[2 + K] = c * SS - loss * SI_st[0]
        for j in range(1, K):
            du[2 + K + j] = stage_rate * SI_st[j - 1] - loss * SI_st[j]
        return du

    u0 = np.zeros(2 + 2 * K)
    u0[0] = S0
    u0[1] = (n / N) * S0 * S0
    u0[2] = I0
    u0[2 + K] = (n / N) * S0 * I0
    U = _march_delay_rk4(rhs, u0, h, steps)
    t = np.arange(steps + 1) * h
    S, SS = U[:, 0], U[:, 1]
    I_stages = U[:, 2 : 2 + K].T
    SI_stages = U[:, 2 + K :].T
    I = I_stages.sum(axis=0)
    SI = SI_stages.sum(axis=0)
    meta = _base_meta("special:gamma", params, num_nodes, degree, S0, I0, h, t_end)
    meta["K"] = K
    traj = Trajectory(t, S, I, N - S - I, SI, SS, meta)
    traj.extra["I_stages"] = I_stages
    traj.extra["SI_stages"] = SI_stages
    return traj


def solve_uniform_delay_pairwise(
    params: EpidemicParams,
    *,
    num_nodes: float,
    degree: float,
    S0: float | None = None,
    I0: float | None = None,
    h: float = 1e-3,
    t_end: float | None = None,
) -> Trajectory:
    """Pairwise model with uniform recovery on [A, B]: distributed delays.

    The moving-window integrals telescope against cumulative quantities:
    the [I] window equals (S(t-B) - S(t-A))/(B-A), and the [SI] window uses
    the running integral W of the damped link inflow.  The newborn removal is
    the indicator-gated constant flux on [A, B], handled branch-wise (three
    regimes t < A, A <= t <= B, t > B with breakpoints on grid nodes).
    """
    if not isinstance(params.dist, UniformInterval):
        raise ValueError("uniform-delay reference requires a uniform recovery law")
    A, B = params.dist.lower, params.dist.upper
    tau, n, N = params.tau, float(degree), float(num_nodes)
    S0, I0 = _initial_conditions(params, num_nodes, S0, I0)
    steps, t_end = _grid(params.t_end if t_end is None else t_end, h)
    _node_index(A, h, "a")
    _node_index(B, h, "b")
    link = tau * (n - 1.0) / n
    width = B - A
    half = 0.5 * h
    newborn_flux = I0 / width

    # State layout: [S, SS, I, SI, Phi, W] with W' = link * SS*SI/S * exp(Phi)
    def rhs(t, u, lookup, t0):
        S, SS, I, SI, phi, W = u
        c = link * SI / S
        dS = -tau * SI
        dSS = -2.0 * c * SS
        dI = tau * SI
        dSI = c * SS - c * SI - tau * SI
        dphi = c + tau
        dW = c * SS * math.exp(phi)
        if t0 > A - half:
            ua = lookup(max(0.0, t - A))
            ub = lookup(max(0.0, t - B))
            dI -= (ub[0] - ua[0]) / width
            dSI -= math.exp(-phi) * (ua[5] - ub[5]) / width
            if t0 < B - half:
                dI -= newborn_flux
                dSI -= (n / N) * S0 * newborn_flux * math.exp(-phi)
        return np.array([dS, dSS, dI, dSI, dphi, dW])

    u0 = [S0, (n / N) * S0 * S0, I0, (n / N) * S0 * I0, 0.0, 0.0]
    U = _march_delay_rk4(rhs, u0, h, steps)
    t = np.arange(steps + 1) * h
    S, SS, I, SI, phi, _ = U.T
    meta = _base_meta("special:uniform", params, num_nodes, degree, S0, I0, h, t_end)
    traj = Trajectory(t, S, I, N - S - I, SI, SS, meta)
    traj.extra["Phi"] = phi
    return traj
