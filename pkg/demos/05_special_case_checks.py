"""Cross-validating the generic solver against closed-form special cases.

For particular recovery laws the renewal systems collapse to ODEs or DDEs:
exponential gives the classical Markovian pairwise equations, a fixed period
gives a discrete-delay system, an Erlang period a stage chain, and a uniform
period a distributed-delay system.  Each is integrated independently with RK4
and compared with the generic renewal solver in the sup norm.
"""

import time

import numpy as np

from nmsir import (
    EpidemicParams,
    Exponential,
    FixedDuration,
    GammaErlang,
    SolverConfig,
    UniformInterval,
    solve_fixed_delay_pairwise,
    solve_gamma_chain,
    solve_markovian_pairwise,
    solve_pairwise,
    solve_uniform_delay_pairwise,
)

N, DEGREE, H = 1000, 15, 1e-3

CASES = [
    ("exponential", Exponential(2 / 3), solve_markovian_pairwise),
    ("fixed", FixedDuration(1.5), solve_fixed_delay_pairwise),
    ("gamma", GammaErlang(3, 2 / 3), solve_gamma_chain),
    ("uniform", UniformInterval(1, 2), solve_uniform_delay_pairwise),
]

print(f"step size h={H}; comparing [I](t) over t in [0, 25]")
for name, dist, reference in CASES:
    params = EpidemicParams(tau=0.35, dist=dist, initial_infected=5, t_end=25.0)
    start = time.perf_counter()
    generic = solve_pairwise(
        params, num_nodes=N, degree=DEGREE, config=SolverConfig(h=H)
    )
    ref = reference(params, num_nodes=N, degree=DEGREE, h=H)
    elapsed = time.perf_counter() - start
    rel = np.max(np.abs(generic.I - ref.I)) / np.max(ref.I)
    print(f"{name:<12} rel sup-norm difference {rel:.2e}   ({elapsed:.1f}s both solves)")

print(
    "\nThe gamma case doubles as a check of the stage-resolved link equations:"
    "\nthe chain is built from per-stage loss terms, and its aggregate matches"
    "\nthe general renewal solution with the Erlang survival kernel."
)
