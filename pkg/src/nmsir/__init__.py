"""SIR epidemics on regular networks with arbitrary recovery-time laws.

Library layout:

* :mod:`nmsir.recovery`   -- infectious-period distributions
* :mod:`nmsir.network`    -- regular random graphs and pair counting
* :mod:`nmsir.simulate`   -- exact event-driven stochastic simulation
* :mod:`nmsir.solvers`    -- renewal-form mean-field and pairwise solvers
* :mod:`nmsir.reference`  -- closed-form special-case solvers (cross-checks)
* :mod:`nmsir.analysis`   -- reproduction numbers and final-size relations
* :mod:`nmsir.cli`        -- command-line harness (``nmsir`` entry point)
"""

from .analysis import (
    FinalSizeResult,
    ReproductionReport,
    final_size_meanfield,
    final_size_pairwise,
    reproduction_numbers,
)
from .network import (
    INFECTED,
    RECOVERED,
    SUSCEPTIBLE,
    RegularGraph,
    count_pairs,
    generate_regular,
    load_edge_list,
    save_edge_list,
)
from .recovery import (
    Exponential,
    FixedDuration,
    GammaErlang,
    RecoveryDistribution,
    UniformInterval,
    parse_distribution,
)
from .reference import (
    solve_fixed_delay_meanfield,
    solve_fixed_delay_pairwise,
    solve_gamma_chain,
    solve_markovian_meanfield,
    solve_markovian_pairwise,
    solve_uniform_delay_pairwise,
)
from .simulate import run_ensemble, run_single
from .solvers import (
    SolverError,
    StepContractionError,
    solve_meanfield,
    solve_memory_ide,
    solve_pairwise,
)
from .trajectory import EpidemicParams, SolverConfig, Trajectory

__version__ = "0.1.0"

__all__ = [
    "EpidemicParams",
    "Exponential",
    "FinalSizeResult",
    "FixedDuration",
    "GammaErlang",
    "INFECTED",
    "RECOVERED",
    "RegularGraph",
    "ReproductionReport",
    "RecoveryDistribution",
    "SUSCEPTIBLE",
    "SolverConfig",
    "SolverError",
    "StepContractionError",
    "Trajectory",
    "UniformInterval",
    "count_pairs",
    "final_size_meanfield",
    "final_size_pairwise",
    "generate_regular",
    "load_edge_list",
    "parse_distribution",
    "reproduction_numbers",
    "run_ensemble",
    "run_single",
    "save_edge_list",
    "solve_fixed_delay_meanfield",
    "solve_fixed_delay_pairwise",
    "solve_gamma_chain",
    "solve_markovian_meanfield",
    "solve_markovian_pairwise",
    "solve_meanfield",
    "solve_memory_ide",
    "solve_pairwise",
    "solve_uniform_delay_pairwise",
]
