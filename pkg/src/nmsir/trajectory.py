"""Core value types shared by the simulator, the solvers and the CLI.

A :class:`Trajectory` is a uniform time grid carrying the node series [S],
[I], [R] and the ordered link series [SI], [SS].  It serialises to CSV with
the header ``t,S,I,R,SI,SS`` and a single ``# meta:`` comment line that
echoes every parameter needed to reproduce the run.  Floats are written with
shortest round-trip precision, so write -> read -> write is byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .recovery import RecoveryDistribution

__all__ = ["SERIES_NAMES", "EpidemicParams", "SolverConfig", "Trajectory"]

SERIES_NAMES = ("S", "I", "R", "SI", "SS")


@dataclass(frozen=True)
class EpidemicParams:
    """Transmission rate, recovery law, seeding and horizon of one epidemic."""

    tau: float
    dist: RecoveryDistribution
    initial_infected: int = 5
    t_end: float = 25.0

    def __post_init__(self):
        if not self.tau > 0.0:
            raise ValueError("tau must be positive")
        if self.initial_infected < 0:
            raise ValueError("initial_infected must be nonnegative")
        if not self.t_end > 0.0:
            raise ValueError("t_end must be positive")


@dataclass(frozen=True)
class SolverConfig:
    """Step size and corrector settings for the renewal-equation solvers.

    The memory term costs O(steps) per step and O(steps^2) overall, so
    ``t_end/h`` should stay in the 1e4-1e5 range on a desktop.  When
    ``initial_age_density`` is None all initial infecteds are newborn (age
    zero at t=0); a tabulated ``(ages, density)`` pair is accepted only for
    recovery laws whose survival never vanishes.
    """

    h: float = 1e-2
    t_end: float | None = None
    corrector_iters: int = 3
    corrector_tol: float = 1e-5
    initial_age_density: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        if not self.h > 0.0:
            raise ValueError("step size h must be positive")
        if self.corrector_iters < 1:
            raise ValueError("corrector_iters must be >= 1")
        if self.t_end is not None and not self.t_end > 0.0:
            raise ValueError("t_end must be positive")

    @property
    def newborn(self) -> bool:
        return self.initial_age_density is None


def _format_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


@dataclass
class Trajectory:
    """Uniformly gridded time series of node and ordered-link counts.

    ``extra`` carries diagnostic arrays (e.g. an independently integrated
    [SS] series) that are not part of the CSV contract.
    """

    t: np.ndarray
    S: np.ndarray
    I: np.ndarray
    R: np.ndarray
    SI: np.ndarray
    SS: np.ndarray
    meta: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        n = len(self.t)
        for name in SERIES_NAMES:
            if len(getattr(self, name)) != n:
                raise ValueError(f"series {name} length does not match the grid")

    def series(self, name: str) -> np.ndarray:
        if name not in SERIES_NAMES:
            raise KeyError(name)
        return getattr(self, name)

    def columns(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in SERIES_NAMES}

    def peak_infected(self) -> tuple[float, float]:
        """(time, value) of the prevalence maximum on the grid."""
        k = int(np.argmax(self.I))
        return float(self.t[k]), float(self.I[k])

    def final_size(self, num_nodes: float | None = None) -> float:
        """Total nodes ever infected by the end of the grid, N - S(t_end)."""
        if num_nodes is None:
            num_nodes = float(self.meta.get("N"))
        return float(num_nodes) - float(self.S[-1])

    def to_csv(self, path, column_suffix: str = "") -> None:
        names = [name + column_suffix for name in SERIES_NAMES]
        with open(path, "w", encoding="utf-8") as fh:
            if self.meta:
                tokens = " ".join(
                    f"{key}={_format_value(val)}" for key, val in self.meta.items()
                )
                fh.write(f"# meta: {tokens}\n")
            fh.write("t," + ",".join(names) + "\n")
            cols = [self.t] + [getattr(self, name) for name in SERIES_NAMES]
            for row in zip(*cols):
                fh.write(",".join(repr(float(x)) for x in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "Trajectory":
        meta: dict[str, str] = {}
        with open(path, "r", encoding="utf-8") as fh:
            line = fh.readline()
            if line.startswith("# meta:"):
                for token in line[len("# meta:"):].split():
                    key, sep, value = token.partition("=")
                    if sep:
                        meta[key] = value
                line = fh.readline()
            header = [h.strip() for h in line.strip().split(",")]
            rows = [
                [float(x) for x in ln.strip().split(",")]
                for ln in fh
                if ln.strip()
            ]
        data = np.asarray(rows, dtype=float).reshape(len(rows), len(header))
        by_name = {name: data[:, k] for k, name in enumerate(header)}
        if "t" not in by_name:
            raise ValueError(f"{path}: missing t column")

        def pick(name: str) -> np.ndarray:
            for candidate in (name, name + "_std"):
                if candidate in by_name:
                    return by_name[candidate]
            raise ValueError(f"{path}: missing column {name}")

        return cls(
            t=by_name["t"],
            S=pick("S"),
            I=pick("I"),
            R=pick("R"),
            SI=pick("SI"),
            SS=pick("SS"),
            meta=meta,
        )
