"""Infectious-period (recovery-time) distributions.

The epidemic models in this package keep Markovian transmission but draw the
infectious period of each node from an arbitrary law.  Four families are
implemented:

* :class:`Exponential` -- rate ``gamma`` (the classical Markovian case),
* :class:`FixedDuration` -- every node is infectious for exactly ``sigma``,
* :class:`GammaErlang` -- integer shape ``K`` with per-stage rate ``K*gamma``
  (so the mean is ``1/gamma``, the sum of ``K`` exponential stages),
* :class:`UniformInterval` -- uniform on ``(a, b)`` with ``0 < a < b``.

Each distribution exposes the density ``pdf``, cumulative ``cdf``, survival
function ``survival`` (probability the period exceeds an age), hazard,
the Laplace transform of the density, moments, and sampling from a
caller-owned :class:`numpy.random.Generator`.

The fixed duration is a point mass: it has no finite density, so ``pdf``
raises and consumers must branch through :meth:`~RecoveryDistribution.
has_point_mass` and treat the atom explicitly (delayed terms, exact
truncation of memory integrals).

Instances are immutable value objects and safe to share across threads;
sampling mutates only the generator passed in.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

__all__ = [
    "RecoveryDistribution",
    "Exponential",
    "FixedDuration",
    "GammaErlang",
    "UniformInterval",
    "parse_distribution",
]


def _validated_age(a):
    """Coerce an age argument to float ndarray, rejecting negatives."""
    arr = np.asarray(a, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("age must be nonnegative")
    return arr, arr.ndim == 0


def _maybe_scalar(values: np.ndarray, scalar: bool):
    return float(values) if scalar else values


class RecoveryDistribution(abc.ABC):
    """Common interface of the infectious-period laws."""

    kind: ClassVar[str]

    @abc.abstractmethod
    def pdf(self, a):
        """Density f(a) of the infectious period at age ``a >= 0``."""

    @abc.abstractmethod
    def cdf(self, a):
        """Cumulative F(a) = P(period <= a)."""

    def survival(self, a):
        """Survival xi(a) = 1 - F(a) = P(period > a)."""
        arr, scalar = _validated_age(a)
        return _maybe_scalar(1.0 - np.asarray(self.cdf(arr)), scalar)

    def hazard(self, a):
        """Hazard f(a)/xi(a); defined only where the survival is positive."""
        arr, scalar = _validated_age(a)
        xi = np.asarray(self.survival(arr))
        if np.any(xi <= 0.0):
            raise ValueError("hazard undefined where survival is zero")
        return _maybe_scalar(np.asarray(self.pdf(arr)) / xi, scalar)

    @abc.abstractmethod
    def laplace_pdf(self, tau: float) -> float:
        """Laplace transform of the density, int_0^inf f(a) exp(-tau a) da."""

    @abc.abstractmethod
    def mean(self) -> float: ...

    @abc.abstractmethod
    def variance(self) -> float: ...

    @abc.abstractmethod
    def sample(self, rng: np.random.Generator, size=None):
        """Draw infectious periods from a caller-owned generator."""

    def has_point_mass(self) -> tuple[bool, float | None]:
        """(True, location) when the law is a point mass, else (False, None)."""
        return (False, None)

    def support_upper(self) -> float:
        """Upper end of the support (``inf`` for unbounded laws).

        Memory integrals against the survival kernel can be truncated here.
        """
        return math.inf

    @abc.abstractmethod
    def spec_string(self) -> str:
        """Round-trippable text form, e.g. ``exp:rate=0.6667``."""

    @staticmethod
    def _check_rate(tau: float) -> float:
        tau = float(tau)
        if tau < 0.0:
            raise ValueError("transform argument tau must be nonnegative")
        return tau


@dataclass(frozen=True)
class Exponential(RecoveryDistribution):
    """Exponentially distributed period with rate ``rate`` (mean 1/rate)."""

    rate: float
    kind: ClassVar[str] = "exp"

    def __post_init__(self):
        if not self.rate > 0.0:
            raise ValueError("Exponential rate must be positive")

    def pdf(self, a):
        arr, scalar = _validated_age(a)
        return _maybe_scalar(self.rate * np.exp(-self.rate * arr), scalar)

    def cdf(self, a):
        arr, scalar = _validated_age(a)
        return _maybe_scalar(-np.expm1(-self.rate * arr), scalar)

    def survival(self, a):
        arr, scalar = _validated_age(a)
        return _maybe_scalar(np.exp(-self.rate * arr), scalar)

    def laplace_pdf(self, tau):
        tau = self._check_rate(tau)
        return self.rate / (self.rate + tau)

    def mean(self):
        return 1.0 / self.rate

    def variance(self):
        return 1.0 / self.rate**2

    def sample(self, rng, size=None):
        return rng.exponential(1.0 / self.rate, size=size)

    def spec_string(self):
        return f"exp:rate={self.rate!r}"


@dataclass(frozen=True)
class FixedDuration(RecoveryDistribution):
    """Degenerate law: every infectious period lasts exactly ``sigma``."""

    sigma: float
    kind: ClassVar[str] = "fixed"

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ValueError("FixedDuration sigma must be positive")

    def pdf(self, a):
        raise ValueError(
            "fixed duration is a point mass with no finite density; "
            "branch via has_point_mass() instead of calling pdf"
        )

    def cdf(self, a):
        arr, scalar = _validated_age(a)
        return _maybe_scalar((arr >= self.sigma).astype(float), scalar)

    def survival(self, a):
        arr, scalar = _validated_age(a)
        return _maybe_scalar((arr < self.sigma).astype(float), scalar)

    def hazard(self, a):
        arr, scalar = _validated_age(a)
        if np.any(arr >= self.sigma):
            raise ValueError("hazard undefined where survival is zero")
        return _maybe_scalar(np.zeros_like(arr), scalar)

    def laplace_pdf(self, tau):
        tau = self._check_rate(tau)
        return math.exp(-tau * self.sigma)

    def mean(self):
        return self.sigma

    def variance(self):
        return 0.0

    def sample(self, rng, size=None):
        if size is None:
            return self.sigma
        return np.full(size, self.sigma)

    def has_point_mass(self):
        return (True, self.sigma)

    def support_upper(self):
        return self.sigma

    def spec_string(self):
        return f"fixed:sigma={self.sigma!r}"


@dataclass(frozen=True)
class GammaErlang(RecoveryDistribution):
    """Erlang-distributed period: shape ``K`` integer, per-stage rate ``K*gamma``.

    Equivalently the sum of ``K`` exponential stages of rate ``K*gamma``,
    giving mean ``1/gamma`` and variance ``1/(K*gamma**2)``.  Use
    :meth:`from_shape_rate` when holding the conventional (shape, rate) pair.
    """

    shape: int
    gamma: float
    kind: ClassVar[str] = "gamma"

    def __post_init__(self):
        if int(self.shape) != self.shape or self.shape < 1:
            raise ValueError("GammaErlang shape must be a positive integer")
        object.__setattr__(self, "shape", int(self.shape))
        if not self.gamma > 0.0:
            raise ValueError("GammaErlang gamma must be positive")

    @classmethod
    def from_shape_rate(cls, shape: int, rate: float) -> "GammaErlang":
        if not rate > 0.0:
            raise ValueError("GammaErlang rate must be positive")
        return cls(shape=shape, gamma=rate / shape)

    @property
    def rate(self) -> float:
        return self.shape * self.gamma

    def pdf(self, a):
        arr, scalar = _validated_age(a)
        r, k = self.rate, self.shape
        with np.errstate(divide="ignore"):
            logs = np.where(arr > 0.0, np.log(np.where(arr > 0.0, arr, 1.0)), 0.0)
        if k == 1:
            vals = r * np.exp(-r * arr)
        else:
            vals = np.where(
                arr > 0.0,
                np.exp(k * math.log(r) + (k - 1) * logs - r * arr - math.lgamma(k)),
                0.0,
            )
        return _maybe_scalar(vals, scalar)

    def survival(self, a):
        arr, scalar = _validated_age(a)
        x = self.rate * arr
        term = np.ones_like(x)
        acc = np.ones_like(x)
        for k in range(1, self.shape):
            term = term * x / k
            acc = acc + term
        return _maybe_scalar(np.exp(-x) * acc, scalar)

    def cdf(self, a):
        arr, scalar = _validated_age(a)
        return _maybe_scalar(1.0 - np.asarray(self.survival(arr)), scalar)

    def laplace_pdf(self, tau):
        tau = self._check_rate(tau)
        return (self.rate / (self.rate + tau)) ** self.shape

    def mean(self):
        return 1.0 / self.gamma

    def variance(self):
        return 1.0 / (self.shape * self.gamma**2)

    def sample(self, rng, size=None):
        # Sum of K exponential stages; keeps the stage interpretation exact.
        if size is None:
            return float(rng.exponential(1.0 / self.rate, size=self.shape).sum())
        stage_shape = (self.shape,) + tuple(np.atleast_1d(size))
        return rng.exponential(1.0 / self.rate, size=stage_shape).sum(axis=0)

    def spec_string(self):
        return f"gamma:shape={self.shape},rate={self.rate!r}"


@dataclass(frozen=True)
class UniformInterval(RecoveryDistribution):
    """Uniformly distributed period on ``(lower, upper)``, 0 < lower < upper."""

    lower: float
    upper: float
    kind: ClassVar[str] = "uniform"

    # Below this transform argument the closed form hits 0/0; use the series.
    _SERIES_TAU: ClassVar[float] = 1e-12

    def __post_init__(self):
        if not (0.0 < self.lower < self.upper):
            raise ValueError("UniformInterval requires 0 < lower < upper")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def pdf(self, a):
        arr, scalar = _validated_age(a)
        inside = (arr > self.lower) & (arr < self.upper)
        return _maybe_scalar(np.where(inside, 1.0 / self.width, 0.0), scalar)

    def cdf(self, a):
        arr, scalar = _validated_age(a)
        return _maybe_scalar(np.clip((arr - self.lower) / self.width, 0.0, 1.0), scalar)

    def laplace_pdf(self, tau):
        tau = self._check_rate(tau)
        if tau < self._SERIES_TAU:
            return 1.0 - tau * (self.lower + self.upper) / 2.0
        return (math.exp(-tau * self.lower) - math.exp(-tau * self.upper)) / (
            tau * self.width
        )

    def mean(self):
        return (self.lower + self.upper) / 2.0

    def variance(self):
        return self.width**2 / 12.0

    def sample(self, rng, size=None):
        return rng.uniform(self.lower, self.upper, size=size)

    def support_upper(self):
        return self.upper

    def spec_string(self):
        return f"uniform:a={self.lower!r},b={self.upper!r}"


def parse_distribution(spec: str) -> RecoveryDistribution:
    """Parse a distribution spec string into a distribution instance.

    Accepted forms::

        exp:rate=0.6667
        fixed:sigma=1.5
        gamma:shape=3,rate=2
        uniform:a=1,b=2

    The gamma rate is the conventional rate (shape/mean); it is converted to
    the stage parameterisation internally.
    """
    text = spec.strip()
    if ":" not in text:
        raise ValueError(f"malformed distribution spec {spec!r}: expected kind:params")
    kind, _, body = text.partition(":")
    kind = kind.strip().lower()
    params: dict[str, float] = {}
    for item in body.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"malformed distribution parameter {item!r} in {spec!r}")
        try:
            params[key.strip().lower()] = float(value)
        except ValueError as exc:
            raise ValueError(f"non-numeric value in distribution spec {spec!r}") from exc

    def take(expected: tuple[str, ...]) -> list[float]:
        missing = [k for k in expected if k not in params]
        extra = [k for k in params if k not in expected]
        if missing or extra:
            raise ValueError(
                f"distribution spec {spec!r} must define exactly {expected}; "
                f"missing={missing or None} unknown={extra or None}"
            )
        return [params[k] for k in expected]

    if kind == "exp":
        (rate,) = take(("rate",))
        return Exponential(rate)
    if kind == "fixed":
        (sigma,) = take(("sigma",))
        return FixedDuration(sigma)
    if kind == "gamma":
        shape, rate = take(("shape", "rate"))
        if int(shape) != shape:
            raise ValueError(f"gamma shape must be an integer, got {shape}")
        return GammaErlang.from_shape_rate(int(shape), rate)
    if kind == "uniform":
        lo, hi = take(("a", "b"))
        return UniformInterval(lo, hi)
    raise ValueError(f"unknown distribution kind {kind!r} in {spec!r}")
