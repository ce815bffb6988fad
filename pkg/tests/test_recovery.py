"""Distribution-level identities, closed forms vs quadrature, and sampling."""

import math

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import quad

import nmsir as nm

ALL = [
    nm.Exponential(2.0 / 3.0),
    nm.FixedDuration(1.5),
    nm.GammaErlang(3, 2.0 / 3.0),
    nm.UniformInterval(1.0, 2.0),
]
CONTINUOUS = [d for d in ALL if not d.has_point_mass()[0]]


def _quad_points(dist):
    # Help the adaptive quadrature across kinks.
    if isinstance(dist, nm.UniformInterval):
        return [dist.lower, dist.upper]
    return None


# -- pointwise closed-form examples -----------------------------------------


def test_pdf_examples():
    assert nm.GammaErlang(3, 2.0 / 3.0).pdf(0.0) == 0.0
    assert nm.UniformInterval(1, 2).pdf(1.5) == 1.0
    assert nm.Exponential(2.0 / 3.0).pdf(1.5) == pytest.approx(
        0.24525296078096154, abs=1e-12
    )


def test_survival_examples():
    assert nm.FixedDuration(1.5).survival(1.0) == 1.0
    assert nm.UniformInterval(1, 2).survival(2.5) == 0.0
    # Erlang survival series at stage_rate * age = 1
    assert nm.GammaErlang(3, 2.0 / 3.0).survival(0.5) == pytest.approx(
        0.9196986029286058, abs=1e-12
    )
    for dist in ALL:
        assert dist.survival(0.0) == 1.0


def test_survival_monotone_and_bounded():
    ages = np.linspace(0.0, 12.0, 400)
    for dist in ALL:
        xi = dist.survival(ages)
        assert np.all(xi >= 0.0) and np.all(xi <= 1.0)
        assert np.all(np.diff(xi) <= 1e-15)


def test_laplace_examples_frozen():
    # Values fixed by adaptive quadrature of f(a) e^(-tau a) to 1e-10.
    assert nm.Exponential(2.0 / 3.0).laplace_pdf(0.35) == pytest.approx(
        0.6557377049180327, abs=1e-10
    )
    assert nm.UniformInterval(1, 2).laplace_pdf(0.35) == pytest.approx(
        0.5945793883637255, abs=1e-10
    )
    for dist in ALL:
        assert dist.laplace_pdf(0.0) == pytest.approx(1.0, abs=1e-15)


def test_laplace_uniform_tiny_tau_series():
    dist = nm.UniformInterval(1, 2)
    assert dist.laplace_pdf(1e-13) == pytest.approx(1.0 - 1e-13 * 1.5, rel=1e-12)


@pytest.mark.parametrize("tau", [0.1, 0.35, 1.0, 5.0])
@pytest.mark.parametrize("dist", ALL, ids=lambda d: d.kind)
def test_laplace_matches_quadrature(dist, tau):
    if dist.has_point_mass()[0]:
        # Point mass: the transform is e^(-tau sigma) by definition.
        assert dist.laplace_pdf(tau) == pytest.approx(
            math.exp(-tau * dist.sigma), abs=1e-14
        )
        return
    upper = dist.support_upper()
    val, err = quad(
        lambda a: dist.pdf(a) * math.exp(-tau * a),
        0.0,
        np.inf if math.isinf(upper) else upper,
        points=_quad_points(dist),
        epsabs=1e-12,
        limit=200,
    )
    assert dist.laplace_pdf(tau) == pytest.approx(val, abs=1e-8)


@pytest.mark.parametrize("dist", CONTINUOUS, ids=lambda d: d.kind)
def test_pdf_normalised(dist):
    upper = dist.support_upper()
    val, _ = quad(
        dist.pdf,
        0.0,
        np.inf if math.isinf(upper) else upper,
        points=_quad_points(dist),
        epsabs=1e-12,
        limit=200,
    )
    assert val == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("dist", CONTINUOUS, ids=lambda d: d.kind)
def test_survival_equals_tail_integral(dist):
    upper = dist.support_upper()
    for a in [0.0, 0.3, 1.2, 1.9, 3.5]:
        if a >= upper:
            continue
        tail, _ = quad(
            dist.pdf,
            a,
            np.inf if math.isinf(upper) else upper,
            points=_quad_points(dist),
            epsabs=1e-12,
            limit=200,
        )
        assert dist.survival(a) == pytest.approx(tail, abs=1e-8)


@pytest.mark.parametrize("dist", ALL, ids=lambda d: d.kind)
def test_mean_equals_survival_integral(dist):
    upper = dist.support_upper()
    val, _ = quad(
        dist.survival,
        0.0,
        np.inf if math.isinf(upper) else upper,
        points=_quad_points(dist),
        epsabs=1e-12,
        limit=200,
    )
    assert dist.mean() == pytest.approx(val, abs=1e-8)


@pytest.mark.parametrize("dist", CONTINUOUS, ids=lambda d: d.kind)
def test_hazard_times_survival_is_pdf(dist):
    ages = [0.1, 0.5, 1.1, 1.45]
    for a in ages:
        if a >= dist.support_upper():
            continue
        assert dist.hazard(a) * dist.survival(a) == pytest.approx(
            dist.pdf(a), abs=1e-12
        )


def test_fixed_hazard_zero_before_atom_and_undefined_after():
    dist = nm.FixedDuration(1.5)
    assert dist.hazard(1.0) == 0.0
    with pytest.raises(ValueError):
        dist.hazard(1.5)


def test_moments_match_headline_table():
    assert nm.Exponential(2 / 3).mean() == pytest.approx(1.5)
    assert nm.Exponential(2 / 3).variance() == pytest.approx(2.25)
    assert nm.GammaErlang(3, 2 / 3).mean() == pytest.approx(1.5)
    assert nm.GammaErlang(3, 2 / 3).variance() == pytest.approx(0.75)
    assert nm.UniformInterval(1, 2).mean() == pytest.approx(1.5)
    assert nm.UniformInterval(1, 2).variance() == pytest.approx(1.0 / 12.0)
    assert nm.FixedDuration(1.5).mean() == 1.5
    assert nm.FixedDuration(1.5).variance() == 0.0


# -- argument and parameter validation ---------------------------------------


def test_rejects_negative_age_and_tau():
    for dist in ALL:
        with pytest.raises(ValueError):
            dist.survival(-0.1)
        with pytest.raises(ValueError):
            dist.laplace_pdf(-0.5)
    with pytest.raises(ValueError):
        nm.Exponential(2 / 3).pdf(-1.0)


def test_fixed_pdf_rejected():
    with pytest.raises(ValueError, match="point mass"):
        nm.FixedDuration(1.5).pdf(1.5)


def test_parameter_validation():
    with pytest.raises(ValueError):
        nm.Exponential(0.0)
    with pytest.raises(ValueError):
        nm.FixedDuration(-1.0)
    with pytest.raises(ValueError):
        nm.GammaErlang(0, 1.0)
    with pytest.raises(ValueError):
        nm.GammaErlang(2.5, 1.0)
    with pytest.raises(ValueError):
        nm.UniformInterval(0.0, 2.0)
    with pytest.raises(ValueError):
        nm.UniformInterval(2.0, 1.0)


def test_has_point_mass():
    assert nm.FixedDuration(1.5).has_point_mass() == (True, 1.5)
    assert nm.Exponential(1.0).has_point_mass() == (False, None)
    assert nm.UniformInterval(1, 2).has_point_mass() == (False, None)


# -- spec-string parser -------------------------------------------------------


def test_parse_distribution_forms():
    d = nm.parse_distribution("exp:rate=0.6667")
    assert isinstance(d, nm.Exponential) and d.rate == 0.6667
    d = nm.parse_distribution("fixed:sigma=1.5")
    assert isinstance(d, nm.FixedDuration) and d.sigma == 1.5
    d = nm.parse_distribution("gamma:shape=3,rate=2")
    assert isinstance(d, nm.GammaErlang)
    assert d.shape == 3 and d.gamma == pytest.approx(2.0 / 3.0)
    assert d.rate == pytest.approx(2.0)
    d = nm.parse_distribution("uniform:a=1,b=2")
    assert isinstance(d, nm.UniformInterval) and (d.lower, d.upper) == (1.0, 2.0)


def test_parse_distribution_round_trip():
    for dist in ALL:
        again = nm.parse_distribution(dist.spec_string())
        assert again == dist


@pytest.mark.parametrize(
    "bad",
    [
        "exp",
        "exp:rate=-1",
        "exp:rate=0",
        "exp:rate=abc",
        "gamma:shape=2.5,rate=2",
        "gamma:shape=3",
        "uniform:a=2,b=1",
        "uniform:a=0,b=1",
        "fixed:sigma=0",
        "weibull:k=1",
        "exp:rate=1,extra=2",
    ],
)
def test_parse_distribution_rejects(bad):
    with pytest.raises(ValueError):
        nm.parse_distribution(bad)


# -- sampling ----------------------------------------------------------------


def test_fixed_sampling_degenerate():
    rng = np.random.default_rng(0)
    dist = nm.FixedDuration(1.5)
    assert dist.sample(rng) == 1.5
    assert np.all(dist.sample(rng, size=100) == 1.5)


def test_exponential_sample_mean_within_three_se():
    rng = np.random.default_rng(42)
    dist = nm.Exponential(2.0 / 3.0)
    draws = dist.sample(rng, size=1_000_000)
    se = math.sqrt(dist.variance() / draws.size)
    assert abs(draws.mean() - dist.mean()) < 3.0 * se


def test_uniform_sample_support_and_variance():
    rng = np.random.default_rng(7)
    draws = nm.UniformInterval(1, 2).sample(rng, size=1_000_000)
    assert draws.min() >= 1.0 and draws.max() <= 2.0
    assert draws.var() == pytest.approx(1.0 / 12.0, rel=5e-3)


def test_gamma_sample_moments():
    rng = np.random.default_rng(11)
    dist = nm.GammaErlang(3, 2.0 / 3.0)
    draws = dist.sample(rng, size=400_000)
    assert draws.mean() == pytest.approx(1.5, rel=5e-3)
    assert draws.var() == pytest.approx(0.75, rel=2e-2)


@pytest.mark.parametrize("dist", CONTINUOUS, ids=lambda d: d.kind)
def test_sampling_ks_below_one_percent_critical(dist):
    rng = np.random.default_rng(123)
    n = 100_000
    draws = np.asarray(dist.sample(rng, size=n), dtype=float)
    stat = stats.kstest(draws, lambda a: np.asarray(dist.cdf(a))).statistic
    critical_1pct = 1.6276 / math.sqrt(n)
    assert stat < critical_1pct
