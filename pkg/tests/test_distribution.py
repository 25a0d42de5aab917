import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from cgqf import montecarlo as mc
from cgqf.distribution import ClosedFormDistribution, grid_csv_text
from cgqf.errors import InvalidInput, PrecisionLoss
from cgqf.reduction import SpectralForm

X = np.linspace(0.0, 10.0, 41)


def dist(lam, mu, m=40, bits=512):
    return ClosedFormDistribution.from_spectral(SpectralForm(lam, mu), m, bits)


def test_unit_exponential():
    d = dist([1.0], [0.0])
    np.testing.assert_allclose(d.pdf(X), np.exp(-X), rtol=1e-14)
    np.testing.assert_allclose(d.cdf(X), -np.expm1(-X), rtol=1e-14, atol=1e-300)
    assert d.moments(1) == pytest.approx(1.0, rel=1e-15)
    assert d.moments(2) == pytest.approx(2.0, rel=1e-15)


def test_hypo_exponential():
    d = dist([1.0, 2.0], [0.0, 0.0])
    np.testing.assert_allclose(d.pdf(X), np.exp(-X / 2) - np.exp(-X), rtol=1e-13, atol=1e-300)


def test_laplace():
    d = dist([1.0, -1.0], [0.0, 0.0])
    x = np.linspace(-8, 8, 33)
    np.testing.assert_allclose(d.pdf(x), 0.5 * np.exp(-np.abs(x)), rtol=1e-14)
    assert d.cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    assert d.mean() == pytest.approx(0.0, abs=1e-15)
    assert d.support_signs == (True, True)


def test_limits_and_special_values():
    d = dist([1.5, -0.4], [2.0, 1.0], m=10)
    assert d.cdf(np.inf) == 1.0 and d.cdf(-np.inf) == 0.0 and d.pdf(np.inf) == 0.0
    with pytest.raises(InvalidInput):
        d.cdf(np.nan)
    assert d.cdf(np.array([[1.0, 2.0]])).shape == (1, 2)


forms = st.builds(
    lambda lam, sign, mu: SpectralForm(np.array(lam) * np.array(sign[: len(lam)] + [1] * len(lam))[: len(lam)],
                                       (mu + [0.0] * len(lam))[: len(lam)]),
    st.lists(st.floats(0.3, 3.0), min_size=1, max_size=3, unique_by=lambda v: round(v, 1)),
    st.lists(st.sampled_from([-1, 1]), min_size=3, max_size=3),
    st.lists(st.floats(0.0, 6.0), min_size=0, max_size=3),
)


def _span(d):
    reach = [(len(a) + 40 + 8 * np.sqrt(len(a))) / float(b) for b, a, _ in d.groups]
    return min(min(reach), 0.0), max(max(reach), 0.0)


@settings(max_examples=15)
@given(forms, st.sampled_from([1, 7, 25]))
def test_pdf_is_derivative_of_cdf(sf, m):
    d = ClosedFormDistribution.from_spectral(sf, m)
    lo, hi = _span(d)
    x = np.linspace(lo / 6, hi / 6, 101)
    x = x[np.abs(x) > 1e-3]
    h = 1e-5
    deriv = (d.cdf(x + h) - d.cdf(x - h)) / (2 * h)
    np.testing.assert_allclose(deriv, d.pdf(x), rtol=1e-5, atol=1e-8)


@settings(max_examples=15)
@given(forms, st.sampled_from([1, 7, 25]))
def test_pdf_integrates_to_one_and_cdf_is_monotone(sf, m):
    d = ClosedFormDistribution.from_spectral(sf, m)
    lo, hi = _span(d)
    edges = np.unique(np.concatenate([np.linspace(lo, 0, 31), np.linspace(0, hi, 31)]))
    mass = sum(integrate.quad(d.pdf, a, b, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
               for a, b in zip(edges[:-1], edges[1:]))
    assert mass == pytest.approx(1.0, abs=1e-9)
    grid = np.linspace(lo, hi, 2001)
    F = d.cdf(grid)
    assert np.all(np.diff(F) >= -1e-15)
    assert np.all(d.pdf(grid) >= 0)


@settings(max_examples=15)
@given(forms, st.sampled_from([1, 7, 25]))
def test_mean_is_invariant_under_confluence(sf, m):
    d = ClosedFormDistribution.from_spectral(sf, m)
    assert d.mean() == pytest.approx(sf.mean(), rel=1e-9, abs=1e-12)
    assert d.moments(0) == pytest.approx(1.0, abs=1e-12)


@given(st.floats(0.1, 10.0))
def test_scale_metamorphic(c):
    d = dist([1.3, -0.6], [2.0, 0.5], m=8)
    ds = d.scale(c)
    x = np.linspace(-5, 15, 50)
    np.testing.assert_allclose(ds.cdf(c * x), d.cdf(x), rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(c * ds.pdf(c * x), d.pdf(x), rtol=1e-10, atol=1e-12)


def test_scale_of_exponential():
    d = dist([1.0], [0.0]).scale(2.0)
    np.testing.assert_allclose(d.pdf(X), 0.5 * np.exp(-X / 2), rtol=1e-14)


def test_negate_and_survival():
    d = dist([2.0, -0.5], [3.0, 1.0], m=12)
    x = np.linspace(-10, 30, 81)
    np.testing.assert_allclose(d.negate().cdf(-x), 1 - d.cdf(x), atol=1e-14)
    np.testing.assert_allclose(d.survival(x), 1 - d.cdf(x), atol=1e-14)
    # far tail: survival keeps relative accuracy where 1 - F underflows
    far = d.survival(300.0)
    tail = integrate.quad(d.pdf, 300.0, 2000.0, epsabs=0, epsrel=1e-12, limit=200)[0]
    assert 0 < far < 1e-40
    assert far == pytest.approx(tail, rel=1e-9)


def test_continuity_at_zero_for_positive_forms():
    d = dist([1.0, 0.4], [3.0, 2.0], m=30)
    assert abs(d.cdf(0.0)) < 1e-12
    assert d.cdf(-1.0) == 0.0


def test_weak_convergence_to_original_form():
    # K = 8 single branch: the CDF bias dominates MC noise and halves with m
    sf = SpectralForm([1 / 9], [8.0])
    q = mc.sample_spectral(sf, mc.SimConfig(seed=11, n_samples=100_000))
    ks = [mc.ks_distance(q, dist(sf.lam, sf.mu, m).cdf) for m in (5, 10, 20, 40)]
    assert ks[0] > ks[1] > ks[2] > ks[3]


def test_precision_guard_raises_when_budget_is_short():
    d = dist([1 / 7, 1 / 8, 1 / 9], [6.0, 7.0, 8.0], m=60, bits=64)
    with pytest.raises(PrecisionLoss):
        d.cdf(np.linspace(0, 40, 50))


def test_double_mode_loses_the_distribution():
    d = dist([1 / 7, 1 / 8, 1 / 9], [6.0, 7.0, 8.0], m=60)
    x = np.linspace(0, 60, 400)
    bad = d.as_double().cdf(x)
    assert np.max(np.abs(bad - d.cdf(x))) > 1e-3
    assert d.max_coefficient_log10() > 16


def test_grid_csv_is_byte_stable():
    d = dist([1.0], [0.0])
    a = grid_csv_text(d, [0.0, 1.0], ["seed 0"])
    assert a == grid_csv_text(d, [0.0, 1.0], ["seed 0"])
    lines = a.splitlines()
    assert lines[0] == "# seed 0" and lines[1] == "x,pdf,cdf"
    assert lines[3].split(",")[1] == f"{math.exp(-1):.17g}"
    assert float(lines[3].split(",")[2]) == pytest.approx(1 - math.exp(-1), rel=1e-15)


def test_invalid_arguments():
    d = dist([1.0], [0.0])
    with pytest.raises(InvalidInput):
        d.scale(0.0)
    with pytest.raises(InvalidInput):
        d.moments(-1)
    with pytest.raises(InvalidInput):
        ClosedFormDistribution([], 64)
