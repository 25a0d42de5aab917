import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cgqf.errors import InvalidInput, InvalidK, UnsupportedM
from cgqf.mrc import (
    MrcScenario,
    ber,
    ber_quadrature,
    build_channel,
    conditional_ber,
    outage,
    qam_weights,
    scenario_mse,
)
from cgqf.reduction import reduce
from cgqf.specfun import q_function


def test_unit_power_channel():
    qf = build_channel(MrcScenario(k=[1.0, 0.5], rho=0.5))
    np.testing.assert_allclose(np.diag(qf.L) + np.abs(qf.v_bar) ** 2, 1.0)
    assert qf.L[0, 1] == pytest.approx(0.5 / math.sqrt(2 * 1.5))
    assert qf.mean() == pytest.approx(2.0)


def test_independent_branches_reduce_to_rician_pairs():
    k = [3.0, 1.0, 0.0, 2.0]
    sf = reduce(build_channel(MrcScenario(k=k, rho=0.0)))
    pairs = sorted(zip(sf.lam, sf.mu))
    want = sorted((1 / (K + 1), K) for K in k)
    np.testing.assert_allclose(pairs, want, atol=1e-12)


def test_channel_validation():
    with pytest.raises(InvalidK):
        build_channel(MrcScenario(k=[1.0, 0.0], rho=0.5, covariance="paper-literal"))
    with pytest.raises(InvalidK):
        MrcScenario(k=[-1.0], rho=0.0)
    with pytest.raises(InvalidInput):
        MrcScenario(k=[1.0], rho=1.0)
    with pytest.raises(InvalidInput):
        MrcScenario(k=[1.0], rho=0.0, covariance="other")
    with pytest.raises(UnsupportedM):
        qam_weights(8)


def test_qam_weights_known_values():
    assert qam_weights(4).w == (Fraction(1, 2),)
    assert qam_weights(16).w == (Fraction(3, 16), Fraction(1, 8), Fraction(-1, 16))
    assert qam_weights(64).w == tuple(Fraction(v, 96) for v in (7, 6, -1, 0, 1, 0, -1))
    for M in (4, 16, 64, 256):
        # P_b(0) = L sum w Q(0) = 1/2
        assert sum(qam_weights(M).w) * math.isqrt(M) == 1


def cho_yoon(M, gamma):
    """Gray square M-QAM BER, classical per-bit expression."""
    L = math.isqrt(M)
    a = math.sqrt(3 * gamma / (M - 1))
    nb = int(math.log2(L))
    tot = 0.0
    for k in range(1, nb + 1):
        s = 0.0
        for i in range(int((1 - 2.0**-k) * L)):
            w = (-1) ** (i * 2 ** (k - 1) // L) * (2 ** (k - 1) - math.floor(i * 2 ** (k - 1) / L + 0.5))
            s += w * 2 * q_function((2 * i + 1) * a)
        tot += s / L
    return tot / nb


@given(st.sampled_from([4, 16, 64, 256]), st.floats(0.0, 1e4))
def test_conditional_ber_matches_cho_yoon(M, gamma):
    assert conditional_ber(M, gamma) == pytest.approx(cho_yoon(M, gamma), rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("g", [0.1, 1.0, 10.0, 1000.0])
def test_rayleigh_ber_closed_form(g):
    sc = MrcScenario(k=[0.0], rho=0.0, M=4, m=1)
    assert ber(sc, g) == pytest.approx(0.5 * (1 - math.sqrt(g / (2 + g))), abs=1e-14)


def test_rayleigh_outage_closed_form():
    sc = MrcScenario(k=[0.0], rho=0.0, gamma_th_db=3.0, m=1)
    gb = np.array([0.5, 5.0, 500.0])
    np.testing.assert_allclose(outage(sc, gb), -np.expm1(-sc.gamma_th / gb), rtol=1e-14)


@pytest.mark.parametrize("M", [4, 16, 64])
def test_ber_zero_snr_limit(M):
    assert ber(MrcScenario(k=[1.0, 0.5], rho=0.5, M=M, m=20), 1e-9) == pytest.approx(0.5, abs=1e-3)


@pytest.mark.parametrize("k,M,m", [([1.0, 0.5], 16, 40), ([0.5, 0.25, 0.25, 0.0], 64, 30)])
def test_ber_quadrature_cross_check(k, M, m):
    sc = MrcScenario(k=k, rho=0.5, M=M, m=m)
    for g in (1.0, 30.0, 1000.0):
        assert ber(sc, g) == pytest.approx(ber_quadrature(sc, g), rel=1e-8)


def test_performance_monotonicity():
    sc = MrcScenario(k=[2.0, 1.0], rho=0.3, M=16, m=30)
    gb = np.logspace(-1, 3, 15)
    assert np.all(np.diff(ber(sc, gb)) < 0)
    assert np.all(np.diff(outage(sc, gb)) < 0)
    hi = MrcScenario(k=[2.0, 1.0], rho=0.3, m=30, gamma_th_db=5.0)
    assert np.all(outage(hi, gb) > outage(sc, gb))


def test_confluence_transfers_to_ber():
    errs = []
    ref = ber(MrcScenario(k=[4.0], rho=0.0, M=4, m=320), 30.0)
    for m in (10, 40, 160):
        errs.append(abs(ber(MrcScenario(k=[4.0], rho=0.0, M=4, m=m), 30.0) - ref))
    assert errs[0] > errs[1] > errs[2]


def test_caption_m_meets_mse_target():
    assert scenario_mse(MrcScenario(k=[1.0, 0.5], rho=0.5, m=40)) < 1e-2
    assert scenario_mse(MrcScenario(k=[8.0, 7.0, 6.0, 6.0], rho=0.1, m=150)) < 1e-2
