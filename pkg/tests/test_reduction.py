import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cgqf.errors import InvalidInput, NotHermitian, NotPositiveDefinite, SingularForm
from cgqf.reduction import QuadraticForm, SpectralForm, cholesky, eigh, reduce


def random_hermitian(rng, n):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (X + X.conj().T) / 2


def random_form(seed, n):
    rng = np.random.default_rng(seed)
    A = random_hermitian(rng, n)
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    L = X @ X.conj().T + 0.5 * np.eye(n)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return QuadraticForm(A, L, v)


def test_identity_form():
    sf = reduce(QuadraticForm(np.eye(3), np.eye(3), np.zeros(3)))
    np.testing.assert_allclose(sf.lam, 1.0)
    np.testing.assert_allclose(sf.mu, 0.0)


@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_jacobi_matches_numpy(seed, n):
    H = random_hermitian(np.random.default_rng(seed), n)
    U, lam = eigh(H)
    np.testing.assert_allclose(lam, np.linalg.eigvalsh(H), atol=1e-12 * max(1, np.abs(H).max()))
    np.testing.assert_allclose(U @ np.diag(lam) @ U.conj().T, H, atol=1e-12 * max(1, np.abs(H).max()))
    np.testing.assert_allclose(U.conj().T @ U, np.eye(n), atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_reduction_preserves_moments(seed, n):
    qf = random_form(seed, n)
    sf = reduce(qf)
    LA = qf.L @ qf.A
    np.testing.assert_allclose(np.sort(sf.lam), np.sort(np.linalg.eigvals(LA).real), rtol=1e-9, atol=1e-9)
    assert sf.mean() == pytest.approx(qf.mean(), rel=1e-10, abs=1e-10)
    # Var Q = tr((LA)^2) + 2 v^H A L A v
    v = qf.v_bar
    var = np.real(np.trace(LA @ LA) + 2 * v.conj() @ qf.A @ qf.L @ qf.A @ v)
    assert sf.second_moment() - sf.mean() ** 2 == pytest.approx(var, rel=1e-9, abs=1e-9)


def test_whitened_mean_reconstructs_v_bar():
    qf = random_form(7, 4)
    sf = reduce(qf)
    np.testing.assert_allclose(sf.C @ sf.U @ sf.h_bar, qf.v_bar, atol=1e-12)


def test_fingerprint_is_deterministic():
    assert reduce(random_form(3, 5)).fingerprint() == reduce(random_form(3, 5)).fingerprint()


def test_not_hermitian_names_entry():
    A = np.array([[1.0, 2.0], [2.5, 1.0]])
    with pytest.raises(NotHermitian) as exc:
        QuadraticForm(A, np.eye(2), np.zeros(2))
    assert exc.value.name == "A" and {exc.value.i, exc.value.j} == {0, 1}


def test_not_positive_definite():
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_singular_form():
    with pytest.raises(SingularForm):
        reduce(QuadraticForm(np.diag([1.0, 0.0]), np.eye(2), np.zeros(2)))
    with pytest.raises(SingularForm):
        SpectralForm([1.0, 0.0], [0.0, 0.0])


def test_input_validation():
    with pytest.raises(InvalidInput):
        QuadraticForm(np.eye(2), np.eye(3), np.zeros(2))
    with pytest.raises(InvalidInput):
        QuadraticForm(np.eye(2), np.eye(2), [np.nan, 0])
    with pytest.raises(InvalidInput):
        SpectralForm([1.0], [-0.1])
