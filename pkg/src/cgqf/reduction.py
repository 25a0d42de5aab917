"""Reduction of a non-central complex Gaussian quadratic form to spectral form.

A form ``Q = v^H A v`` with ``v ~ CN(v_bar, L)`` is rewritten as
``Q = sum_i lambda_i |y_i + h_i|^2`` with ``y ~ CN(0, I)``; the pairs
``(lambda_i, mu_i = |h_i|^2)`` fully determine the distribution of ``Q``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, NotHermitian, NotPositiveDefinite, SingularForm, InvalidInput

HERMITIAN_RTOL = 1e-12
EIG_TOL = 1e-10


def _check_hermitian(name, H):
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidInput(f"matrix {name} must be square, got shape {H.shape}")
    scale = max(np.max(np.abs(H)), np.finfo(float).tiny)
    dev = np.abs(H - H.conj().T)
    if np.max(dev) > HERMITIAN_RTOL * scale:
        i, j = np.unravel_index(np.argmax(dev), dev.shape)
        raise NotHermitian(name, int(i), int(j), float(dev[i, j]))
    return 0.5 * (H + H.conj().T)


@dataclass(frozen=True)
class QuadraticForm:
    """``Q = v^H A v`` with ``v ~ CN(v_bar, L)``.

    Inputs are validated and symmetrized as ``(H + H^H) / 2`` on construction.
    """

    A: np.ndarray
    L: np.ndarray
    v_bar: np.ndarray

    def __post_init__(self):
        A = _check_hermitian("A", self.A)
        L = _check_hermitian("L", self.L)
        v = np.asarray(self.v_bar, dtype=complex).reshape(-1)
        if A.shape != L.shape or v.shape[0] != A.shape[0]:
            raise InvalidInput(
                f"dimension mismatch: A {A.shape}, L {L.shape}, v_bar {v.shape}"
            )
        for name, arr in (("A", A), ("L", L), ("v_bar", v)):
            if not np.all(np.isfinite(arr)):
                raise InvalidInput(f"{name} contains non-finite entries")
            arr.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "v_bar", v)

    @property
    def n(self):
        return self.A.shape[0]

    def mean(self):
        """E[Q] = tr(L A) + v_bar^H A v_bar."""
        return float(np.real(np.trace(self.L @ self.A) + self.v_bar.conj() @ self.A @ self.v_bar))


@dataclass(frozen=True)
class SpectralForm:
    """Eigenvalues ``lam`` of ``L A`` and non-centralities ``mu = |h_bar|**2``."""

    lam: np.ndarray
    mu: np.ndarray
    C: np.ndarray = field(default=None, repr=False)
    U: np.ndarray = field(default=None, repr=False)
    h_bar: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float).reshape(-1)
        mu = np.asarray(self.mu, dtype=float).reshape(-1)
        if lam.shape != mu.shape or lam.size == 0:
            raise InvalidInput("lam and mu must be non-empty vectors of equal length")
        if np.any(mu < 0):
            raise InvalidInput("non-centralities must be >= 0")
        if np.any(lam == 0):
            raise SingularForm("eigenvalues must be non-zero")
        h = self.h_bar
        if h is None:
            h = np.sqrt(mu).astype(complex)
        for arr in (lam, mu):
            arr.setflags(write=False)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "h_bar", np.asarray(h, dtype=complex))

    @property
    def n(self):
        return self.lam.size

    def mean(self):
        return float(np.sum(self.lam * (1 + self.mu)))

    def second_moment(self):
        """E[Q^2] = (sum lam (1 + mu))^2 + sum lam^2 (1 + 2 mu)."""
        return self.mean() ** 2 + float(np.sum(self.lam**2 * (1 + 2 * self.mu)))

    def fingerprint(self):
        """Byte-stable text representation used for pipeline determinism checks."""
        return ";".join(f"{l:.17g},{u:.17g}" for l, u in zip(self.lam, self.mu))


def cholesky(L):
    """Lower-triangular ``C`` with ``L = C C^H`` and positive real diagonal."""
    L = _check_hermitian("L", L)
    try:
        return np.linalg.cholesky(L)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(
            "covariance is not positive definite; reduce the dimension of v first"
        ) from exc


def eigh(H, tol=1e-15, max_sweeps=60):
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Returns ``(U, lam)`` with ``H U = U diag(lam)``, ``lam`` ascending and the
    largest-magnitude entry of every column of ``U`` real and positive.
    """
    H = _check_hermitian("H", H).copy()
    n = H.shape[0]
    V = np.eye(n, dtype=complex)
    norm = np.linalg.norm(H)
    if norm == 0:
        return V, np.zeros(n)
    for _ in range(max_sweeps):
        off = np.linalg.norm(H - np.diag(np.diag(H)))
        if off <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                hpq = H[p, q]
                ahpq = abs(hpq)
                if ahpq <= 1e-300:
                    continue
                phase = hpq / ahpq
                tau = (H[q, q].real - H[p, p].real) / (2 * ahpq)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1 / np.hypot(1.0, t)
                s = t * c
                # J = diag-phase(q) @ real rotation; acts on columns p, q
                J = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                H[:, idx] = H[:, idx] @ J
                H[idx, :] = J.conj().T @ H[idx, :]
                H[p, q] = H[q, p] = 0
                V[:, idx] = V[:, idx] @ J
    else:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    lam = np.real(np.diag(H)).copy()
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    V = V[:, order]
    for k in range(n):
        col = V[:, k]
        i = int(np.argmax(np.abs(col)))
        V[:, k] = col * (abs(col[i]) / col[i])
    return V, lam


def reduce(qf):
    """Diagonalize ``qf`` into a :class:`SpectralForm`."""
    C = cholesky(qf.L)
    K = C.conj().T @ qf.A @ C
    U, lam = eigh(K)
    scale = np.max(np.abs(lam))
    if scale == 0 or np.min(np.abs(lam)) <= EIG_TOL * scale:
        raise SingularForm(f"A is numerically singular: eigenvalues of LA = {lam}")
    h = U.conj().T @ np.linalg.solve(C, qf.v_bar)
    mu = np.abs(h) ** 2
    return SpectralForm(lam=lam, mu=mu, C=C, U=U, h_bar=h)
