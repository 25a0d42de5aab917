"""Confluent quadratic form ``Q_m``: rational MGF, exact MGF of ``Q``, MSE and m selection.

``Q_m`` replaces the mean vector ``h`` by ``D_xi h`` with ``xi_i**2 ~ Gamma(m, 1/m)``.
Its MGF is the rational function

    M(s) = prefactor * prod_j (s - 1/lt_j)**q_j / prod_i (s - b_i)**p_i

with ``b_i = 1 / (lam_i (1 + mu_i/m))``. Zeros are stored by ``lt_j`` (the
zero itself sits at ``1/lt_j``).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSystem, InvalidInput, PoleHit, TargetUnreachable
from .specfun import one_minus_nakagami_mean

MERGE_TOL = 1e-9
POLE_TOL = 1e-300


@dataclass(frozen=True)
class PoleZeroSystem:
    m: int
    log_prefactor: float
    prefactor_sign: int
    poles: tuple  # ((beta, p), ...) ascending in beta
    zeros: tuple  # ((lambda_tilde, q), ...) ascending in 1/lambda_tilde
    n: int

    @property
    def prefactor(self):
        return self.prefactor_sign * math.exp(self.log_prefactor)

    @property
    def degree_gap(self):
        return sum(p for _, p in self.poles) - sum(q for _, q in self.zeros)


def _cluster(items):
    """Merge (value, multiplicity) pairs closer than MERGE_TOL relative."""
    out = []
    for v, k in sorted(items):
        if out and abs(v - out[-1][0]) <= MERGE_TOL * max(abs(v), abs(out[-1][0])):
            v0, k0 = out[-1]
            out[-1] = ((v0 * k0 + v * k) / (k0 + k), k0 + k)
        else:
            out.append((v, k))
    return out


def simplify(poles, zeros, *, m=1, log_prefactor=0.0, prefactor_sign=1, n=None):
    """Merge coincident poles/zeros and cancel pole-zero pairs.

    ``poles`` are ``(beta, p)`` pairs; ``zeros`` are ``(lambda_tilde, q)``
    pairs whose zero location is ``1/lambda_tilde``.
    """
    P = _cluster([(float(b), int(p)) for b, p in poles if p > 0])
    Z = _cluster([(1.0 / float(l), int(q)) for l, q in zeros if q > 0])
    poles_out, zeros_out = [], []
    z_left = dict(enumerate(q for _, q in Z))
    for b, p in P:
        for jz, (z, _) in enumerate(Z):
            if z_left[jz] and abs(b - z) <= MERGE_TOL * max(abs(b), abs(z)):
                c = min(p, z_left[jz])
                p -= c
                z_left[jz] -= c
        if p:
            poles_out.append((b, p))
    zeros_out = [(1.0 / z, z_left[jz]) for jz, (z, _) in enumerate(Z) if z_left[jz]]
    if not poles_out:
        raise DegenerateSystem("all poles cancelled")
    if n is None:
        n = sum(p for _, p in poles_out) - sum(q for _, q in zeros_out)
    return PoleZeroSystem(
        m=m,
        log_prefactor=log_prefactor,
        prefactor_sign=prefactor_sign,
        poles=tuple(poles_out),
        zeros=tuple(sorted(zeros_out, key=lambda t: 1.0 / t[0])),
        n=n,
    )


def build_pole_zero(sf, m):
    """Rational MGF of ``Q_m`` for the spectral form ``sf``."""
    m = int(m)
    if m < 1:
        raise InvalidInput(f"shape parameter m must be >= 1, got {m}")
    poles, zeros = [], []
    log_pref = 0.0
    sign = 1
    for lam, mu in zip(sf.lam, sf.mu):
        # [(-lam) (1 + mu/m)^m]^-1 accumulated in log space
        log_pref -= math.log(abs(lam)) + m * math.log1p(mu / m)
        sign *= -1 if lam > 0 else 1
        if mu > 0:
            poles.append((1.0 / (lam * (1 + mu / m)), m))
            zeros.append((lam, m - 1))
        else:
            poles.append((1.0 / lam, 1))
    return simplify(poles, zeros, m=m, log_prefactor=log_pref, prefactor_sign=sign, n=sf.n)


def _log_sum(s, roots):
    return sum(k * np.log(s - r) for r, k in roots)


def mgf_original(sf, s):
    """Exact MGF E[exp(sQ)] = prod exp(lam mu s / (1 - lam s)) / (1 - lam s)."""
    s = np.asarray(s, dtype=complex)
    out = np.zeros_like(s)
    for lam, mu in zip(sf.lam, sf.mu):
        d = 1 - lam * s
        if np.any(np.abs(d) < POLE_TOL):
            raise PoleHit(f"s hits the pole 1/lambda = {1 / lam}")
        out = out + lam * mu * s / d - np.log(d)
    res = np.exp(out)
    return complex(res) if res.ndim == 0 else res


def mgf_confluent(pz, s):
    """MGF of ``Q_m`` from its pole/zero system, evaluated in log space."""
    s = np.asarray(s, dtype=complex)
    for b, _ in pz.poles:
        if np.any(np.abs(s - b) < POLE_TOL * max(1.0, abs(b))):
            raise PoleHit(f"s hits the pole {b}")
    logm = pz.log_prefactor + _log_sum(s, [(1.0 / l, q) for l, q in pz.zeros]) - _log_sum(s, pz.poles)
    res = pz.prefactor_sign * np.exp(logm)
    return complex(res) if np.ndim(res) == 0 else res


def mse(sf, m):
    """E[(Q_m - Q)^2] = sum lam^2 mu [4 (1 - E xi) + mu / m]."""
    if m < 1:
        raise InvalidInput(f"shape parameter m must be >= 1, got {m}")
    lam2mu = sf.lam**2 * sf.mu
    return float(np.sum(lam2mu * (4 * one_minus_nakagami_mean(m) + sf.mu / m)))


def normalized_mse(sf, m):
    return mse(sf, m) / sf.second_moment()


def select_m(sf, target, m_max=10_000):
    """Smallest ``m <= m_max`` with ``mse(sf, m) / E[Q^2] <= target``."""
    if not target > 0:
        raise InvalidInput("MSE target must be positive")
    ok = lambda m: normalized_mse(sf, m) <= target  # noqa: E731
    if ok(1):
        return 1
    if not ok(m_max):
        raise TargetUnreachable(
            f"normalized MSE at m={m_max} is {normalized_mse(sf, m_max):.3e} > {target:.3e}"
        )
    lo, hi = 1, 2
    while hi < m_max and not ok(hi):
        lo, hi = hi, min(2 * hi, m_max)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi
