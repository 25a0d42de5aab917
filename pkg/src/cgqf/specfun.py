"""Special functions used by the MSE formula and the BER expression.

``gauss_2f1`` is generic over the numeric type of ``z``: pass a float for
double precision or a :class:`gmpy2.mpfr` (together with a matching ``tol``)
for extended precision.
"""

import math

import numpy as np
from scipy import special

from .errors import DomainError, NoConvergence

# Switch from lgamma differences to the asymptotic series of
# log(Gamma(m + 1/2) / (sqrt(m) Gamma(m))) at this m.
_STIRLING_SWITCH = 20.0


def log_gamma(x):
    """Natural log of the gamma function for real ``x > 0``."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def _log_nakagami_mean(m):
    if m >= _STIRLING_SWITCH:
        # lnG(m+1/2) - lnG(m) - ln(m)/2 ~ sum of (B_{k+1}(1/2) - B_{k+1}) / (k(k+1) m^k)
        r = 1.0 / m
        r2 = r * r
        return r * (-1.0 / 8 + r2 * (1.0 / 192 + r2 * (-1.0 / 640 + r2 * (17.0 / 14336))))
    return math.lgamma(m + 0.5) - math.lgamma(m) - 0.5 * math.log(m)


def nakagami_mean(m):
    """E[xi] for xi**2 ~ Gamma(m, 1/m), i.e. Gamma(m+1/2) / (sqrt(m) Gamma(m))."""
    if not m > 0:
        raise DomainError(f"nakagami_mean requires m > 0, got {m!r}")
    return math.exp(_log_nakagami_mean(m))


def one_minus_nakagami_mean(m):
    """``1 - nakagami_mean(m)`` without cancellation for large ``m``."""
    if not m > 0:
        raise DomainError(f"nakagami_mean requires m > 0, got {m!r}")
    return -math.expm1(_log_nakagami_mean(m))


def q_function(x):
    """Gaussian tail probability Q(x) = erfc(x / sqrt(2)) / 2.

    Accepts scalars or arrays; scalars come back as ``float``.
    """
    out = 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


def _nonpositive_int(v):
    fv = float(v)
    return fv <= 0 and fv == math.floor(fv)


def _series(a, b, c, x, tol, max_terms):
    one = x * 0 + 1
    term = one
    total = one
    terminating = _nonpositive_int(a) or _nonpositive_int(b)
    n_max = max_terms
    if terminating:
        n_max = int(-min(float(v) for v in (a, b) if _nonpositive_int(v)))
    ax = abs(x)
    for n in range(n_max):
        # keep x leftmost so every product is rounded in x's precision
        term = term * x * (a + n) * (b + n) / (c + n) / (n + 1)
        total = total + term
        if terminating:
            continue
        ratio = abs(float((a + n + 1) * (b + n + 1) / ((c + n + 1) * (n + 2)))) * float(ax)
        if ratio < 1 and abs(term) <= tol * (1 - ratio) * abs(total):
            return total
    if terminating:
        return total
    raise NoConvergence(f"2F1({a}, {b}; {c}; {x}) did not converge in {max_terms} terms")


def gauss_2f1(a, b, c, z, *, tol=1e-14, max_terms=100_000):
    """Gauss hypergeometric function 2F1(a, b; c; z) for real ``z <= 0``.

    Terminating representations are preferred whenever one exists: the
    direct series if ``a`` or ``b`` is a non-positive integer, otherwise a
    Pfaff transform whose upper parameter ``c - b`` (or ``c - a``) is one.
    Non-terminating cases use the direct series on ``[-1/2, 0]`` and the
    Pfaff transform ``(1 - z)**-a 2F1(a, c - b; c; z / (z - 1))`` below, where
    its argument lies in ``(1/3, 1)`` and the series converges geometrically.

    The terminating Pfaff polynomial alternates in sign and can lose up to
    about ``n`` bits to cancellation, ``n`` being its degree; extended-precision
    callers should carry that many guard bits.
    """
    if _nonpositive_int(c):
        raise DomainError(f"2F1 undefined for c = {c}")
    if z > 0:
        raise DomainError(f"gauss_2f1 only supports z <= 0, got {z}")
    if z == 0:
        return z * 0 + 1
    if _nonpositive_int(a) or _nonpositive_int(b):
        return _series(a, b, c, z, tol, max_terms)
    one_minus_z = 1 - z
    w = z / (z - 1)
    if _nonpositive_int(c - b):
        return one_minus_z ** (-a) * _series(a, c - b, c, w, tol, max_terms)
    if _nonpositive_int(c - a):
        return one_minus_z ** (-b) * _series(c - a, b, c, w, tol, max_terms)
    if z >= -0.5:
        return _series(a, b, c, z, tol, max_terms)
    return one_minus_z ** (-a) * _series(a, c - b, c, w, tol, max_terms)
