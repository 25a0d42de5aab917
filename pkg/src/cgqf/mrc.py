"""Correlated-Rician MRC receiver: outage probability and average M-QAM BER.

The post-combining SNR is ``gamma_bar * g^H g`` with ``g ~ CN(g_bar, Sigma)``,
a positive-definite non-central quadratic form with ``A = I``.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import gmpy2
import numpy as np
from scipy import integrate

from .confluent import normalized_mse, select_m
from .distribution import ClosedFormDistribution
from .errors import InvalidInput, InvalidK, PrecisionLoss, UnsupportedM
from .reduction import QuadraticForm, reduce
from .residues import DEFAULT_PRECISION
from .specfun import gauss_2f1, q_function

COVARIANCE_CONVENTIONS = ("unit-power", "paper-literal")
SUPPORTED_M = (4, 16, 64, 256)


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class MrcScenario:
    """P-branch MRC over exponentially correlated Rician fading.

    Either ``m`` is given or it is chosen as the smallest value meeting
    ``mse_target`` for the normalized MSE.
    """

    k: tuple
    rho: float
    M: int = 4
    m: int = None
    mse_target: float = 1e-2
    gamma_bar_db: tuple = ()
    gamma_th_db: float = 0.0
    covariance: str = "unit-power"
    label: str = field(default="", compare=False)

    def __post_init__(self):
        k = tuple(float(v) for v in np.atleast_1d(self.k))
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "gamma_bar_db", tuple(float(v) for v in self.gamma_bar_db))
        if not k:
            raise InvalidInput("need at least one branch")
        if any(not math.isfinite(v) or v < 0 for v in k):
            raise InvalidK(f"Rician factors must be finite and >= 0, got {k}")
        if not abs(self.rho) < 1:
            raise InvalidInput(f"correlation |rho| must be < 1, got {self.rho}")
        if self.covariance not in COVARIANCE_CONVENTIONS:
            raise InvalidInput(f"unknown covariance convention {self.covariance!r}")
        if self.m is not None and int(self.m) < 1:
            raise InvalidInput("m must be >= 1")

    @property
    def P(self):
        return len(self.k)

    @property
    def gamma_th(self):
        return float(db_to_linear(self.gamma_th_db))

    @property
    def gamma_bars(self):
        return db_to_linear(self.gamma_bar_db)


def correlation_matrix(P, rho):
    idx = np.arange(P)
    return float(rho) ** np.abs(idx[:, None] - idx[None, :])


def build_channel(sc: MrcScenario) -> QuadraticForm:
    """Quadratic form g^H g with LoS mean and scattered covariance per the convention."""
    K = np.array(sc.k)
    R = correlation_matrix(sc.P, sc.rho)
    g_bar = np.sqrt(K / (K + 1))
    if sc.covariance == "unit-power":
        s = 1.0 / np.sqrt(K + 1)
    else:
        if np.any(K == 0):
            raise InvalidK("the paper-literal covariance 1/sqrt(Ki Kj) is undefined for K = 0")
        s = 1.0 / np.sqrt(K)
    Sigma = R * np.outer(s, s)
    return QuadraticForm(np.eye(sc.P), Sigma, g_bar.astype(complex))


def resolve_m(sc: MrcScenario):
    if sc.m is not None:
        return int(sc.m)
    return select_m(reduce(build_channel(sc)), sc.mse_target)


@lru_cache(maxsize=64)
def _distribution(lam, mu, m, precision_bits):
    from .reduction import SpectralForm

    return ClosedFormDistribution.from_spectral(SpectralForm(lam, mu), m, precision_bits)


def channel_distribution(sc: MrcScenario, precision_bits=DEFAULT_PRECISION):
    """Confluent distribution of ``g^H g`` (the SNR normalized by ``gamma_bar``)."""
    sf = reduce(build_channel(sc))
    m = resolve_m(sc)
    return _distribution(tuple(sf.lam), tuple(sf.mu), m, int(precision_bits))


def scenario_mse(sc: MrcScenario, m=None):
    return normalized_mse(reduce(build_channel(sc)), resolve_m(sc) if m is None else m)


# ---------------------------------------------------------------- QAM weights


@dataclass(frozen=True)
class QamWeights:
    L: int
    w: tuple

    @property
    def M(self):
        return self.L * self.L


def _pam_bit_error_expansion(L):
    """Coefficients c_i (exact) with average Gray L-PAM bit errors = sum c_i Q((2i-1) a).

    Level l sits at (2l - L + 1) d; the decision region of l' is bounded by the
    midpoints to its neighbours, so with Delta = l' - l and a = d / sigma

        P(l -> l') = Q((2 Delta - 1) a) - Q((2 Delta + 1) a)

    where the edge regions drop the second (or first) term. Q(-x) = 1 - Q(x)
    folds negative arguments; the constant parts cancel for a valid expansion.
    """
    nb = L.bit_length() - 1
    coeff = {}
    const = Fraction(0)

    def add(arg_odd, weight):
        nonlocal const
        if arg_odd < 0:
            const += weight
            coeff[-arg_odd] = coeff.get(-arg_odd, 0) - weight
        else:
            coeff[arg_odd] = coeff.get(arg_odd, 0) + weight

    for l in range(L):
        for lp in range(L):
            if lp == l:
                continue
            errs = bin((l ^ (l >> 1)) ^ (lp ^ (lp >> 1))).count("1")
            wgt = Fraction(errs, L * nb)
            delta = lp - l
            # region of lp in units of a around the sent level: [2D-1, 2D+1]
            if delta > 0:
                add(2 * delta - 1, wgt)
                if lp < L - 1:
                    add(2 * delta + 1, -wgt)
            else:
                add(-2 * delta - 1, wgt)
                if lp > 0:
                    add(-2 * delta + 1, -wgt)
    if const != 0:
        raise AssertionError("Gray PAM expansion left a constant term")
    return {(odd + 1) // 2: c for odd, c in coeff.items() if c != 0}


def qam_weights(M) -> QamWeights:
    """Weights with P_b(g) = L sum_i w(i) Q((2i-1) sqrt(3 g / (M - 1))) for Gray square QAM."""
    if M not in SUPPORTED_M:
        raise UnsupportedM(f"M must be one of {SUPPORTED_M}, got {M}")
    L = math.isqrt(M)
    c = _pam_bit_error_expansion(L)
    w = tuple(Fraction(c.get(i, 0), L) for i in range(1, L))
    if any(i >= L for i in c):
        raise AssertionError("expansion reached beyond Q((2L-3) a)")
    return QamWeights(L, w)


def conditional_ber(M, gamma):
    """Exact Gray M-QAM BER at instantaneous SNR ``gamma`` (scalar or array)."""
    qw = qam_weights(M)
    g = np.asarray(gamma, dtype=float)
    a = np.sqrt(3.0 * g / (M - 1))
    out = sum(float(w) * q_function((2 * i - 1) * a) for i, w in enumerate(qw.w, start=1))
    out = qw.L * np.asarray(out)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- performance


def outage(sc: MrcScenario, gamma_bar, precision_bits=DEFAULT_PRECISION):
    """P(gamma_bar * g^H g < gamma_th) from the confluent CDF (scalar or array)."""
    gb = np.asarray(gamma_bar, dtype=float)
    if np.any(gb <= 0) or not sc.gamma_th > 0:
        raise InvalidInput("gamma_bar and gamma_th must be positive")
    d = channel_distribution(sc, precision_bits)
    return d.cdf(sc.gamma_th / gb)


def _ber_single(d, qw, gamma_bar):
    bits = d.precision_bits
    mp = gmpy2.mpfr
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        M = qw.M
        gb = mp(gamma_bar)
        root = gmpy2.sqrt(gb / (2 * gmpy2.const_pi()))
        s3 = gmpy2.sqrt(mp(3) / (M - 1))
        tol = mp(2) ** (-(bits - 16))
        total = mp(0)
        biggest = mp(0)
        for b, alpha, _ in d.groups:
            for j, a_ij in enumerate(alpha, start=1):
                half = gmpy2.gamma(mp(j)) / (2 * b**j)
                g_half = gmpy2.gamma(mp(j) + mp(0.5)) / b ** (mp(j) + mp(0.5))
                for kk, wk in enumerate(qw.w, start=1):
                    if wk == 0:
                        continue
                    delta = (2 * kk - 1) * s3
                    z = -(delta**2) * gb / (2 * b)
                    # the terminating 2F1 polynomial of degree j-1 cancels up to j bits
                    with gmpy2.context(gmpy2.get_context(), precision=bits + j + 32):
                        f = gauss_2f1(mp(0.5), mp(j) + mp(0.5), mp(1.5), mp(z), tol=tol)
                    f = +f
                    term = qw.L * mp(wk.numerator) / wk.denominator * a_ij * (
                        half - delta * g_half * root * f
                    )
                    total += term
                    biggest = max(biggest, abs(a_ij * half), abs(term))
        if biggest > 0 and total != 0:
            lost = float(gmpy2.log2(biggest)) - max(float(gmpy2.log2(abs(total))), -64.0)
            if lost > bits - 64:
                raise PrecisionLoss(f"BER at gamma_bar={gamma_bar:g} lost 2^{lost:.0f}; raise precision_bits")
        return float(total)


def ber(sc: MrcScenario, gamma_bar, precision_bits=DEFAULT_PRECISION):
    """Average Gray M-QAM BER by termwise integration against the confluent PDF."""
    d = channel_distribution(sc, precision_bits)
    if not all(b > 0 for b in d.poles):
        raise InvalidInput("BER requires a positive-definite SNR form")
    qw = qam_weights(sc.M)
    gb = np.asarray(gamma_bar, dtype=float)
    if np.any(gb <= 0):
        raise InvalidInput("gamma_bar must be positive")
    out = np.array([_ber_single(d, qw, g) for g in gb.reshape(-1)]).reshape(gb.shape)
    return float(out) if out.ndim == 0 else out


def ber_quadrature(sc: MrcScenario, gamma_bar, precision_bits=DEFAULT_PRECISION):
    """Independent check: integrate P_b(gamma_bar x) f(x) numerically."""
    d = channel_distribution(sc, precision_bits)
    mean = sum(
        float(a) * math.factorial(j) / float(b) ** (j + 1)
        for b, alpha, _ in d.groups
        for j, a in enumerate(alpha, start=1)
    )

    def integrand(x):
        return conditional_ber(sc.M, gamma_bar * x) * d.pdf(x)

    # Split near the origin, where P_b varies on the scale 1/gamma_bar.
    edges = sorted({0.0, min(1.0, 30.0 / gamma_bar), 1.0, mean, 4 * mean, 20 * mean})
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += integrate.quad(integrand, lo, hi, epsabs=0, epsrel=1e-10, limit=200)[0]
    total += integrate.quad(integrand, edges[-1], np.inf, epsabs=0, epsrel=1e-10, limit=200)[0]
    return total
