"""Exact partial-fraction residues of the confluent MGF.

With ``R(s) = prod_t (s + 1/lt_t)**q_t / prod_i (s + b_i)**p_i`` (the MGF
evaluated at ``-s`` without its constant factor),

    R(s)     = sum_{i,j} A[i, j] / (s + b_i)**j
    R(s) / s = R(0) / s + sum_{i,j} C[i, j] / (s + b_i)**j

All residues are exact rationals (:class:`gmpy2.mpq`); conversion to
extended-precision floats happens only in :func:`to_coefficients`.
"""

import csv
import functools
import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpq, mpz

from .errors import CollisionAfterRationalize, InvalidInput, TooLarge

log = logging.getLogger(__name__)

DEFAULT_MAX_DENOMINATOR = 10**9
CLOSED_FORM_LIMIT = 64
DEFAULT_PRECISION = 512


@dataclass(frozen=True)
class RationalPoleZeroSystem:
    m: int
    poles: tuple  # ((b, p), ...) exact, pairwise distinct
    zeros: tuple  # ((lt, q), ...) exact; zero of R at -1/lt

    def __post_init__(self):
        bs = [b for b, _ in self.poles]
        zs = [1 / lt for lt, _ in self.zeros]
        if len(set(bs)) != len(bs) or len(set(zs)) != len(zs):
            raise CollisionAfterRationalize("poles or zeros are not pairwise distinct")
        if set(bs) & set(zs):
            raise CollisionAfterRationalize("a pole coincides with a zero")
        if any(b == 0 for b in bs) or any(lt == 0 for lt, _ in self.zeros):
            raise InvalidInput("poles and zero parameters must be non-zero")

    @classmethod
    def from_values(cls, poles, zeros=(), m=1):
        """Build from ``(value, multiplicity)`` pairs given as ints, strings or Fractions."""
        conv = lambda v: v if isinstance(v, mpq) else mpq(Fraction(v))  # noqa: E731
        return cls(
            m=m,
            poles=tuple((conv(b), int(p)) for b, p in poles),
            zeros=tuple((conv(l), int(q)) for l, q in zeros),
        )

    @property
    def total_multiplicity(self):
        return sum(p for _, p in self.poles)

    def r_at_zero(self):
        """R(0) = prod (1/lt)**q / prod b**p."""
        val = mpq(1)
        for lt, q in self.zeros:
            val *= (1 / lt) ** q
        for b, p in self.poles:
            val /= b**p
        return val


def _to_rational(x, max_denominator):
    f = Fraction(float(x)).limit_denominator(max_denominator)
    return mpq(f.numerator, f.denominator)


def rationalize(pz, max_denominator=DEFAULT_MAX_DENOMINATOR):
    """Replace every pole/zero value by its best rational approximation."""
    if max_denominator < 10**6:
        raise InvalidInput("max_denominator must be at least 1e6")
    poles = tuple((_to_rational(b, max_denominator), p) for b, p in pz.poles)
    zeros = tuple((_to_rational(l, max_denominator), q) for l, q in pz.zeros)
    try:
        return RationalPoleZeroSystem(m=pz.m, poles=poles, zeros=zeros)
    except CollisionAfterRationalize as exc:
        raise CollisionAfterRationalize(f"{exc}; increase max_denominator") from exc


@dataclass(frozen=True)
class ResidueTable:
    A: dict  # (i, j) -> mpq, i = 1..n_beta, j = 1..p_i
    C: dict
    prefactor_base: mpq
    system: RationalPoleZeroSystem

    def beta(self, i):
        return self.system.poles[i - 1][0]

    def write_csv(self, path, table="A"):
        """Dump one table with columns i, j, numerator, denominator."""
        data = {"A": self.A, "C": self.C}[table]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["i", "j", "numerator", "denominator"])
            for (i, j), v in sorted(data.items()):
                w.writerow([i, j, gmpy2.digits(v.numerator), gmpy2.digits(v.denominator)])


def _prefactor_base(rpz):
    # equals prod [lam (1 + mu/m)^m]^-1 exactly for an unperturbed system, and
    # keeps sum(alpha-mass) == 1 exactly after rationalization
    return 1 / rpz.r_at_zero()


# ---------------------------------------------------------------- closed form


def _leibniz_factors(rpz, i, with_origin):
    """Per-factor k-th Taylor coefficient functions of G_i(s) at s = -b_i."""
    bi = rpz.poles[i][0]
    factors = []
    for lt, q in rpz.zeros:
        d = 1 / lt - bi
        factors.append((q, lambda k, d=d, q=q: math.comb(q, k) * d ** (q - k)))
    for l, (bl, pl) in enumerate(rpz.poles):
        if l == i:
            continue
        e = bl - bi
        factors.append(
            (None, lambda k, e=e, pl=pl: (-1) ** k * math.comb(pl + k - 1, k) / e ** (pl + k))
        )
    if with_origin:
        factors.append((None, lambda k: mpq((-1) ** k) / (-bi) ** (1 + k)))
    return factors


def _composition_sum(factors, total):
    """sum over k_1 + ... + k_N = total (k_u <= cap_u) of prod f_u(k_u)."""
    if not factors:
        return mpq(1) if total == 0 else mpq(0)
    (cap, f), rest = factors[0], factors[1:]
    top = total if cap is None else min(cap, total)
    acc = mpq(0)
    for k in range(top + 1):
        sub = _composition_sum(rest, total - k)
        if sub:
            acc += f(k) * sub
    return acc


def residues_closed_form(rpz):
    """Residues by direct enumeration of the generalized Leibniz rule."""
    if rpz.total_multiplicity > CLOSED_FORM_LIMIT:
        raise TooLarge(
            f"total multiplicity {rpz.total_multiplicity} > {CLOSED_FORM_LIMIT}; "
            "use residues_recursive"
        )
    A, C = {}, {}
    for i, (_, p) in enumerate(rpz.poles):
        fa = _leibniz_factors(rpz, i, False)
        fc = _leibniz_factors(rpz, i, True)
        for j in range(1, p + 1):
            A[(i + 1, j)] = _composition_sum(fa, p - j)
            C[(i + 1, j)] = _composition_sum(fc, p - j)
    return ResidueTable(A=A, C=C, prefactor_base=_prefactor_base(rpz), system=rpz)


# ------------------------------------------------------------------ recursive


def _reciprocal_offsets(rpz, i, with_origin):
    """(1 / (root - a), weight) for every root of R other than a = -b_i."""
    a = -rpz.poles[i][0]
    out = [(1 / (-bl - a), pl) for l, (bl, pl) in enumerate(rpz.poles) if l != i]
    out += [(1 / (-1 / lt - a), -q) for lt, q in rpz.zeros]
    if with_origin:
        out.append((1 / (0 - a), 1))
    return out


def _leading(rpz, i, with_origin):
    """Residue at the highest order: G_i(-b_i)."""
    bi = rpz.poles[i][0]
    val = mpq(1)
    for lt, q in rpz.zeros:
        val *= (1 / lt - bi) ** q
    for l, (bl, pl) in enumerate(rpz.poles):
        if l != i:
            val /= (bl - bi) ** pl
    if with_origin:
        val /= -bi
    return val


def _power_sums(offsets, count):
    """rho(k) = sum w t**k for k = 1..count, scaled to integers by Den**k.

    Returns ``(Den, [None, rho'(1), ...])`` with ``rho(k) = rho'(k) / Den**k``.
    """
    den = mpz(1)
    for t, _ in offsets:
        den = gmpy2.lcm(den, t.denominator)
    ints = [(t.numerator * (den // t.denominator), w) for t, w in offsets]
    powers = [mpz(1)] * len(ints)
    rho = [None]
    for _ in range(count):
        powers = [pw * t for pw, (t, _) in zip(powers, ints)]
        rho.append(sum(w * pw for pw, (_, w) in zip(powers, ints)))
    return den, rho


def _taylor_recursion(rpz, i, with_origin):
    """Exact residues [X_{i,p}, X_{i,p-1}, ..., X_{i,1}] by the log-derivative recursion.

    X_{i,j} = 1/(p-j) sum_k X_{i,j+k} rho(k); the recursion runs on integers
    g'_n = n! Den**n X_{i,p-n} / X_{i,p}, which avoids a gcd per operation.
    """
    p = rpz.poles[i][1]
    g0 = _leading(rpz, i, with_origin)
    den, rho = _power_sums(_reciprocal_offsets(rpz, i, with_origin), p - 1)
    scaled = [mpz(1)]
    for n in range(1, p):
        acc = mpz(0)
        c = mpz(1)  # (n-1)! / r!
        for r in range(n - 1, -1, -1):
            acc += c * scaled[r] * rho[n - r]
            c *= r if r else 1
        scaled.append(acc)
    out = []
    fact_den = mpz(1)
    for n, g in enumerate(scaled):
        out.append(g0 * mpq(g, fact_den))
        fact_den *= (n + 1) * den
    return out


def _rho_exact(offsets, k):
    return sum(w * t**k for t, w in offsets)


def _c_from_a_printed(rpz, i, a_desc):
    """C residues with the recursion summing A_{i,j+k} instead of C_{i,j+k}."""
    p = rpz.poles[i][1]
    offs = _reciprocal_offsets(rpz, i, True)
    rho = [None] + [_rho_exact(offs, k) for k in range(1, p)]
    out = [_leading(rpz, i, True)]
    for n in range(1, p):
        out.append(sum(a_desc[n - k] * rho[k] for k in range(1, n + 1)) / n)
    return out


def _recursive_tables(rpz, c_variant):
    A, C = {}, {}
    for i, (_, p) in enumerate(rpz.poles):
        a_desc = _taylor_recursion(rpz, i, False)
        if c_variant == "self":
            c_desc = _taylor_recursion(rpz, i, True)
        else:
            c_desc = _c_from_a_printed(rpz, i, a_desc)
        for n in range(p):
            A[(i + 1, p - n)] = a_desc[n]
            C[(i + 1, p - n)] = c_desc[n]
    return A, C


def _random_small_system(rng):
    n_b = rng.randint(1, 3)
    vals = rng.sample(range(-9, 10), n_b + rng.randint(0, 2))
    vals = [v for v in vals if v != 0]
    poles = [(mpq(v, rng.randint(1, 4)), rng.randint(1, 4)) for v in vals[:n_b]] or [(mpq(1), 2)]
    zvals = [v for v in vals[n_b:]]
    zeros = [(mpq(rng.randint(1, 4), v), rng.randint(1, 3)) for v in zvals]
    try:
        return RationalPoleZeroSystem(m=1, poles=tuple(poles), zeros=tuple(zeros))
    except CollisionAfterRationalize:
        return RationalPoleZeroSystem(m=1, poles=((mpq(1), 3), (mpq(-5, 2), 2)), zeros=())


@functools.lru_cache(maxsize=None)
def c_recursion_variant():
    """Pick the C-recursion variant that matches the brute-force oracle.

    Runs once per process on five fixed pseudo-random systems.
    """
    from .oracles import residues_bruteforce

    rng = random.Random(20170501)
    systems = [_random_small_system(rng) for _ in range(5)]
    for variant in ("self", "printed"):
        if all(_recursive_tables(s, variant)[1] == residues_bruteforce(s)[1] for s in systems):
            log.info("C-residue recursion variant selected: %s", variant)
            return variant
    raise RuntimeError("no C-recursion variant reproduces the brute-force residues")


def residues_recursive(rpz, c_variant=None):
    """Residues by the linear-cost-per-entry recursion over exact rationals."""
    variant = c_variant or c_recursion_variant()
    A, C = _recursive_tables(rpz, variant)
    return ResidueTable(A=A, C=C, prefactor_base=_prefactor_base(rpz), system=rpz)


def to_coefficients(rt, precision_bits=DEFAULT_PRECISION):
    """PDF/CDF weights ``alpha = B_j A`` and ``omega = B_j C`` with ``B_j = base/(j-1)!``.

    Values are rounded once from the exact rationals to ``precision_bits``.
    """
    alpha, omega = {}, {}
    with gmpy2.context(gmpy2.get_context(), precision=precision_bits):
        for (i, j), a in rt.A.items():
            b = rt.prefactor_base / math.factorial(j - 1)
            alpha[(i, j)] = gmpy2.mpfr(b * a)
            omega[(i, j)] = gmpy2.mpfr(b * rt.C[(i, j)])
    return alpha, omega


def reconstruct(rt, s):
    """Partial-fraction sums at an exact point ``s``: ``(sum A/(s+b)^j, R(0)/s + sum C/(s+b)^j)``.

    They must equal ``R(s)`` and ``R(s)/s`` exactly.
    """
    s = s if isinstance(s, mpq) else mpq(Fraction(s))
    ra = mpq(0)
    rc = rt.system.r_at_zero() / s
    for (i, j), a in rt.A.items():
        shift = (s + rt.beta(i)) ** j
        ra += a / shift
        rc += rt.C[(i, j)] / shift
    return ra, rc
