"""Closed-form PDF and CDF of the confluent form as exponential-polynomial mixtures.

    f(x) = sum_{i,j} alpha_ij exp(-b_i x) x**(j-1) u(b_i x) sgn(x)
    F(x) = u(x) + sum_{i,j} omega_ij exp(-b_i x) x**(j-1) u(b_i x) sgn(x)

Coefficients alternate in sign and can exceed 1e100 for m in the hundreds, so
they are stored and summed in extended precision (MPFR, 512 bits by default).
"""

import csv
import io
import math

import gmpy2
import numpy as np

from .confluent import build_pole_zero
from .errors import InvalidInput, PrecisionLoss
from .kernels import MixtureKernel
from .residues import (
    DEFAULT_MAX_DENOMINATOR,
    DEFAULT_PRECISION,
    rationalize,
    residues_recursive,
    to_coefficients,
)

# Absolute slack for clamping tiny negative densities / CDF overshoot that stem
# from rationalizing the poles rather than from rounding.
MODEL_NOISE = 1e-13
# Results smaller than this only need absolute (not relative) accuracy.
_ABS_FLOOR_LOG2 = -64.0


class _DoubleKernel:
    """float64 evaluation of the same mixture; used to expose the precision hazard."""

    def __init__(self, groups, offset=0.0):
        self.groups = [(float(b), np.array([float(c) for c in cs])) for b, cs in groups]
        self.offset = offset

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x >= 0, self.offset, 0.0)
        for b, cs in self.groups:
            side = x >= 0 if b > 0 else x < 0
            xs = x[side]
            acc = np.full(xs.shape, cs[-1])
            for c in cs[-2::-1]:
                acc = acc * xs + c
            out[side] += np.sign(b) * acc * np.exp(-b * xs)
        return out, np.zeros_like(out)


class ClosedFormDistribution:
    """Exponential-polynomial mixture with per-pole coefficient lists.

    ``groups`` is a sequence of ``(beta, alpha, omega)`` where ``alpha`` and
    ``omega`` hold the coefficients of ``x**(j-1)`` for ``j = 1..p``.
    """

    def __init__(self, groups, precision_bits=DEFAULT_PRECISION, double=False):
        self.precision_bits = int(precision_bits)
        self.double = bool(double)
        self.groups = tuple((b, tuple(a), tuple(w)) for b, a, w in groups)
        if not self.groups:
            raise InvalidInput("a distribution needs at least one pole")
        self._pdf_kernel = None
        self._cdf_kernel = None
        self._negated = None

    # ------------------------------------------------------------ construction

    @classmethod
    def from_residues(cls, rt, precision_bits=DEFAULT_PRECISION):
        alpha, omega = to_coefficients(rt, precision_bits)
        groups = []
        with gmpy2.context(gmpy2.get_context(), precision=precision_bits):
            for i, (b, p) in enumerate(rt.system.poles, start=1):
                groups.append(
                    (
                        gmpy2.mpfr(b),
                        [alpha[(i, j)] for j in range(1, p + 1)],
                        [omega[(i, j)] for j in range(1, p + 1)],
                    )
                )
        return cls(groups, precision_bits)

    @classmethod
    def from_spectral(
        cls, sf, m, precision_bits=DEFAULT_PRECISION, max_denominator=DEFAULT_MAX_DENOMINATOR
    ):
        """Full pipeline: pole/zero system, exact residues, coefficient rounding."""
        rt = residues_recursive(rationalize(build_pole_zero(sf, m), max_denominator))
        return cls.from_residues(rt, precision_bits)

    def as_double(self):
        """Same coefficients, but accumulated in float64 with no guard or clamping."""
        return ClosedFormDistribution(self.groups, 53, double=True)

    # ---------------------------------------------------------------- queries

    @property
    def poles(self):
        return [float(b) for b, _, _ in self.groups]

    @property
    def support_signs(self):
        """``(has_positive_part, has_negative_part)``."""
        return (any(b > 0 for b, _, _ in self.groups), any(b < 0 for b, _, _ in self.groups))

    @property
    def total_multiplicity(self):
        return sum(len(a) for _, a, _ in self.groups)

    def max_coefficient_log10(self):
        return max(
            float(gmpy2.log10(abs(c))) for _, a, w in self.groups for c in (*a, *w) if c != 0
        )

    def _kernel(self, which):
        attr = "_pdf_kernel" if which == "pdf" else "_cdf_kernel"
        k = getattr(self, attr)
        if k is None:
            idx = 1 if which == "pdf" else 2
            groups = [(g[0], g[idx]) for g in self.groups]
            offset = 0.0 if which == "pdf" else 1.0
            if self.double:
                k = _DoubleKernel(groups, offset)
            else:
                k = MixtureKernel(groups, self.precision_bits, offset)
            setattr(self, attr, k)
        return k

    def _evaluate(self, which, x):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1)
        out = np.empty(flat.shape)
        fin = np.isfinite(flat)
        if which == "cdf":
            out[~fin] = np.where(flat[~fin] > 0, 1.0, 0.0)
        else:
            out[~fin] = 0.0
        if np.any(np.isnan(flat)):
            raise InvalidInput("cannot evaluate at NaN")
        vals, mag = self._kernel(which).evaluate(flat[fin])
        if not self.double:
            vals = self._guard(which, vals, mag)
        out[fin] = vals
        out = out.reshape(x.shape)
        return float(out) if out.ndim == 0 else out

    def _guard(self, which, vals, mag):
        budget = self.precision_bits - 64
        with np.errstate(divide="ignore"):
            lres = np.maximum(np.log2(np.abs(vals)), _ABS_FLOOR_LOG2)
        lost = mag - lres
        if np.any(lost > budget):
            worst = float(np.max(lost))
            raise PrecisionLoss(
                f"{which}: cancellation of 2^{worst:.0f} exceeds the {self.precision_bits}-bit "
                "budget; raise precision_bits"
            )
        noise = np.exp2(mag - self.precision_bits + 8) + MODEL_NOISE
        low = vals < -noise
        high = (vals > 1 + noise) if which == "cdf" else np.zeros_like(low)
        if np.any(low | high):
            raise PrecisionLoss(f"{which} left its range beyond rounding noise")
        vals = np.maximum(vals, 0.0)
        if which == "cdf":
            vals = np.minimum(vals, 1.0)
        return vals

    def pdf(self, x):
        return self._evaluate("pdf", x)

    def cdf(self, x):
        return self._evaluate("cdf", x)

    def scale(self, c):
        """Distribution of ``c X`` for ``c > 0``."""
        if not c > 0:
            raise InvalidInput("scale factor must be positive")
        with gmpy2.context(gmpy2.get_context(), precision=self.precision_bits):
            cm = gmpy2.mpfr(c) if not self.double else float(c)
            groups = []
            for b, a, w in self.groups:
                groups.append(
                    (
                        b / cm,
                        [aj / cm ** (j + 1) for j, aj in enumerate(a)],
                        [wj / cm**j for j, wj in enumerate(w)],
                    )
                )
        return ClosedFormDistribution(groups, self.precision_bits, self.double)

    def negate(self):
        """Distribution of ``-X``: poles flip sign, alpha_j picks up (-1)**j, omega_j (-1)**(j-1)."""
        groups = [
            (
                -b,
                [aj if j % 2 == 0 else -aj for j, aj in enumerate(a, start=1)],
                [wj if j % 2 == 1 else -wj for j, wj in enumerate(w, start=1)],
            )
            for b, a, w in self.groups
        ]
        return ClosedFormDistribution(groups, self.precision_bits, self.double)

    def survival(self, x):
        """1 - F(x) without cancellation in the right tail."""
        if self._negated is None:
            self._negated = self.negate()
        return self._negated.cdf(-np.asarray(x, dtype=float))

    def moments(self, k):
        """E[X**k] by termwise integration: sum alpha_ij (j+k-1)! / b_i**(j+k)."""
        if k < 0 or int(k) != k:
            raise InvalidInput("moment order must be a non-negative integer")
        with gmpy2.context(gmpy2.get_context(), precision=self.precision_bits):
            total = gmpy2.mpfr(0)
            for b, a, _ in self.groups:
                for j, aj in enumerate(a, start=1):
                    total += aj * math.factorial(j + k - 1) / b ** (j + k)
            return float(total)

    def mean(self):
        return self.moments(1)


def write_grid_csv(dist, xs, fh, header_lines=()):
    """Write ``x, pdf, cdf`` rows with 17 significant digits."""
    xs = np.asarray(xs, dtype=float)
    pdf = np.atleast_1d(dist.pdf(xs))
    cdf = np.atleast_1d(dist.cdf(xs))
    for line in header_lines:
        fh.write(f"# {line}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["x", "pdf", "cdf"])
    for row in zip(xs, pdf, cdf):
        w.writerow([f"{v:.17g}" for v in row])


def grid_csv_text(dist, xs, header_lines=()):
    buf = io.StringIO()
    write_grid_csv(dist, xs, buf, header_lines)
    return buf.getvalue()
