"""Monte-Carlo oracle for quadratic forms, the confluent form and MRC links.

Random numbers come from numpy's counter-based Philox generator. Samples are
produced in fixed-size chunks; chunk ``c`` of stream ``s`` under seed ``S``
uses the 128-bit Philox key ``(S << 64) | (s << 32) | c``. Substreams are
therefore independent by construction and any whole chunk can be
regenerated without replaying earlier chunks.
"""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import InvalidInput
from .reduction import QuadraticForm, SpectralForm, cholesky

CHUNK = 1 << 16


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    n_samples: int = 100_000
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise InvalidInput("seed must be a 64-bit unsigned integer")
        if not 0 <= self.stream_id < 2**32:
            raise InvalidInput("stream_id must fit in 32 bits")
        if self.n_samples < 1:
            raise InvalidInput("n_samples must be positive")

    def substream(self, k):
        """Derived config for an independent auxiliary stream."""
        return SimConfig(self.seed, self.n_samples, (self.stream_id + 0x9E37 * (k + 1)) % 2**32)


def chunks(cfg):
    """Yield ``(start, size, Generator)`` covering ``cfg.n_samples`` draws."""
    for c, start in enumerate(range(0, cfg.n_samples, CHUNK)):
        key = (cfg.seed << 64) | (cfg.stream_id << 32) | c
        yield start, min(CHUNK, cfg.n_samples - start), np.random.Generator(np.random.Philox(key=key))


def complex_normal(rng, shape):
    """CN(0, 1) by Box-Muller: variance 1/2 per real component, |z|^2 ~ Exp(1)."""
    u1 = 1.0 - rng.random(shape)  # (0, 1]
    u2 = rng.random(shape)
    return np.sqrt(-np.log(u1)) * np.exp(2j * np.pi * u2)


def _fill(cfg, draw):
    out = np.empty(cfg.n_samples)
    for start, size, rng in chunks(cfg):
        out[start : start + size] = draw(rng, size)
    return out


def sample_q(qf: QuadraticForm, cfg: SimConfig):
    """Samples of v^H A v with v = C z + v_bar, C C^H = L, z ~ CN(0, I)."""
    C = cholesky(qf.L)

    def draw(rng, size):
        z = complex_normal(rng, (size, qf.n))
        v = z @ C.T + qf.v_bar
        return np.real(np.einsum("ni,ij,nj->n", v.conj(), qf.A, v))

    return _fill(cfg, draw)


def sample_spectral(sf: SpectralForm, cfg: SimConfig):
    """Samples of sum lam |y + h|^2 with y ~ CN(0, I) and |h|^2 = mu."""
    h = np.sqrt(sf.mu)

    def draw(rng, size):
        y = complex_normal(rng, (size, sf.n))
        return np.abs(y + h) ** 2 @ sf.lam

    return _fill(cfg, draw)


def sample_qm(sf: SpectralForm, m, cfg: SimConfig):
    """Coupled ``(q, qm)`` samples sharing the Gaussian draw ``y``.

    ``qm = sum lam |y + xi h|^2`` with ``xi**2 ~ Gamma(m, 1/m)`` drawn by
    numpy's ``standard_gamma`` (Marsaglia-Tsang) and scaled by ``1/m``.
    """
    if m < 1:
        raise InvalidInput("shape parameter m must be >= 1")
    h = np.sqrt(sf.mu)
    q = np.empty(cfg.n_samples)
    qm = np.empty(cfg.n_samples)
    for start, size, rng in chunks(cfg):
        y = complex_normal(rng, (size, sf.n))
        xi = np.sqrt(rng.standard_gamma(m, (size, sf.n)) / m)
        q[start : start + size] = np.abs(y + h) ** 2 @ sf.lam
        qm[start : start + size] = np.abs(y + xi * h) ** 2 @ sf.lam
    return q, qm


def empirical_mse(sf, m, cfg):
    """Mean of ``(qm - q)**2`` and its standard error."""
    q, qm = sample_qm(sf, m, cfg)
    d2 = (qm - q) ** 2
    return float(d2.mean()), float(d2.std(ddof=1) / np.sqrt(d2.size))


def ks_distance(samples, cdf):
    """Sup-norm distance between the empirical CDF of ``samples`` and ``cdf``."""
    samples = np.asarray(samples, dtype=float)
    if samples.size < 1000:
        raise InvalidInput("ks_distance needs at least 1000 samples")
    return float(stats.kstest(samples, cdf).statistic)


def ks_critical(n, alpha=0.01):
    """Asymptotic one-sample KS critical value (1.63/sqrt(n) at 1 %)."""
    return float(stats.kstwobign.isf(alpha) / np.sqrt(n))


def binomial_se(p, n):
    return float(np.sqrt(p * (1 - p) / n))


def mc_outage(qf, gamma_bars, gamma_th, cfg):
    """Empirical P(gamma_bar * Q < gamma_th) for every ``gamma_bar``."""
    q = np.sort(sample_q(qf, cfg))
    gb = np.atleast_1d(np.asarray(gamma_bars, dtype=float))
    p = np.searchsorted(q, gamma_th / gb, side="left") / q.size
    return p, np.sqrt(p * (1 - p) / q.size)


def _gray(l):
    return l ^ (l >> 1)


def _pam_detect(y, L, d):
    """Nearest-level index for levels (2l - L + 1) d, l = 0..L-1."""
    idx = np.rint((y / d + L - 1) / 2)
    return np.clip(idx, 0, L - 1).astype(np.int64)


def _popcount(a):
    a = a.astype(np.int64)
    c = np.zeros_like(a)
    while np.any(a):
        c += a & 1
        a >>= 1
    return c


def simulate_mrc_ber(qf, M, gamma_bars, cfg):
    """Symbol-level BER of Gray-coded square M-QAM over the MRC-equivalent channel.

    One channel draw ``g`` and one symbol per trial; the combiner output is
    ``sqrt(gamma_bar g^H g) x + n`` with ``E|x|^2 = 1`` and ``n ~ CN(0, 1)``.
    Returns ``(ber, se)`` arrays over ``gamma_bars``; the standard error uses
    the per-symbol bit-error fraction.
    """
    L = int(round(np.sqrt(M)))
    if L * L != M or L < 2 or L & (L - 1):
        raise InvalidInput(f"M={M} is not a square power-of-four QAM order")
    bits = 2 * int(np.log2(L))
    d = np.sqrt(3.0 / (2.0 * (M - 1)))
    gb = np.atleast_1d(np.asarray(gamma_bars, dtype=float))
    C = cholesky(qf.L)
    acc = np.zeros(gb.size)
    acc2 = np.zeros(gb.size)
    for _, size, rng in chunks(cfg):
        z = complex_normal(rng, (size, qf.n))
        g = z @ C.T + qf.v_bar
        snr = np.real(np.einsum("ni,ij,nj->n", g.conj(), qf.A, g))
        li = rng.integers(0, L, size)
        lq = rng.integers(0, L, size)
        x = ((2 * li - L + 1) + 1j * (2 * lq - L + 1)) * d
        noise = complex_normal(rng, (gb.size, size))
        for k, gamma_bar in enumerate(gb):
            y = x + noise[k] / np.sqrt(gamma_bar * snr)
            ei = _popcount(_gray(li) ^ _gray(_pam_detect(y.real, L, d)))
            eq = _popcount(_gray(lq) ^ _gray(_pam_detect(y.imag, L, d)))
            frac = (ei + eq) / bits
            acc[k] += frac.sum()
            acc2[k] += (frac**2).sum()
    n = cfg.n_samples
    mean = acc / n
    var = (acc2 / n - mean**2) * n / max(n - 1, 1)
    return mean, np.sqrt(np.maximum(var, 0) / n)


def mc_expectation(samples, fn):
    """Mean of ``fn(samples)`` with its standard error (bounded ``fn``)."""
    v = np.asarray(fn(np.asarray(samples, dtype=float)), dtype=float)
    return float(v.mean()), float(v.std(ddof=1) / np.sqrt(v.size))
