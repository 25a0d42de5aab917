"""Self-contained invariant suite behind ``cgqf validate``.

Every check compares a production path with an independent oracle. The
``fault`` argument corrupts one intermediate on purpose so that the suite can
demonstrate it notices.
"""

import math
import random
import time
from dataclasses import dataclass

import numpy as np
from gmpy2 import mpq

from . import montecarlo as mc
from .confluent import mse
from .distribution import ClosedFormDistribution
from .kernels import BACKEND, MixtureKernel, PythonMixtureKernel
from .mrc import MrcScenario, ber, qam_weights
from .oracles import eval_r, random_rational_system, residues_bruteforce
from .reduction import SpectralForm
from .residues import reconstruct, residues_closed_form, residues_recursive
from .specfun import gauss_2f1, log_gamma, nakagami_mean, q_function

FAULTS = ("residue",)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


def random_spectral_form(rng, n_max=6, mixed=True):
    """Random (lam, mu) with well separated |lam| in [0.2, 3] and mu in [0, 8]."""
    n = int(rng.integers(1, n_max + 1))
    while True:
        mag = rng.uniform(0.2, 3.0, n)
        if n == 1 or np.min(np.diff(np.sort(mag))) > 0.05:
            break
    sign = rng.choice([-1.0, 1.0], n) if mixed else np.ones(n)
    return SpectralForm(mag * sign, rng.uniform(0.0, 8.0, n))


def check_residues(n_systems, seed, fault=None):
    rng = random.Random(seed)
    mismatches = recon_fail = 0
    for k in range(n_systems):
        rpz = random_rational_system(rng)
        rec = residues_recursive(rpz)
        A, C = residues_bruteforce(rpz)
        cf = residues_closed_form(rpz)
        if not (rec.A == A == cf.A and rec.C == C == cf.C):
            mismatches += 1
        if fault == "residue" and k == 0:
            key = next(iter(rec.A))
            rec.A[key] = rec.A[key] + mpq(1, 10**6)
        for _ in range(10):
            s = mpq(rng.randint(-400, 400) * 2 + 1, rng.randint(1, 9))
            if s == 0 or any(s == -b for b, _ in rpz.poles):
                continue
            ra, rc = reconstruct(rec, s)
            r = eval_r(rpz, s)
            if ra != r or rc != r / s:
                recon_fail += 1
                break
    return [
        CheckResult("residue oracles", mismatches == 0,
                    f"{n_systems} systems, {mismatches} mismatches (recursive/closed form/brute force)"),
        CheckResult("reconstruction identity", recon_fail == 0,
                    f"{n_systems} tables, {recon_fail} failures at exact rational points"),
    ]


def check_kernels():
    d = ClosedFormDistribution.from_spectral(SpectralForm([2.0, -0.7, 1.1], [1.5, 2.0, 0.3]), 12)
    x = np.linspace(-6, 25, 301)
    groups = [(b, w) for b, _, w in d.groups]
    a = MixtureKernel(groups, d.precision_bits, 1.0).evaluate(x)
    b = PythonMixtureKernel(groups, d.precision_bits, 1.0).evaluate(x)
    same = np.array_equal(a[0], b[0]) and np.allclose(a[1], b[1], rtol=0, atol=1e-9)
    return CheckResult("kernel backends", same, f"{BACKEND} vs python, 301 points bit-identical={same}")


def check_distributions(n_forms, ms, seed):
    rng = np.random.default_rng(seed)
    worst = [0.0, 0.0, 0.0]
    for _ in range(n_forms):
        sf = random_spectral_form(rng)
        for m in ms:
            d = ClosedFormDistribution.from_spectral(sf, m)
            worst[0] = max(worst[0], abs(d.moments(0) - 1))
            # Erlang-like groups of order p keep mass out to about (p + 8 sqrt(p) + 40) / |beta|
            X = max((len(a) + 40 + 8 * math.sqrt(len(a))) / abs(float(b)) for b, a, _ in d.groups)
            lim = max(abs(d.cdf(-X)), abs(d.cdf(X) - 1))
            worst[1] = max(worst[1], lim)
            worst[2] = max(worst[2], abs(d.mean() - sf.mean()) / max(abs(sf.mean()), 1e-300))
    ok = worst[0] <= 1e-6 and worst[1] <= 1e-8 and worst[2] <= 1e-8
    return CheckResult(
        "distribution sanity", ok,
        f"{n_forms} forms x m={list(ms)}: |mass-1|<={worst[0]:.1e}, limits<={worst[1]:.1e}, "
        f"mean rel<={worst[2]:.1e}",
    )


def check_confluent_ks(n, seed):
    sf = SpectralForm([1.6, 0.9, -0.5], [3.0, 1.0, 2.0])
    m = 20
    d = ClosedFormDistribution.from_spectral(sf, m)
    _, qm = mc.sample_qm(sf, m, mc.SimConfig(seed, n))
    ks = mc.ks_distance(qm, d.cdf)
    crit = mc.ks_critical(n)
    return CheckResult("confluent CDF vs MC of Q_m", ks < crit, f"KS={ks:.4f} < {crit:.4f} at N={n}")


def check_mse(n, seed):
    sf = SpectralForm([1.6, 0.9, -0.5], [3.0, 1.0, 2.0])
    zs = []
    for m in (1, 10, 40):
        e, se = mc.empirical_mse(sf, m, mc.SimConfig(seed, n, m))
        zs.append((e - mse(sf, m)) / se)
    ok = max(abs(z) for z in zs) < 4
    return CheckResult("MSE formula vs coupled MC", ok, "z=" + ", ".join(f"{z:+.2f}" for z in zs))


def check_specfun():
    errs = [
        abs(gauss_2f1(0.5, 1.0, 1.5, -1.0) - math.pi / 4),
        abs(gauss_2f1(0.5, 1.5, 1.5, -4.0) - 5**-0.5),
        abs(q_function(3.0) - 1.3498980316300946e-3) / 1.35e-3,
        abs(nakagami_mean(1.0) - math.sqrt(math.pi) / 2),
        abs(log_gamma(1.5) - math.log(math.sqrt(math.pi) / 2)),
    ]
    return CheckResult("special functions", max(errs) < 1e-12, f"max err {max(errs):.1e}")


def check_ber():
    rows = []
    for g in (0.5, 5.0, 50.0):
        exact = 0.5 * (1 - math.sqrt(g / (2 + g)))
        rows.append(abs(ber(MrcScenario(k=[0.0], rho=0.0, M=4, m=1), g) - exact))
    zero = [abs(ber(MrcScenario(k=[1.0, 0.5], rho=0.5, M=M, m=10), 1e-8) - 0.5) for M in (4, 16, 64)]
    weights = all(sum(qam_weights(M).w) * math.isqrt(M) == 1 for M in (4, 16, 64, 256))
    ok = max(rows) < 1e-10 and max(zero) < 1e-3 and weights
    return CheckResult("BER closed forms", ok,
                       f"Rayleigh err {max(rows):.1e}, zero-SNR err {max(zero):.1e}, P_b(0)=1/2: {weights}")


def _timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    dt = time.perf_counter() - t
    out = out if isinstance(out, list) else [out]
    for r in out:
        r.seconds = dt / len(out)
    return out


def run_validation(quick=False, fault=None, seed=20170501):
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; choose from {FAULTS}")
    n_sys = 10 if quick else 50
    results = []
    results += _timed(check_residues, n_sys, seed, fault)
    results += _timed(check_kernels)
    results += _timed(check_distributions, 3 if quick else 10, (10, 40), seed)
    results += _timed(check_confluent_ks, 20_000 if quick else 100_000, seed)
    results += _timed(check_mse, 100_000 if quick else 1_000_000, seed)
    results += _timed(check_specfun)
    results += _timed(check_ber)
    return results
