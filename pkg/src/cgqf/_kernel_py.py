"""Pure-Python (gmpy2) twin of the compiled mixture kernel in ``_kernel.pyx``."""

import math

import gmpy2
import numpy as np


class MixtureKernel:
    def __init__(self, groups, precision_bits, offset=0.0):
        self.precision_bits = int(precision_bits)
        self.offset = float(offset)
        self._ctx = gmpy2.context(gmpy2.get_context(), precision=self.precision_bits)
        with gmpy2.context(self._ctx):
            self.groups = []
            for beta, coeffs in groups:
                b = gmpy2.mpfr(beta)
                cs = [gmpy2.mpfr(c) for c in coeffs]
                log2c = np.array(
                    [float(gmpy2.log2(abs(c))) if c != 0 else -np.inf for c in cs]
                )
                self.groups.append((b, float(b), cs[::-1], log2c))

    def evaluate(self, x):
        xs = np.ascontiguousarray(x, dtype=np.float64)
        out = np.empty(xs.shape[0])
        mag = np.empty(xs.shape[0])
        with gmpy2.context(self._ctx):
            for k, xv in enumerate(xs):
                side = 1 if xv >= 0 else -1
                xm = gmpy2.mpfr(xv)
                if side > 0 and self.offset != 0:
                    val = gmpy2.mpfr(self.offset)
                    lmax = math.log2(abs(self.offset))
                else:
                    val = gmpy2.mpfr(0)
                    lmax = -np.inf
                lx = math.log2(abs(xv)) if xv != 0 else -np.inf
                for b, bd, rev, log2c in self.groups:
                    if (bd > 0) != (side > 0):
                        continue
                    acc = rev[0]
                    for c in rev[1:]:
                        acc = acc * xm + c
                    e = b * -xv
                    lexp = float(e) * math.log2(math.e)
                    acc = acc * gmpy2.exp(e)
                    val = val + acc if side > 0 else val - acc
                    if xv == 0:
                        lt = log2c[0] + lexp
                    else:
                        lt = float(np.max(log2c + lx * np.arange(log2c.size))) + lexp
                    lmax = max(lmax, lt)
                out[k] = float(val)
                mag[k] = lmax
        return out, mag
