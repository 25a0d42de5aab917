# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""MPFR evaluation of exponential-polynomial mixtures.

For each x the kernel returns

    offset + sum_{b > 0} exp(-b x) sum_j c_j x**(j-1)      (x >= 0)
           - sum_{b < 0} exp(-b x) sum_j c_j x**(j-1)      (x <  0)

rounded to double, together with log2 of the largest single term, which the
caller compares with the result to detect cancellation beyond the precision.
"""

from libc.stdlib cimport malloc, free
from libc.math cimport log2, fabs, INFINITY, M_LOG2E

import numpy as np
cimport numpy as cnp

import gmpy2

cnp.import_array()

cdef extern from "mpfr.h":
    ctypedef struct __mpfr_struct:
        pass
    ctypedef __mpfr_struct *mpfr_ptr
    ctypedef const __mpfr_struct *mpfr_srcptr
    ctypedef long mpfr_prec_t
    ctypedef enum mpfr_rnd_t:
        MPFR_RNDN
    void mpfr_init2(mpfr_ptr, mpfr_prec_t)
    void mpfr_clear(mpfr_ptr)
    int mpfr_set(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_set_d(mpfr_ptr, double, mpfr_rnd_t)
    int mpfr_set_si(mpfr_ptr, long, mpfr_rnd_t)
    int mpfr_set_str(mpfr_ptr, const char *, int, mpfr_rnd_t)
    int mpfr_mul_2si(mpfr_ptr, mpfr_srcptr, long, mpfr_rnd_t)
    int mpfr_fma(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_mul(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_mul_d(mpfr_ptr, mpfr_srcptr, double, mpfr_rnd_t)
    int mpfr_exp(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_add(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_sub(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    double mpfr_get_d(mpfr_srcptr, mpfr_rnd_t)
    double mpfr_get_d_2exp(long *, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_zero_p(mpfr_srcptr)


cdef double _log2_abs(mpfr_srcptr v):
    cdef long e
    cdef double d
    if mpfr_zero_p(v):
        return -INFINITY
    d = mpfr_get_d_2exp(&e, v, MPFR_RNDN)
    return log2(fabs(d)) + e


cdef void _load(mpfr_ptr dst, value):
    man, exp = gmpy2.mpfr(value).as_mantissa_exp()
    text = gmpy2.digits(man, 16).encode("ascii")
    mpfr_set_str(dst, text, 16, MPFR_RNDN)
    mpfr_mul_2si(dst, dst, int(exp), MPFR_RNDN)


cdef class MixtureKernel:
    cdef int n_groups
    cdef int *sizes
    cdef int *starts
    cdef int *signs
    cdef __mpfr_struct *betas
    cdef __mpfr_struct *coefs
    cdef double *log2c
    cdef double *beta_d
    cdef long prec
    cdef double offset
    cdef int total

    def __cinit__(self, groups, long precision_bits, double offset=0.0):
        cdef int g, j, k
        self.n_groups = len(groups)
        self.prec = precision_bits
        self.offset = offset
        self.total = sum(len(c) for _, c in groups)
        self.sizes = <int *> malloc(self.n_groups * sizeof(int))
        self.starts = <int *> malloc(self.n_groups * sizeof(int))
        self.signs = <int *> malloc(self.n_groups * sizeof(int))
        self.beta_d = <double *> malloc(self.n_groups * sizeof(double))
        self.betas = <__mpfr_struct *> malloc(self.n_groups * sizeof(__mpfr_struct))
        self.coefs = <__mpfr_struct *> malloc(max(self.total, 1) * sizeof(__mpfr_struct))
        self.log2c = <double *> malloc(max(self.total, 1) * sizeof(double))
        with gmpy2.context(gmpy2.get_context(), precision=precision_bits):
            k = 0
            for g, (beta, coeffs) in enumerate(groups):
                mpfr_init2(&self.betas[g], precision_bits)
                _load(&self.betas[g], beta)
                self.beta_d[g] = float(beta)
                self.signs[g] = 1 if self.beta_d[g] > 0 else -1
                self.sizes[g] = len(coeffs)
                self.starts[g] = k
                for j in range(len(coeffs)):
                    mpfr_init2(&self.coefs[k], precision_bits)
                    _load(&self.coefs[k], coeffs[j])
                    self.log2c[k] = _log2_abs(&self.coefs[k])
                    k += 1

    def __dealloc__(self):
        cdef int i
        if self.betas != NULL:
            for i in range(self.n_groups):
                mpfr_clear(&self.betas[i])
        if self.coefs != NULL:
            for i in range(self.total):
                mpfr_clear(&self.coefs[i])
        free(self.sizes); free(self.starts); free(self.signs); free(self.beta_d)
        free(self.betas); free(self.coefs); free(self.log2c)

    def evaluate(self, x):
        """Return ``(values, log2_max_term)`` for a 1-D float64 array ``x``."""
        cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = np.ascontiguousarray(x, dtype=np.float64)
        cdef Py_ssize_t n = xs.shape[0], k
        cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
        cdef cnp.ndarray[cnp.float64_t, ndim=1] mag = np.empty(n, dtype=np.float64)
        cdef __mpfr_struct xm, acc, tmp, val
        cdef int g, j, s0, p, side
        cdef double xv, lx, lmax, lexp, lt
        mpfr_init2(&xm, self.prec)
        mpfr_init2(&acc, self.prec)
        mpfr_init2(&tmp, self.prec)
        mpfr_init2(&val, self.prec)
        for k in range(n):
            xv = xs[k]
            side = 1 if xv >= 0 else -1
            mpfr_set_d(&xm, xv, MPFR_RNDN)
            lmax = -INFINITY
            if side > 0 and self.offset != 0:
                mpfr_set_d(&val, self.offset, MPFR_RNDN)
                lmax = log2(fabs(self.offset))
            else:
                mpfr_set_si(&val, 0, MPFR_RNDN)
            lx = log2(fabs(xv)) if xv != 0 else -INFINITY
            for g in range(self.n_groups):
                if self.signs[g] != side:
                    continue
                s0 = self.starts[g]
                p = self.sizes[g]
                mpfr_set(&acc, &self.coefs[s0 + p - 1], MPFR_RNDN)
                for j in range(p - 2, -1, -1):
                    mpfr_mul(&acc, &acc, &xm, MPFR_RNDN)
                    mpfr_add(&acc, &acc, &self.coefs[s0 + j], MPFR_RNDN)
                mpfr_mul_d(&tmp, &self.betas[g], -xv, MPFR_RNDN)
                lexp = mpfr_get_d(&tmp, MPFR_RNDN) * M_LOG2E
                mpfr_exp(&tmp, &tmp, MPFR_RNDN)
                mpfr_mul(&acc, &acc, &tmp, MPFR_RNDN)
                if side > 0:
                    mpfr_add(&val, &val, &acc, MPFR_RNDN)
                else:
                    mpfr_sub(&val, &val, &acc, MPFR_RNDN)
                for j in range(p):
                    if j > 0 and xv == 0:
                        break
                    lt = self.log2c[s0 + j] + (j * lx if j > 0 else 0.0) + lexp
                    if lt > lmax:
                        lmax = lt
            out[k] = mpfr_get_d(&val, MPFR_RNDN)
            mag[k] = lmax
        mpfr_clear(&xm)
        mpfr_clear(&acc)
        mpfr_clear(&tmp)
        mpfr_clear(&val)
        return out, mag
