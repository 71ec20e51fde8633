# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loop: weighted complex-exponential sums along a linear phase ramp.

Single scalar pass with Kahan-compensated accumulation; the pure-python
twin lives in ``_speedups_py`` and must return the same values to 1e-12.
"""

from libc.math cimport cos, sin


def phase_weighted_sum(const double[::1] weights, double theta0, double dtheta):
    """Return sum_j weights[j] * exp(i*(theta0 + j*dtheta)) as a complex."""
    cdef Py_ssize_t j, n = weights.shape[0]
    cdef double re = 0.0, im = 0.0
    cdef double cre = 0.0, cim = 0.0
    cdef double th, w, term, y, t
    for j in range(n):
        th = theta0 + dtheta * j
        w = weights[j]
        term = w * cos(th) - cre
        t = re + term
        cre = (t - re) - term
        re = t
        term = w * sin(th) - cim
        t = im + term
        cim = (t - im) - term
        im = t
    return complex(re, im)
