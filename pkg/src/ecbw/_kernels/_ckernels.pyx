# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ecbw._kernels.pykernels.

The arithmetic mirrors the pure-Python backend operation for operation
(same order, same libm calls) so both backends return bit-identical
binary64 values.  Do not enable -ffast-math when building.
"""

from libc.math cimport sin, M_PI


cdef inline double _correction(double x, double a, double b) nogil:
    if x < a:
        return sin(M_PI / 2.0 * (x / a - 1.0)) + b
    return M_PI / 2.0 * (x / a - 1.0) + b


cdef inline double _modified_isr(long presentations, long score,
                                 double a, double b, double c) nogil:
    if presentations == 0:
        return c
    if presentations > 1 and 2 * score < presentations:
        return 0.0
    return _correction(<double>score, a, b) / _correction(<double>presentations, a, b)


def correction(double x, double a, double b):
    return _correction(x, a, b)


def modified_isr(long presentations, long score, double a, double b, double c):
    return _modified_isr(presentations, score, a, b, c)


def modified_fsr(long total_presentations, long total_score,
                 long initial_presentations, double a, double b, double c):
    if initial_presentations == 0:
        return c
    return _correction(<double>total_score, a, b) / _correction(
        <double>total_presentations, a, b)


def isr_weights(presentations, scores, self_mask, double a, double b, double c):
    cdef Py_ssize_t n = len(presentations)
    cdef Py_ssize_t j
    out = []
    for j in range(n):
        if self_mask[j]:
            out.append(0.0)
        else:
            out.append(_modified_isr(<long>presentations[j], <long>scores[j], a, b, c))
    return out


def fsr_weights(total_presentations, total_scores, initial_presentations,
                double a, double b, double c):
    cdef Py_ssize_t n = len(total_presentations)
    cdef Py_ssize_t i
    cdef long te, ts, ie
    out = []
    for i in range(n):
        te = <long>total_presentations[i]
        ts = <long>total_scores[i]
        ie = <long>initial_presentations[i]
        if ie == 0:
            out.append(c)
        else:
            out.append(_correction(<double>ts, a, b) / _correction(<double>te, a, b))
    return out


def roulette_index(weights, double u):
    cdef Py_ssize_t n = len(weights)
    cdef Py_ssize_t i
    cdef double w, total = 0.0, acc = 0.0, target
    cdef Py_ssize_t last = -1
    for i in range(n):
        w = <double>weights[i]
        if w > 0.0:
            total += w
    if total <= 0.0:
        return -1
    target = u * total
    for i in range(n):
        w = <double>weights[i]
        if w <= 0.0:
            continue
        acc += w
        last = i
        if target < acc:
            return i
    return last


def roulette_draws(weights, Py_ssize_t k, uniforms):
    cdef Py_ssize_t d
    cdef long i
    work = list(weights)
    out = []
    for d in range(k):
        i = roulette_index(work, <double>uniforms[d])
        if i < 0:
            break
        out.append(i)
        work[i] = 0.0
    return out
