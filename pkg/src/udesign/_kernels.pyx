# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: pair sums, optimizer objective/gradient, monomial traces.

Large Gram matrices are formed by BLAS; the power reductions stay compiled.

Summations use Neumaier compensation in a fixed index order, so results are
reproducible bit-for-bit across runs.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline double _abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double _ipow(double x, int t) nogil:
    cdef double r = 1.0
    while t > 0:
        if t & 1:
            r *= x
        x *= x
        t >>= 1
    return r


cdef inline void _neumaier(double *s, double *c, double x) nogil:
    cdef double tot = s[0] + x
    if (s[0] if s[0] >= 0 else -s[0]) >= (x if x >= 0 else -x):
        c[0] += (s[0] - tot) + x
    else:
        c[0] += (x - tot) + s[0]
    s[0] = tot


cdef inline void _gram_entry(const double *a, const double *b, Py_ssize_t n, double *re, double *im) nogil:
    # <a, b> for interleaved (re, im) arrays of length n
    cdef Py_ssize_t i
    cdef double r = 0.0, s = 0.0
    for i in range(n):
        r += a[2 * i] * b[2 * i] + a[2 * i + 1] * b[2 * i + 1]
        s += a[2 * i] * b[2 * i + 1] - a[2 * i + 1] * b[2 * i]
    re[0] = r
    im[0] = s


# above this many rows the Gram matrix comes from BLAS and only the reduction is compiled
BLAS_ROWS = 48


cdef void _gram_power_rows(const double[:, ::1] g, Py_ssize_t K, int t, double *s, double *c) nogil:
    # upper-triangle reduction of |g|^(2t) for an interleaved (re, im) Gram matrix
    cdef Py_ssize_t k, l
    cdef double row, re, im
    for k in range(K):
        row = 0.0
        for l in range(k + 1, K):
            re = g[k, 2 * l]
            im = g[k, 2 * l + 1]
            row += _ipow(re * re + im * im, t)
        re = g[k, 2 * k]
        _neumaier(s, c, 2.0 * row + _ipow(re * re, t))


def pair_power_sum(vecs, int t):
    arr = np.ascontiguousarray(vecs, dtype=np.complex128)
    cdef Py_ssize_t K = arr.shape[0], n = arr.shape[1]
    cdef Py_ssize_t k, l
    cdef double re, im, row
    cdef double s = 0.0, c = 0.0
    cdef const double[:, ::1] v
    cdef const double[:, ::1] g
    if K == 0:
        return 0.0
    if K > BLAS_ROWS:
        g = np.ascontiguousarray(arr.conj() @ arr.T).view(np.float64)
        with nogil:
            _gram_power_rows(g, K, t, &s, &c)
        return s + c
    v = arr.view(np.float64)
    with nogil:
        for k in range(K):
            row = 0.0
            for l in range(k + 1, K):
                _gram_entry(&v[k, 0], &v[l, 0], n, &re, &im)
                row += _ipow(re * re + im * im, t)
            _gram_entry(&v[k, 0], &v[k, 0], n, &re, &im)
            _neumaier(&s, &c, 2.0 * row + _ipow(re * re, t))
    return s + c


def power_sum(values, int t):
    cdef const double[::1] z = np.ascontiguousarray(values, dtype=np.complex128).ravel().view(np.float64)
    cdef Py_ssize_t k, j, N = z.shape[0] // 2
    cdef double s = 0.0, c = 0.0, block
    with nogil:
        k = 0
        while k < N:
            block = 0.0
            for j in range(k, min(k + 256, N)):
                block += _ipow(z[2 * j] * z[2 * j] + z[2 * j + 1] * z[2 * j + 1], t)
            _neumaier(&s, &c, block)
            k += 256
    return s + c


def potential_and_gradient(mats, int t):
    cdef cnp.ndarray arr = np.ascontiguousarray(mats, dtype=np.complex128)
    cdef Py_ssize_t K = arr.shape[0], d = arr.shape[1]
    cdef Py_ssize_t n = d * d
    flat = arr.reshape(K, n)
    cdef const double[:, ::1] u = flat.view(np.float64)
    cdef cnp.ndarray out
    cdef double[:, ::1] grad
    cdef double[:, ::1] gre = np.empty((K, K), dtype=np.float64)
    cdef double[:, ::1] gim = np.empty((K, K), dtype=np.float64)
    cdef double[:, ::1] g
    cdef double[:, ::1] wts
    cdef Py_ssize_t k, l, i
    cdef double re, im, a2, wr, wi, row, s = 0.0, c = 0.0
    cdef double scale = 2.0 * t / (<double> K * K)
    if K > BLAS_ROWS:
        gram = np.ascontiguousarray(flat.conj() @ flat.T)
        weights = np.empty((K, K), dtype=np.complex128)
        g = gram.view(np.float64)
        wts = weights.view(np.float64)
        with nogil:
            _gram_power_rows(g, K, t, &s, &c)
            for k in range(K):
                for l in range(K):
                    re = g[k, 2 * l]
                    im = g[k, 2 * l + 1]
                    a2 = scale * _ipow(re * re + im * im, t - 1)
                    wts[k, 2 * l] = a2 * re
                    wts[k, 2 * l + 1] = -a2 * im
        return (s + c) / (<double> K * K), (weights @ flat).reshape(K, d, d)
    out = np.zeros((K, n), dtype=np.complex128)
    grad = out.view(np.float64)
    with nogil:
        for k in range(K):
            row = 0.0
            for l in range(k, K):
                _gram_entry(&u[k, 0], &u[l, 0], n, &re, &im)
                gre[k, l] = re
                gim[k, l] = im
                gre[l, k] = re
                gim[l, k] = -im
                if l != k:
                    row += _ipow(re * re + im * im, t)
            _neumaier(&s, &c, 2.0 * row + _ipow(gre[k, k] * gre[k, k] + gim[k, k] * gim[k, k], t))
        for k in range(K):
            for l in range(K):
                re = gre[k, l]
                im = gim[k, l]
                a2 = scale * _ipow(re * re + im * im, t - 1)
                # w = a2 * conj(g)
                wr = a2 * re
                wi = -a2 * im
                for i in range(n):
                    grad[k, 2 * i] += wr * u[l, 2 * i] - wi * u[l, 2 * i + 1]
                    grad[k, 2 * i + 1] += wr * u[l, 2 * i + 1] + wi * u[l, 2 * i]
    return (s + c) / (<double> K * K), out.reshape(K, d, d)


def monomial_traces(perms, phases, mat):
    cdef const long long[:, ::1] pm = np.ascontiguousarray(perms, dtype=np.int64)
    cdef const double complex[:, ::1] ph = np.ascontiguousarray(phases, dtype=np.complex128)
    cdef const double complex[:, ::1] m = np.ascontiguousarray(mat, dtype=np.complex128)
    cdef Py_ssize_t N = pm.shape[0], D = pm.shape[1]
    cdef cnp.ndarray out = np.empty(N, dtype=np.complex128)
    cdef double complex[::1] res = out
    cdef Py_ssize_t v, x
    cdef double complex acc
    with nogil:
        for v in range(N):
            acc = 0
            for x in range(D):
                acc = acc + ph[v, x] * m[x, pm[v, x]]
            res[v] = acc
    return out
