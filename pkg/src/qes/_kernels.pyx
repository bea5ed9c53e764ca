# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: Sturm/inertia counts, bisection, vectorized sn/cn/dn."""
import numpy as np
from libc.math cimport sin, cos, sqrt, tanh, cosh, atan, atan2, sinh, fabs, floor

cdef double PIVMIN = 1e-300


cdef Py_ssize_t _count_tri(const double[:] d, const double[:] e2, double lam) noexcept nogil:
    cdef Py_ssize_t n = d.shape[0], i, neg = 0
    cdef double q = d[0] - lam
    if fabs(q) < PIVMIN:
        q = -PIVMIN
    if q < 0:
        neg += 1
    for i in range(1, n):
        q = d[i] - lam - e2[i - 1] / q
        if fabs(q) < PIVMIN:
            q = -PIVMIN
        if q < 0:
            neg += 1
    return neg


cdef Py_ssize_t _count_cyc(const double[:] d, const double[:] e, double corner,
                           double lam) noexcept nogil:
    # LDL^T of the leading (N-1) block plus the Schur complement of the last row
    cdef Py_ssize_t n = d.shape[0], i, neg = 0
    cdef double q, z, acc, w
    q = d[0] - lam
    if fabs(q) < PIVMIN:
        q = -PIVMIN
    if q < 0:
        neg += 1
    z = corner
    acc = z * z / q
    for i in range(1, n - 1):
        w = e[i] if i == n - 2 else 0.0
        z = w - e[i - 1] * z / q
        q = d[i] - lam - e[i - 1] * e[i - 1] / q
        if fabs(q) < PIVMIN:
            q = -PIVMIN
        if q < 0:
            neg += 1
        acc += z * z / q
    q = d[n - 1] - lam - acc
    if fabs(q) < PIVMIN:
        q = -PIVMIN
    if q < 0:
        neg += 1
    return neg


def sturm_count(double[:] diag, double[:] off, double lam):
    """Number of eigenvalues of the symmetric tridiagonal matrix below lam."""
    e2 = np.asarray(off) ** 2
    cdef double[:] e2v = e2
    return _count_tri(diag, e2v, lam)


def cyclic_count(double[:] diag, double[:] off, double corner, double lam):
    """Eigenvalues below lam for the tridiagonal matrix with a corner coupling."""
    return _count_cyc(diag, off, corner, lam)


def bisect_lowest(double[:] diag, double[:] off, double corner, bint cyclic,
                  Py_ssize_t count, double lo, double hi, double tol):
    """Lowest `count` eigenvalues by bisection on the inertia count."""
    cdef Py_ssize_t k, c, it
    cdef double a, b, mid
    e2 = np.asarray(off) ** 2
    cdef double[:] e2v = e2
    out = np.empty(count)
    cdef double[:] ov = out
    with nogil:
        for k in range(count):
            a = lo
            b = hi
            it = 0
            while b - a > tol * (1.0 + fabs(a) + fabs(b)) and it < 200:
                mid = 0.5 * (a + b)
                if cyclic:
                    c = _count_cyc(diag, off, corner, mid)
                else:
                    c = _count_tri(diag, e2v, mid)
                if c > k:
                    b = mid
                else:
                    a = mid
                it += 1
            ov[k] = 0.5 * (a + b)
    return out


def ellipj_array(double[:] x, double m):
    """sn, cn, dn and amplitude at every x for parameter m in [0, 1].

    Descending Landen transformation: one sin/cos per point, then the
    recurrence back up in rational steps; the amplitude is atan2(sn, cn)
    unwrapped against pi x / (2K), from which it deviates by less than pi/2.
    """
    cdef Py_ssize_t n = x.shape[0], i, j, L = 0
    cdef double em[40]
    cdef double en[40]
    cdef double emc, a, b, c, d, u, s, co, sc, ph, quarter, base, PI = 3.141592653589793
    sn = np.empty(n)
    cnv = np.empty(n)
    dn = np.empty(n)
    am = np.empty(n)
    cdef double[:] S = sn, C = cnv, D = dn, P = am
    if m == 1.0:
        for i in range(n):
            u = x[i]
            S[i] = tanh(u)
            C[i] = 1.0 / cosh(u)
            D[i] = C[i]
            P[i] = atan(sinh(u))
        return sn, cnv, dn, am
    if m == 0.0:
        for i in range(n):
            S[i] = sin(x[i])
            C[i] = cos(x[i])
            D[i] = 1.0
            P[i] = x[i]
        return sn, cnv, dn, am
    emc = 1.0 - m
    a = 1.0
    for j in range(38):
        em[j] = a
        emc = sqrt(emc)
        en[j] = emc
        c = 0.5 * (a + emc)
        L = j
        if fabs(a - emc) <= 1e-15 * a:
            break
        emc *= a
        a = c
    quarter = PI / (2.0 * c)  # complete K
    with nogil:
        for i in range(n):
            u = c * x[i]
            s = sin(u)
            co = cos(u)
            d = 1.0
            if fabs(s) < 1e-100:
                # cn/sn would overflow below; to double precision sn = sin(c x)/c here
                s = s / c
            else:
                a = co / s
                sc = c * a
                for j in range(L, -1, -1):
                    b = em[j]
                    a *= sc
                    sc *= d
                    d = (en[j] + a) / (b + a)
                    a = sc / b
                a = 1.0 / sqrt(sc * sc + 1.0)
                s = a if s >= 0.0 else -a
                co = sc * s
            S[i] = s
            C[i] = co
            D[i] = d
            base = PI * x[i] / (2.0 * quarter)
            ph = atan2(s, co)
            P[i] = ph + 2.0 * PI * floor((base - ph) / (2.0 * PI) + 0.5)
    return sn, cnv, dn, am
