"""Pure-Python versions of the compiled kernels, used when the extension is absent."""
from __future__ import annotations

import math

import numpy as np

PIVMIN = 1e-300


def _clamp(q: float) -> float:
    return -PIVMIN if abs(q) < PIVMIN else q


def sturm_count(diag, off, lam: float) -> int:
    """Number of eigenvalues of the symmetric tridiagonal matrix below lam."""
    d = [float(v) for v in diag]
    e2 = [float(v) ** 2 for v in off]
    q = _clamp(d[0] - lam)
    neg = int(q < 0)
    for i in range(1, len(d)):
        q = _clamp(d[i] - lam - e2[i - 1] / q)
        neg += q < 0
    return neg


def cyclic_count(diag, off, corner: float, lam: float) -> int:
    """Eigenvalues below lam for the tridiagonal matrix with a corner coupling."""
    d = [float(v) for v in diag]
    e = [float(v) for v in off]
    n = len(d)
    q = _clamp(d[0] - lam)
    neg = int(q < 0)
    z = corner
    acc = z * z / q
    for i in range(1, n - 1):
        w = e[i] if i == n - 2 else 0.0
        z = w - e[i - 1] * z / q
        q = _clamp(d[i] - lam - e[i - 1] * e[i - 1] / q)
        neg += q < 0
        acc += z * z / q
    q = _clamp(d[n - 1] - lam - acc)
    return neg + (q < 0)


def bisect_lowest(diag, off, corner: float, cyclic: bool, count: int,
                  lo: float, hi: float, tol: float) -> np.ndarray:
    """Lowest `count` eigenvalues by bisection on the inertia count."""
    out = np.empty(count)
    for k in range(count):
        a, b = lo, hi
        it = 0
        while b - a > tol * (1.0 + abs(a) + abs(b)) and it < 200:
            mid = 0.5 * (a + b)
            c = cyclic_count(diag, off, corner, mid) if cyclic else sturm_count(diag, off, mid)
            if c > k:
                b = mid
            else:
                a = mid
            it += 1
        out[k] = 0.5 * (a + b)
    return out


def ellipj_array(x, m: float):
    """sn, cn, dn and amplitude at every x for parameter m in [0, 1]."""
    x = np.asarray(x, dtype=float)
    if m == 1.0:
        c = 1.0 / np.cosh(x)
        return np.tanh(x), c, c.copy(), np.arctan(np.sinh(x))
    a = [1.0]
    c = [math.sqrt(m)]
    b = math.sqrt(1.0 - m)
    while abs(c[-1]) > 1e-16 * a[-1] and len(a) < 39:
        an, cn = 0.5 * (a[-1] + b), 0.5 * (a[-1] - b)
        b = math.sqrt(a[-1] * b)
        a.append(an)
        c.append(cn)
    N = len(a) - 1
    phi = np.ldexp(a[N] * x, N)
    for j in range(N, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c[j] / a[j] * np.sin(phi)))
    s, co = np.sin(phi), np.cos(phi)
    return s, co, np.sqrt(co * co + (1.0 - m) * s * s), phi
