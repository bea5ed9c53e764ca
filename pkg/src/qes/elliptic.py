"""Complete elliptic integral K, Jacobian elliptic functions and Jacobi polynomials.

Everything is parameterized by m = k^2.  The Jacobian functions use the
descending Landen (AGM phase) recursion, implemented in the kernel backend.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .kernels import ellipj_array


@dataclass(frozen=True)
class EllipticTriple:
    sn: float
    cn: float
    dn: float


def complete_K(m: float) -> float:
    """K(m) = pi / (2 AGM(1, sqrt(1 - m))) for 0 <= m < 1."""
    if not (0.0 <= m < 1.0) or not math.isfinite(m):
        raise DomainError(f"complete_K requires 0 <= m < 1, got {m!r}")
    a, b = 1.0, math.sqrt(1.0 - m)
    for _ in range(64):
        if abs(a - b) <= 1e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (a + b)


def _check_m(m: float) -> None:
    if not (0.0 <= m <= 1.0) or not math.isfinite(m):
        raise DomainError(f"elliptic parameter must lie in [0, 1], got {m!r}")


def ellipj(x, m: float):
    """Vectorized (sn, cn, dn, am) at real x.

    am is the continuous amplitude, so atan(sn/cn) on its natural branch.
    """
    _check_m(m)
    xa = np.ascontiguousarray(np.asarray(x, dtype=float).ravel())
    if not np.all(np.isfinite(xa)):
        raise DomainError("elliptic functions need finite arguments")
    out = ellipj_array(xa, float(m))
    if np.ndim(x) == 0:
        return tuple(float(v[0]) for v in out)
    shape = np.shape(x)
    return tuple(np.asarray(v).reshape(shape) for v in out)


def jacobi_elliptic(x: float, m: float) -> EllipticTriple:
    """(sn, cn, dn) at a single real point."""
    sn, cn, dn, _ = ellipj(float(x), m)
    return EllipticTriple(sn, cn, dn)


def amplitude(x, m: float):
    """Jacobi amplitude am(x | m)."""
    return ellipj(x, m)[3]


def _jacobi_series(r: int, a: complex, b: complex, z: complex) -> complex:
    # sum_s C(r+a, r-s) C(r+b, s) ((z-1)/2)^s ((z+1)/2)^(r-s), valid for all a, b
    u, v = (z - 1) / 2, (z + 1) / 2
    total = 0j
    for s in range(r + 1):
        c1 = 1 + 0j
        for t in range(r - s):
            c1 *= (a + s + 1 + t) / (t + 1)
        c2 = 1 + 0j
        for t in range(s):
            c2 *= (r + b - t) / (t + 1)
        total += c1 * c2 * u**s * v ** (r - s)
    return total


def jacobi_poly(r: int, alpha: complex, beta: complex, z):
    """Jacobi polynomial P_r^(alpha, beta)(z) for complex parameters and argument.

    z may be a scalar or an array. Uses the three-term recurrence in degree;
    when one of its leading factors vanishes (e.g. alpha + beta a negative
    integer) it falls back to the explicit binomial sum, which is a polynomial
    identity in alpha and beta.
    """
    if r < 0 or int(r) != r:
        raise DomainError(f"degree must be a non-negative integer, got {r!r}")
    zz = np.asarray(z, dtype=complex)
    if not (np.isfinite(complex(alpha)) and np.isfinite(complex(beta)) and np.all(np.isfinite(zz))):
        raise DomainError("jacobi_poly needs finite inputs")
    a, b = complex(alpha), complex(beta)
    out = _jacobi_recurrence(int(r), a, b, zz)
    return complex(out) if zz.ndim == 0 else out


def _jacobi_recurrence(r: int, a: complex, b: complex, z: np.ndarray) -> np.ndarray:
    if r == 0:
        return np.ones_like(z)
    p_prev = np.ones_like(z)
    p = (a + b + 2) * z / 2 + (a - b) / 2
    for n in range(2, r + 1):
        s = 2 * n + a + b
        lead = 2 * n * (n + a + b) * (s - 2)
        if abs(lead) < 1e-12 * (1 + abs(s) ** 3):
            return _jacobi_series(r, a, b, z)
        p, p_prev = ((s - 1) * (s * (s - 2) * z + a * a - b * b) * p
                     - 2 * (n + a - 1) * (n + b - 1) * s * p_prev) / lead, p
    return p
