"""Finite-difference band-edge oracle: 3-point Laplacian, Sturm bisection, inverse iteration."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintError, NumericalError
from .kernels import bisect_lowest, cyclic_count, sturm_count
from .model import Family, ModelParams, is_regular, potential_value

BCS = ("dirichlet-truncated", "periodic-2K", "antiperiodic-2K", "periodic-4K", "antiperiodic-4K")


@dataclass(frozen=True)
class DiscretizedOperator:
    grid: np.ndarray
    h: float
    diag: np.ndarray
    offdiag: np.ndarray
    corner: float
    bc: str

    @property
    def cyclic(self) -> bool:
        return self.bc != "dirichlet-truncated"

    def dense(self) -> np.ndarray:
        """Dense matrix, for small cross-checks only."""
        n = len(self.diag)
        M = np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        if self.cyclic:
            M[0, n - 1] += self.corner
            M[n - 1, 0] += self.corner
        return M


def discretize(model: ModelParams, N: int, bc: str, eps: float | None = None) -> DiscretizedOperator:
    """-d^2/dx^2 + V on N points with the requested boundary condition.

    dirichlet-truncated uses N interior points of [eps, 2K - eps] (default
    eps = 1e-3 K); the periodic variants use N points x_i = i h over 2K or 4K
    with the corner entry -1/h^2 (periodic) or +1/h^2 (antiperiodic).
    """
    if bc not in BCS:
        raise ConstraintError(f"unknown boundary condition {bc!r}; choose from {BCS}")
    if N < 100:
        raise ConstraintError(f"oracle needs N >= 100, got {N}")
    K = model.K
    if bc == "dirichlet-truncated":
        if model.family is Family.III:
            raise ConstraintError("Type III potentials are regular; use a periodic condition")
        e = 1e-3 * K if eps is None else eps
        if not (0 < e < K):
            raise ConstraintError(f"epsilon must lie in (0, K), got {e!r}")
        h = (2 * K - 2 * e) / (N + 1)
        x = e + h * np.arange(1, N + 1)
        corner = 0.0
    else:
        if not is_regular(model):
            raise ConstraintError(
                f"{bc} needs a potential without endpoint singularities (Type III, or Type II "
                f"with B(B+1) = 0)")
        L = (2 if bc.endswith("2K") else 4) * K
        h = L / N
        x = h * np.arange(N)
        corner = (-1.0 if bc.startswith("periodic") else 1.0) / (h * h)
    V = np.asarray(potential_value(model, x, periodic=True), dtype=float)
    diag = 2.0 / (h * h) + V
    off = np.full(N - 1, -1.0 / (h * h))
    return DiscretizedOperator(x, h, diag, off, corner, bc)


def constant_operator(c: float, N: int, L: float, bc: str = "periodic-2K") -> DiscretizedOperator:
    """Operator with V = c on a periodic grid of length L (sanity checks)."""
    h = L / N
    corner = (-1.0 if bc.startswith("periodic") else 1.0) / (h * h)
    return DiscretizedOperator(h * np.arange(N), h, np.full(N, 2 / (h * h) + c),
                               np.full(N - 1, -1 / (h * h)), corner, bc)


def count_below(opr: DiscretizedOperator, lam: float) -> int:
    """Number of eigenvalues below lam (Sylvester inertia)."""
    d = np.ascontiguousarray(opr.diag)
    e = np.ascontiguousarray(opr.offdiag)
    if opr.cyclic:
        return int(cyclic_count(d, e, float(opr.corner), float(lam)))
    return int(sturm_count(d, e, float(lam)))


def _gershgorin(opr: DiscretizedOperator) -> tuple[float, float]:
    n = len(opr.diag)
    r = np.zeros(n)
    r[:-1] += np.abs(opr.offdiag)
    r[1:] += np.abs(opr.offdiag)
    if opr.cyclic:
        r[0] += abs(opr.corner)
        r[-1] += abs(opr.corner)
    return float(np.min(opr.diag - r)) - 1.0, float(np.max(opr.diag + r)) + 1.0


def lowest_eigenvalues(opr: DiscretizedOperator, count: int, tol: float = 1e-14) -> np.ndarray:
    """Smallest `count` eigenvalues, ascending, by bisection on inertia counts."""
    n = len(opr.diag)
    if not (0 < count <= n):
        raise ConstraintError(f"count must lie in 1..{n}, got {count}")
    lo, hi = _gershgorin(opr)
    vals = bisect_lowest(np.ascontiguousarray(opr.diag), np.ascontiguousarray(opr.offdiag),
                         float(opr.corner), bool(opr.cyclic), int(count), lo, hi, tol)
    vals = np.asarray(vals)
    if not np.all(np.isfinite(vals)):
        raise NumericalError("bisection produced non-finite eigenvalues")
    return vals


def _thomas(sub: np.ndarray, diag: np.ndarray, sup: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    n = len(diag)
    c = np.zeros(n)
    d = np.zeros(n)
    piv = diag[0] if diag[0] != 0 else 1e-300
    c[0] = sup[0] / piv if n > 1 else 0.0
    d[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - sub[i - 1] * c[i - 1]
        if piv == 0:
            piv = 1e-300
        if i < n - 1:
            c[i] = sup[i] / piv
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / piv
    x = np.zeros(n)
    x[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


def _solve_shifted(opr: DiscretizedOperator, lam: float, rhs: np.ndarray) -> np.ndarray:
    diag = opr.diag - lam
    off = opr.offdiag
    if not opr.cyclic:
        return _thomas(off, diag, off, rhs)
    # Sherman-Morrison: corner couplings as a rank-one update u v^T
    g = -diag[0] if diag[0] != 0 else 1.0
    u = np.zeros(len(diag))
    u[0], u[-1] = g, opr.corner
    v = np.zeros(len(diag))
    v[0], v[-1] = 1.0, opr.corner / g
    d2 = diag.copy()
    d2[0] -= g
    d2[-1] -= opr.corner * opr.corner / g
    y = _thomas(off, d2, off, rhs)
    z = _thomas(off, d2, off, u)
    return y - z * (v @ y) / (1.0 + v @ z)


def eigenvector(opr: DiscretizedOperator, lam: float, iters: int = 3) -> np.ndarray:
    """Unit eigenvector for an (approximate) eigenvalue by inverse iteration."""
    n = len(opr.diag)
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(n)
    shift = lam + 1e-10 * (1 + abs(lam))
    for _ in range(iters):
        v = _solve_shifted(opr, shift, v)
        nv = np.linalg.norm(v)
        if not math.isfinite(nv) or nv == 0:
            raise NumericalError("inverse iteration broke down")
        v /= nv
    return v


def richardson(coarse: float, fine: float, order: int, ratio: float = 2.0) -> float:
    """Eliminate the leading error term c*h^order from two estimates at h and h/ratio."""
    f = ratio**order
    return (f * fine - coarse) / (f - 1)


def dirichlet_estimate(model: ModelParams, count: int = 1, N: int = 2000,
                       eps_values: tuple[float, ...] | None = None) -> dict:
    """Truncated-Dirichlet eigenvalues extrapolated in h (order 2) and then in eps (order 1).

    Grid step is held proportional across eps so each solve has the same h.
    """
    K = model.K
    eps_values = eps_values or (4e-3 * K, 2e-3 * K)
    per_eps = []
    for e in eps_values:
        a = lowest_eigenvalues(discretize(model, N, "dirichlet-truncated", e), count)
        b = lowest_eigenvalues(discretize(model, 2 * N + 1, "dirichlet-truncated", e), count)
        per_eps.append(richardson(a, b, 2))
    est = per_eps[-1]
    if len(per_eps) >= 2:
        ratio = eps_values[-2] / eps_values[-1]
        est = richardson(per_eps[-2], per_eps[-1], 1, ratio)
    return {"eps": list(eps_values), "per_eps": [list(map(float, p)) for p in per_eps],
            "estimate": [float(v) for v in est]}


def type3_band_edges(model: ModelParams, count: int = 3, N: int = 4000) -> np.ndarray:
    """Lowest `count` levels of the union of periodic-2K and antiperiodic-2K problems."""
    p = lowest_eigenvalues(discretize(model, N, "periodic-2K"), count)
    a = lowest_eigenvalues(discretize(model, N, "antiperiodic-2K"), count)
    return np.sort(np.concatenate([p, a]))[:count]


def h_convergence_factor(model: ModelParams, bc: str, targets, N: int = 2000) -> list[float]:
    """Error ratio |lambda_h - target| / |lambda_{h/2} - target| for each target level."""
    targets = list(targets)
    a = lowest_eigenvalues(discretize(model, N, bc), len(targets) + 4)
    b = lowest_eigenvalues(discretize(model, 2 * N, bc), len(targets) + 4)
    out = []
    for t in targets:
        ea = float(np.min(np.abs(a - t)))
        eb = float(np.min(np.abs(b - t)))
        out.append(ea / eb if eb > 0 else math.inf)
    return out
