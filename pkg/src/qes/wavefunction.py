"""Band-edge eigenfunctions on sampling grids, and residual checks."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from math import factorial
from typing import NamedTuple, TextIO

import numpy as np

from .elliptic import ellipj
from .errors import ConstraintError, DomainError
from .model import AlgebraizationRow, Family, ModelParams, gauge_exponent, potential_value
from .model import rational_str
from .recurrence import BandEdgeSolution

NORMS = ("unit-max", "unit-L2")


@dataclass(frozen=True)
class SampledWavefunction:
    xs: np.ndarray
    psi: np.ndarray
    energy: complex
    row_id: str
    norm_convention: str = "unit-max"


def normalize(xs: np.ndarray, psi: np.ndarray, convention: str = "unit-max") -> np.ndarray:
    """Scale psi so the largest sample is 1 (or the grid L2 norm is 1, phase fixed there)."""
    if convention not in NORMS:
        raise ConstraintError(f"unknown normalization {convention!r}")
    i = int(np.argmax(np.abs(psi)))
    if psi[i] == 0:
        return psi.astype(complex)
    out = psi / psi[i]
    if convention == "unit-L2":
        h = float(xs[1] - xs[0]) if len(xs) > 1 else 1.0
        out = out / math.sqrt(float(np.sum(np.abs(out) ** 2)) * h)
    return out


def default_grid(model: ModelParams, N: int = 2001, eps: float | None = None) -> np.ndarray:
    """Uniform grid on [eps, 2K - eps] (Type I/II) or an offset grid over [-2K, 2K] (Type III)."""
    K = model.K
    if model.family is Family.III:
        h = 4 * K / N
        return -2 * K + (np.arange(N) + 1 / 3) * h
    e = 1e-3 * K if eps is None else eps
    return np.linspace(e, 2 * K - e, N)


def grid_with_step(model: ModelParams, h: float, eps: float | None = None) -> np.ndarray:
    """Uniform grid of step h over the natural domain (same conventions as default_grid)."""
    K = model.K
    if model.family is Family.III:
        n = int(4 * K / h)
        return -2 * K + (np.arange(n) + 1 / 3) * h
    e = 1e-3 * K if eps is None else eps
    n = int((2 * K - 2 * e) / h) + 1
    return e + h * np.arange(n)


def _check_grid(row: AlgebraizationRow, xs: np.ndarray, cn: np.ndarray) -> None:
    p = row.params
    if p.family is Family.III:
        bad = np.abs(cn) < 1e-14
        if np.any(bad):
            raise DomainError(f"grid point x = {float(xs[bad][0])!r} sits on a pole of xi")
    else:
        P = 2 * p.K
        bad = (xs <= 0) | (xs >= P)
        if np.any(bad):
            raise DomainError(f"grid point x = {float(xs[bad][0])!r} is outside (0, {P!r})")


def root_factors(row: AlgebraizationRow, xs: np.ndarray):
    """(u1, u2, S): xi - xi_i = u_i / w and S = Q^(-n/4) w^(-n), all pole-free."""
    p = row.params
    sn, cn, dn, _ = ellipj(xs, p.m)
    _check_grid(row, xs, cn)
    n = row.n
    if p.family is Family.I:
        u1, u2 = -cn - row.xi1, -cn - row.xi2
        S = (sn * dn) ** (-n / 2)
    elif p.family is Family.II:
        u1, u2 = -(cn + row.xi1 * dn), -(cn + row.xi2 * dn)
        S = ((1 - p.m) * sn) ** (-n / 2)
    else:
        u1, u2 = sn - row.xi1 * cn, sn - row.xi2 * cn
        S = dn ** (-n / 2)
    return u1, u2, S


def assemble(row: AlgebraizationRow, edge: BandEdgeSolution, xs,
             norm: str = "unit-max") -> SampledWavefunction:
    """psi = mu (xi - xi2)^n sum_j P_j/j! t^j with t = (xi - xi1)/(xi - xi2)."""
    if edge.row_id != row.row_id:
        raise ConstraintError(f"edge from row {edge.row_id} used with row {row.row_id}")
    xs = np.asarray(xs, dtype=float)
    u1, u2, S = root_factors(row, xs)
    n = row.n
    poly = np.zeros(xs.shape, dtype=complex)
    for j in range(n + 1):
        poly += edge.coeffs[j] / factorial(j) * u1**j * u2 ** (n - j)
    psi = S * np.exp(gauge_exponent(row, xs)) * poly
    return SampledWavefunction(xs, normalize(xs, psi, norm), complex(edge.energy), row.row_id, norm)


class ResidualReport(NamedTuple):
    value: float
    h: float
    points: int


def default_collar(model: ModelParams) -> float:
    """Width excluded next to each singular endpoint when scoring residuals."""
    return 0.0 if model.family is Family.III else 0.25 * model.K


def scored_mask(model: ModelParams, xs: np.ndarray, collar: float) -> np.ndarray:
    if model.family is Family.III or collar <= 0:
        return np.ones(xs.shape, dtype=bool)
    P = 2 * model.K
    r = np.mod(xs, P)
    return np.minimum(r, P - r) >= collar


def residual_samples(model: ModelParams, xs, psi, energy: complex,
                     collar: float | None = None) -> ResidualReport:
    """max |-psi'' + V psi - E psi| / max|psi| over scored points, 5-point h^4 stencil."""
    xs = np.asarray(xs, dtype=float)
    psi = np.asarray(psi, dtype=complex)
    if len(xs) < 7:
        raise DomainError(f"residual needs at least 7 grid points, got {len(xs)}")
    steps = np.diff(xs)
    h = float(steps.mean())
    if np.max(np.abs(steps - h)) > 1e-9 * abs(h):
        raise DomainError("residual needs a uniform grid")
    c = default_collar(model) if collar is None else collar
    inner = xs[2:-2]
    keep = scored_mask(model, inner, c)
    if keep.sum() < 3:
        raise DomainError("collar leaves fewer than 3 scored points; grid too coarse")
    d2 = (-psi[4:] + 16 * psi[3:-1] - 30 * psi[2:-2] + 16 * psi[1:-3] - psi[:-4]) / (12 * h * h)
    V = potential_value(model, inner[keep], periodic=True)
    scored = psi[2:-2][keep]
    r = -d2[keep] + (V - energy) * scored
    return ResidualReport(float(np.max(np.abs(r)) / np.max(np.abs(scored))), h, int(keep.sum()))


def residual(model: ModelParams, wf: SampledWavefunction,
             collar: float | None = None) -> ResidualReport:
    """Schrodinger residual of a sampled eigenfunction on interior points."""
    return residual_samples(model, wf.xs, wf.psi, wf.energy, collar)


def constant_fit(reference: np.ndarray, candidate: np.ndarray) -> tuple[complex, float]:
    """Least-squares c with reference ~ c*candidate, and max deviation relative to max|reference|."""
    a = np.asarray(reference, dtype=complex)
    b = np.asarray(candidate, dtype=complex)
    c = complex(np.vdot(b, a) / np.vdot(b, b))
    return c, float(np.max(np.abs(a - c * b)) / np.max(np.abs(a)))


def gram_determinant(f: np.ndarray, g: np.ndarray) -> float:
    """2x2 Gram determinant of two unit-max normalized samples (mean inner product)."""
    f = f / f[np.argmax(np.abs(f))]
    g = g / g[np.argmax(np.abs(g))]
    N = len(f)
    ff = np.vdot(f, f).real / N
    gg = np.vdot(g, g).real / N
    fg = np.vdot(f, g) / N
    return float(ff * gg - abs(fg) ** 2)


def _fmt(v: float) -> str:
    return format(float(v), ".15g")


def format_complex(z: complex) -> str:
    z = complex(z)
    im = _fmt(z.imag)
    sign = "" if im.startswith("-") else "+"
    return f"{_fmt(z.real)}{sign}{im}i"


def write_csv(stream: TextIO, model: ModelParams, wf: SampledWavefunction,
              residual_value: float | None = None) -> None:
    """Columns x, re_psi, im_psi, V; '#' header lines carry the metadata."""
    stream.write(f"# row_id={wf.row_id}\n")
    stream.write(f"# E={format_complex(wf.energy)}\n")
    stream.write(f"# m={_fmt(model.m)}\n# A={rational_str(model.A)}\n# B={rational_str(model.B)}\n")
    stream.write(f"# family={model.family.value}\n# norm={wf.norm_convention}\n")
    if residual_value is not None:
        stream.write(f"# residual={_fmt(residual_value)}\n")
    stream.write("x,re_psi,im_psi,V\n")
    V = potential_value(model, wf.xs, periodic=True)
    for x, p, v in zip(wf.xs, wf.psi, V):
        stream.write(f"{_fmt(x)},{_fmt(p.real)},{_fmt(p.imag)},{_fmt(v)}\n")


def to_csv(model: ModelParams, wf: SampledWavefunction, residual_value: float | None = None) -> str:
    buf = io.StringIO()
    write_csv(buf, model, wf, residual_value)
    return buf.getvalue()
