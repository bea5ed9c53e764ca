"""Exactly solvable limit classes V1-V4 and convergence scans of band edges toward them."""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .elliptic import jacobi_poly
from .errors import ConstraintError, DomainError, NumericalError, TrackingError
from .model import Family, catalog_rows, make_model, to_rational
from .recurrence import band_edges, critical_polynomial, monic_recurrence


class ESTag(str, enum.Enum):
    V1 = "V1"  # Type I, m -> 1
    V2 = "V2"  # Type I, m -> 0
    V3 = "V3"  # Type II, m -> 1
    V4 = "V4"  # Type III, m -> 1


@dataclass(frozen=True)
class ESClass:
    tag: ESTag
    A: float
    B: float

    def __post_init__(self):
        object.__setattr__(self, "tag", ESTag(self.tag))
        object.__setattr__(self, "A", float(to_rational(self.A)))
        object.__setattr__(self, "B", float(to_rational(self.B)))

    def domain(self) -> tuple[float, float]:
        return {ESTag.V1: (0.0, math.inf), ESTag.V2: (0.0, math.pi),
                ESTag.V3: (0.0, math.inf), ESTag.V4: (-math.inf, math.inf)}[self.tag]


def es_class_for(family, target: str, A, B) -> ESClass:
    """Limit class reached by a QES family as m -> 1 ("k1") or m -> 0 ("k0")."""
    fam = Family.parse(family)
    if target not in ("k1", "k0"):
        raise ConstraintError(f"target must be 'k1' or 'k0', got {target!r}")
    if target == "k0" and fam is Family.III:
        raise ConstraintError("Type III has no exactly solvable limit at m -> 0: "
                              "the potential tends to a constant (free particle limit)")
    if target == "k0" and fam is Family.II:
        raise ConstraintError("Type II has an exactly solvable limit only at m -> 1")
    tag = {(Family.I, "k1"): ESTag.V1, (Family.I, "k0"): ESTag.V2,
           (Family.II, "k1"): ESTag.V3, (Family.III, "k1"): ESTag.V4}[(fam, target)]
    return ESClass(tag, A, B)


def _check_domain(cls: ESClass, x: np.ndarray) -> None:
    lo, hi = cls.domain()
    if np.any(~np.isfinite(x)) or np.any(x <= lo) or np.any(x >= hi):
        raise DomainError(f"{cls.tag.value} is defined for x in ({lo}, {hi})")


def es_potential(cls: ESClass, x):
    """Potential of the limit class at x (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    _check_domain(cls, xa)
    A, B = cls.A, cls.B
    if cls.tag is ESTag.V1:
        v = ((B * B + A * (A + 1)) - 2 * B * (A + 0.5) * np.cosh(xa)) / np.sinh(xa) ** 2
    elif cls.tag is ESTag.V2:
        v = ((B * B + A * (A + 1)) - 2 * B * (A + 0.5) * np.cos(xa)) / np.sin(xa) ** 2
    elif cls.tag is ESTag.V3:
        v = B * (B + 1) / np.sinh(xa) ** 2 - A * (A + 1) / np.cosh(xa) ** 2
    else:
        sech = 1 / np.cosh(xa)
        v = (B * B - A * (A + 1)) * sech**2 + 2 * B * (A + 0.5) * sech * np.tanh(xa)
    return float(v) if xa.ndim == 0 else v


def es_energy(cls: ESClass, r: int) -> float:
    """Closed-form level E_r of the limit class."""
    if r < 0 or int(r) != r:
        raise DomainError(f"level index must be a non-negative integer, got {r!r}")
    A, B = cls.A, cls.B
    if cls.tag is ESTag.V2:
        return (A - r) ** 2
    if cls.tag is ESTag.V3:
        return -((A + B - 2 * r) ** 2)
    return -((A - r) ** 2)


def es_eigenfunction(cls: ESClass, r: int, x):
    """Prefactor times Jacobi polynomial for level r of the limit class.

    V4 uses complex Jacobi parameters at an imaginary argument; the product
    is real up to a global phase, which is removed here (the phase is taken
    from the sample of largest modulus).
    """
    if r < 0 or int(r) != r:
        raise DomainError(f"level index must be a non-negative integer, got {r!r}")
    xa = np.asarray(x, dtype=float)
    _check_domain(cls, xa)
    A, B = cls.A, cls.B
    if cls.tag is ESTag.V1:
        c = np.cosh(xa)
        pre = (c - 1) ** ((B - A) / 2) * (c + 1) ** (-(B + A) / 2)
        psi = pre * jacobi_poly(r, B - A - 0.5, -B - A - 0.5, c)
    elif cls.tag is ESTag.V2:
        c = np.cos(xa)
        pre = (1 - c) ** ((B - A) / 2) * (1 + c) ** (-(B + A) / 2)
        psi = pre * jacobi_poly(r, B - A - 0.5, -B - A - 0.5, c)
    elif cls.tag is ESTag.V3:
        c = np.cosh(2 * xa)
        pre = (c - 1) ** (-B / 2) * (c + 1) ** (-A / 2)
        psi = pre * jacobi_poly(r, -B - 0.5, -A - 0.5, c)
    else:
        s = np.sinh(xa)
        pre = np.cosh(xa) ** (-A) * np.exp(-B * np.arctan(s))
        psi = pre * jacobi_poly(r, -1j * B - A - 0.5, 1j * B - A - 0.5, 1j * s)
        psi = np.asarray(psi, dtype=complex)
        if psi.ndim == 0:
            ph = psi / abs(psi) if psi != 0 else 1.0
        else:
            big = psi.flat[int(np.argmax(np.abs(psi)))]
            ph = big / abs(big) if big != 0 else 1.0
        psi = psi / ph
        if np.max(np.abs(np.imag(psi))) > 1e-9 * max(float(np.max(np.abs(psi))), 1e-300):
            raise NumericalError("V4 eigenfunction is not real up to a global phase")
    psi = np.asarray(psi, dtype=complex)
    return complex(psi) if psi.ndim == 0 else psi


def es_residual(cls: ESClass, r: int, xs: np.ndarray) -> float:
    """max |-psi'' + V psi - E psi| / max |psi| over interior samples (5-point stencil)."""
    xs = np.asarray(xs, dtype=float)
    h = xs[1] - xs[0]
    if not np.allclose(np.diff(xs), h, rtol=1e-9, atol=0):
        raise DomainError("es_residual needs a uniform grid")
    psi = es_eigenfunction(cls, r, xs)
    E = es_energy(cls, r)
    d2 = (-psi[4:] + 16 * psi[3:-1] - 30 * psi[2:-2] + 16 * psi[1:-3] - psi[:-4]) / (12 * h * h)
    mid = psi[2:-2]
    res = -d2 + es_potential(cls, xs[2:-2]) * mid - E * mid
    return float(np.max(np.abs(res)) / np.max(np.abs(mid)))


# --- convergence scans ---------------------------------------------------------

COALESCE_TOL = 1e-3

def default_m_sequence(target: str, count: int = 6) -> list[float]:
    """1 - 10^-j (target k1) or 10^-j (target k0), j = 1..count."""
    if target == "k1":
        return [1 - 10.0 ** (-j) for j in range(1, count + 1)]
    if target == "k0":
        return [10.0 ** (-j) for j in range(1, count + 1)]
    raise ConstraintError(f"target must be 'k1' or 'k0', got {target!r}")


@dataclass
class ScanPoint:
    m: float
    level_index: int
    energy: complex
    es_energy: float
    es_level: int
    gap: float


@dataclass
class ScanResult:
    es_class: ESClass
    target: str
    ms: list[float]
    points: list[ScanPoint]
    events: list[str] = field(default_factory=list)

    def gaps(self, level_index: int) -> list[float]:
        return [p.gap for p in self.points if p.level_index == level_index]

    def levels(self) -> list[int]:
        return sorted({p.level_index for p in self.points})

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "level_index", "E_re", "E_im", "E_es", "abs_gap"])
        for p in self.points:
            w.writerow([f"{p.m:.15g}", p.level_index, f"{p.energy.real:.15g}",
                        f"{p.energy.imag:.15g}", f"{p.es_energy:.15g}", f"{p.gap:.15g}"])
        return buf.getvalue()


def _levels_at(family, A, B, m: float, row_ids: list[str]) -> np.ndarray:
    model = make_model(family, A, B, m)
    rows = catalog_rows(model, row_ids)
    out = []
    for row in rows:
        for e in band_edges(monic_recurrence(row, crosscheck=False)):
            out.extend([e.energy] * e.multiplicity_hint)
    return np.array(out, dtype=complex)


def _distinct_rows(family, A, B, m: float, rows) -> list[str]:
    """Admissible rows with identical critical polynomials kept once."""
    model = make_model(family, A, B, m)
    kept: list[tuple[str, np.ndarray]] = []
    for row in catalog_rows(model, rows):
        c = critical_polynomial(monic_recurrence(row, crosscheck=False))
        if not any(len(c) == len(k) and np.allclose(c, k, rtol=1e-12, atol=1e-14) for _, k in kept):
            kept.append((row.row_id, c))
    if not kept:
        raise ConstraintError("no admissible algebraization row for these parameters")
    return [rid for rid, _ in kept]


def _to_m(t: float, target: str) -> float:
    return 1 - math.exp(t) if target == "k1" else math.exp(t)


def _to_t(m: float, target: str) -> float:
    return math.log(1 - m) if target == "k1" else math.log(m)


def _match(prev: np.ndarray, new: np.ndarray) -> tuple[np.ndarray, float, float]:
    cost = np.abs(prev[:, None] - new[None, :])
    _, col = linear_sum_assignment(cost)
    moved = new[col]
    disp = float(np.max(np.abs(moved - prev))) if len(prev) else 0.0
    sep = math.inf
    if len(new) > 1:
        d = np.abs(new[:, None] - new[None, :])
        sep = float(np.min(d[~np.eye(len(new), dtype=bool)]))
    return moved, disp, sep


def _track(prev: np.ndarray, t0: float, t1: float, level_fn, events: list[str],
           depth: int = 0, max_depth: int = 24) -> np.ndarray:
    new = level_fn(t1)
    if len(new) != len(prev) or not np.all(np.isfinite(new)):
        raise TrackingError(f"level count changed from {len(prev)} to {len(new)} near "
                            f"m = {level_fn.m_of(t1):.15g}")
    moved, disp, sep = _match(prev, new)
    if disp < 0.25 * sep:
        return moved
    if depth >= max_depth:
        # at a square-root branch point separation only shrinks like sqrt(step)
        scale = 1.0 + float(np.max(np.abs(new)))
        if sep <= COALESCE_TOL * scale:
            events.append(f"levels coalesce near m = {level_fn.m_of(t1):.15g} "
                          f"(separation {sep:.3g}); pairing across it is arbitrary")
            return moved
        raise TrackingError(f"cannot resolve level ordering near m = {level_fn.m_of(t1):.15g}: "
                            f"step displacement {disp:.3g}, separation {sep:.3g}")
    tm = 0.5 * (t0 + t1)
    mid = _track(prev, t0, tm, level_fn, events, depth + 1, max_depth)
    return _track(mid, tm, t1, level_fn, events, depth + 1, max_depth)


class _LevelFn:
    def __init__(self, family, A, B, target, row_ids):
        self.family, self.A, self.B, self.target, self.row_ids = family, A, B, target, row_ids

    def m_of(self, t: float) -> float:
        return _to_m(t, self.target)

    def __call__(self, t: float) -> np.ndarray:
        return _levels_at(self.family, self.A, self.B, self.m_of(t), self.row_ids)


def limit_scan(family, A, B, target: str = "k1", ms=None, rows=None,
               substeps: int = 8) -> ScanResult:
    """Track every band edge of the selected rows along an m-sequence toward a limit.

    Levels are followed by optimal assignment between closely spaced steps in
    log(1 - m) (or log m), refined until the pairing is unambiguous. At the m
    closest to the limit, tracked levels are matched one-to-one to the nearest
    limit-class levels; the reported gap is |E(m) - E_ES| at every m.
    """
    fam = Family.parse(family)
    cls = es_class_for(fam, target, A, B)
    ms = list(default_m_sequence(target) if ms is None else ms)
    if len(ms) < 1:
        raise ConstraintError("m-sequence is empty")
    if any(not (0 < m < 1) for m in ms):
        raise ConstraintError("m values must lie in (0, 1)")
    steps = np.diff(ms)
    if target == "k1" and not np.all(steps > 0):
        raise ConstraintError("m-sequence toward m -> 1 must be strictly increasing")
    if target == "k0" and not np.all(steps < 0):
        raise ConstraintError("m-sequence toward m -> 0 must be strictly decreasing")
    row_ids = _distinct_rows(fam, A, B, ms[0], rows)
    level_fn = _LevelFn(fam, A, B, target, row_ids)
    events: list[str] = []
    ts = [_to_t(m, target) for m in ms]
    track = [level_fn(ts[0])]
    for t0, t1 in zip(ts[:-1], ts[1:]):
        cur = track[-1]
        grid = np.linspace(t0, t1, substeps + 1)
        for a, b in zip(grid[:-1], grid[1:]):
            cur = _track(cur, a, b, level_fn, events)
        track.append(cur)
    final = track[-1]
    r_max = len(final) + int(math.ceil(abs(cls.A) + abs(cls.B))) + 4
    es_levels = [es_energy(cls, r) for r in range(r_max + 1)]
    # one-to-one nearest assignment: classes such as V4 repeat energies (E_r = E_{2A-r})
    _, assigned = linear_sum_assignment(np.abs(final[:, None] - np.array(es_levels)[None, :]))
    points = []
    for idx in range(len(final)):
        r = int(assigned[idx])
        for m, lv in zip(ms, track):
            points.append(ScanPoint(m, idx, complex(lv[idx]), es_levels[r], r,
                                    float(abs(lv[idx] - es_levels[r]))))
    points.sort(key=lambda p: (ms.index(p.m), p.level_index))
    return ScanResult(cls, target, ms, points, events)
