"""Three-term recurrence of the energy polynomials, critical polynomial and band edges."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NondegeneracyError, NumericalError
from .model import AlgebraizationRow, Family
from .tables import table_lambda, table_omega_ratio, table_rho

log = logging.getLogger(__name__)

TABLE_RTOL = 1e-9
PIVOT_TOL = 1e-12
MERGE_TOL = 1e-8


@dataclass(frozen=True)
class HatCoeffs:
    hatC_p0: complex
    hatC_00: complex
    hatC_0m: complex
    hatC_p: complex
    hatC_0: complex
    hatC_m: complex
    d1: complex


def hat_coeffs(row: AlgebraizationRow) -> HatCoeffs:
    """Coefficients of the operator after moving the roots xi1, xi2 to 0 and infinity."""
    x1, x2 = row.xi1, row.xi2
    D = x1 - x2
    if abs(D) <= 1e-14 * (1 + abs(x1)):
        raise DomainError(f"row {row.row_id}: coincident roots xi1 = xi2 = {x1!r}")
    Cpp, C00, Cmm = row.Cpp, row.C00, row.Cmm
    Cp, C0, Cm = row.Cp, row.C0, row.Cm
    D2 = D * D
    hp0 = -(2 * x1 * x2**3 * Cpp + x2 * (x1 + x2) * C00 + 2 * Cmm) / D2
    h00 = (6 * x1**2 * x2**2 * Cpp + (x1**2 + x2**2 + 4 * x1 * x2) * C00 + 6 * Cmm) / D2
    h0m = -(2 * x1**3 * x2 * Cpp + x1 * (x1 + x2) * C00 + 2 * Cmm) / D2
    hp = (x2**2 * Cp + x2 * C0 + Cm) / D
    h0 = -(2 * x1 * x2 * Cp + (x1 + x2) * C0 + 2 * Cm) / D
    hm = (x1**2 * Cp + x1 * C0 + Cm) / D
    n = row.n
    d1 = row.d + n * (n + 2) * (C00 - h00) / 12
    return HatCoeffs(hp0, h00, h0m, hp, h0, hm, d1)


def _lower(h: HatCoeffs, n: int, j: int) -> complex:
    # coefficient of P_{j+1}, up to sign
    return (2 * j - n + 1) * h.hatC_0m + h.hatC_m


def _upper(h: HatCoeffs, n: int, j: int) -> complex:
    return (2 * j - n - 1) * h.hatC_p0 + h.hatC_p


def _diag(h: HatCoeffs, n: int, j: int) -> complex:
    s = j - n / 2
    return h.d1 + h.hatC_0 * s + h.hatC_00 * s * s


@dataclass(frozen=True)
class Nondegeneracy:
    ok: bool
    failing: list[int]

    def __bool__(self) -> bool:
        return self.ok


def check_nondegeneracy(row: AlgebraizationRow, hats: HatCoeffs | None = None) -> Nondegeneracy:
    """True iff every pivot (2j-n+1) C0- + C- for j = 0..n is nonzero."""
    h = hats if hats is not None else hat_coeffs(row)
    n = row.n
    scale = max(abs(h.hatC_0m) * (n + 1), abs(h.hatC_m), 1e-300)
    bad = [j for j in range(n + 1) if abs(_lower(h, n, j)) <= PIVOT_TOL * scale]
    return Nondegeneracy(not bad, bad)


@dataclass(frozen=True)
class Mismatch:
    row_id: str
    j: int
    quantity: str
    derived: complex
    table: complex

    def to_dict(self) -> dict:
        return {"row": self.row_id, "j": self.j, "quantity": self.quantity,
                "derived": [self.derived.real, self.derived.imag],
                "table": [self.table.real, self.table.imag]}


@dataclass(frozen=True)
class MonicRecurrence:
    row_id: str
    n: int
    lam: np.ndarray
    rho: np.ndarray
    omega: np.ndarray
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    mismatch_log: list[Mismatch] = field(default_factory=list)


def _close(a: complex, b: complex) -> bool:
    return abs(a - b) <= TABLE_RTOL * max(abs(a), abs(b), 1.0)


def monic_recurrence(row: AlgebraizationRow, crosscheck: bool = True) -> MonicRecurrence:
    """Monic form P~_{j+1} = (E - lam_j) P~_j - rho_j P~_{j-1} derived from the row.

    The non-monic recursion reads
        -b_j P_{j+1} = (E + D_j) P_j + j (j-1-n) c_j P_{j-1}
    so lam_j = -D_j, rho_j = j (j-1-n) c_j b_{j-1} and omega_{j+1} = -b_j omega_j.
    """
    h = hat_coeffs(row)
    nd = check_nondegeneracy(row, h)
    if not nd:
        raise NondegeneracyError(f"row {row.row_id}: vanishing pivot at j = {nd.failing}",
                                 nd.failing)
    n = row.n
    b = np.array([_lower(h, n, j) for j in range(n + 1)], dtype=complex)
    c = np.array([_upper(h, n, j) for j in range(n + 2)], dtype=complex)
    D = np.array([_diag(h, n, j) for j in range(n + 1)], dtype=complex)
    lam = -D
    rho = np.zeros(n + 2, dtype=complex)
    for j in range(1, n + 1):
        rho[j] = j * (j - 1 - n) * c[j] * b[j - 1]
    # rho_{n+1} carries the factor (j - 1 - n) = 0 exactly
    omega = np.ones(n + 2, dtype=complex)
    for j in range(n + 1):
        omega[j + 1] = -b[j] * omega[j]
    mismatches: list[Mismatch] = []
    if crosscheck:
        p = row.params
        A, B, m = p.a, p.b, p.m
        for j in range(n + 1):
            t = complex(table_lambda(row.row_id, j, A, B, m))
            if not _close(lam[j], t):
                mismatches.append(Mismatch(row.row_id, j, "lambda", complex(lam[j]), t))
            t = complex(table_rho(row.row_id, j, A, B, m))
            if not _close(rho[j], t):
                mismatches.append(Mismatch(row.row_id, j, "rho", complex(rho[j]), t))
            t = complex(table_omega_ratio(row.row_id, j, A, B, m))
            if not _close(-b[j], t):
                mismatches.append(Mismatch(row.row_id, j, "omega_ratio", complex(-b[j]), t))
        for mm in mismatches:
            log.info("suspected table typo: row %s j=%d %s derived=%r table=%r",
                     mm.row_id, mm.j, mm.quantity, mm.derived, mm.table)
    return MonicRecurrence(row.row_id, n, lam, rho, omega, b, D, c, mismatches)


def critical_polynomial(rec: MonicRecurrence) -> np.ndarray:
    """Ascending coefficients of the monic P~_{n+1}(E)."""
    prev = np.zeros(1, dtype=complex)
    cur = np.ones(1, dtype=complex)
    for j in range(rec.n + 1):
        nxt = np.concatenate([[0j], cur]) - rec.lam[j] * np.concatenate([cur, [0j]])
        nxt[: len(prev)] -= rec.rho[j] * prev
        prev, cur = cur, nxt
    return cur


def eval_critical(rec: MonicRecurrence, E: complex) -> tuple[complex, complex, float]:
    """(P~_{n+1}(E), derivative, magnitude scale) by running the recurrence."""
    p0, p1 = 0j, 1 + 0j
    d0, d1 = 0j, 0j
    s0, s1 = 0.0, 1.0
    aE = abs(E)
    for j in range(rec.n + 1):
        lam, rho = rec.lam[j], rec.rho[j]
        p2 = (E - lam) * p1 - rho * p0
        d2 = p1 + (E - lam) * d1 - rho * d0
        s2 = (aE + abs(lam)) * s1 + abs(rho) * s0
        p0, p1, d0, d1, s0, s1 = p1, p2, d1, d2, s1, s2
    # the scale is zero only when every term is, e.g. E = 0 at a linear row with lam_0 = 0
    return p1, d1, max(s1, np.finfo(float).tiny)


def monic_family(rec: MonicRecurrence, E: complex) -> np.ndarray:
    """P~_j(E) for j = 0..n+1."""
    out = np.zeros(rec.n + 2, dtype=complex)
    out[0] = 1
    prev = 0j
    for j in range(rec.n + 1):
        out[j + 1] = (E - rec.lam[j]) * out[j] - rec.rho[j] * prev
        prev = out[j]
    return out


def poly_family(rec: MonicRecurrence, E: complex) -> np.ndarray:
    """Non-monic P_j(E) = P~_j(E)/omega_j for j = 0..n+1."""
    if np.any(np.abs(rec.omega) == 0):
        bad = [int(j) for j in np.flatnonzero(np.abs(rec.omega) == 0)]
        raise NondegeneracyError(f"row {rec.row_id}: omega vanishes at j = {bad}", bad)
    return monic_family(rec, E) / rec.omega


def expansion_coeffs(rec: MonicRecurrence, E: complex) -> np.ndarray:
    """P_j(E), j = 0..n+1, by the forward non-monic recursion with P_0 = 1."""
    n = rec.n
    P = np.zeros(n + 2, dtype=complex)
    P[0] = 1
    prev = 0j
    for j in range(n + 1):
        P[j + 1] = -((E - rec.lam[j]) * P[j] + j * (j - 1 - n) * rec.upper[j] * prev) / rec.lower[j]
        prev = P[j]
    return P


@dataclass(frozen=True)
class BandEdgeSolution:
    energy: complex
    coeffs: np.ndarray
    row_id: str
    multiplicity_hint: int = 1
    residual: float = 0.0

    def to_dict(self) -> dict:
        return {"E": [self.energy.real, self.energy.imag],
                "P": [[c.real, c.imag] for c in self.coeffs],
                "multiplicity": self.multiplicity_hint}


def _aberth(rec: MonicRecurrence, coeffs: np.ndarray, tol: float = 1e-14,
            max_iter: int = 500) -> np.ndarray:
    N = len(coeffs) - 1
    if N == 1:
        return np.array([-coeffs[0]])
    radius = 1.0 + float(np.max(np.abs(coeffs[:-1])))
    z = radius * np.exp(1j * (2 * np.pi * np.arange(N) / N + 0.4))
    done = np.zeros(N, dtype=bool)
    for _ in range(max_iter):
        for i in range(N):
            if done[i]:
                continue
            p, dp, _s = eval_critical(rec, z[i])
            if p == 0:
                done[i] = True
                continue
            ratio = p / dp if dp != 0 else p
            diff = z[i] - np.delete(z, i)
            corr = ratio / (1 - ratio * np.sum(1.0 / diff))
            z[i] -= corr
            if abs(corr) <= tol * (1 + abs(z[i])):
                done[i] = True
        if done.all():
            break
    return z


def _polish(rec: MonicRecurrence, z: complex, steps: int = 4) -> complex:
    p, dp, _ = eval_critical(rec, z)
    for _ in range(steps):
        if dp == 0 or p == 0:
            break
        z2 = z - p / dp
        p2, dp2, _ = eval_critical(rec, z2)
        if abs(p2) >= abs(p):
            break
        z, p, dp = z2, p2, dp2
    return z


def _is_real(rec: MonicRecurrence) -> bool:
    scale = max(1.0, float(np.max(np.abs(rec.lam))), float(np.max(np.abs(rec.rho))))
    return (np.max(np.abs(rec.lam.imag)) <= 1e-14 * scale
            and np.max(np.abs(rec.rho.imag)) <= 1e-14 * scale)


def merge_levels(values, tol: float = MERGE_TOL) -> list[tuple[complex, int]]:
    """Sort lexicographically by (Re, Im) and merge values closer than tol*scale."""
    vals = sorted((complex(v) for v in values), key=lambda v: (round(v.real, 12), round(v.imag, 12)))
    if not vals:
        return []
    scale = max(1.0, max(abs(v) for v in vals))
    groups: list[list[complex]] = []
    for v in vals:
        for g in groups:
            if abs(g[0] - v) <= tol * scale:
                g.append(v)
                break
        else:
            groups.append([v])
    out = [(complex(np.mean(g)), len(g)) for g in groups]
    return sorted(out, key=lambda t: (round(t[0].real, 12), round(t[0].imag, 12)))


def band_edges(rec: MonicRecurrence) -> list[BandEdgeSolution]:
    """All zeros of P~_{n+1} with their expansion coefficients P_0..P_n."""
    coeffs = critical_polynomial(rec)
    z = _aberth(rec, coeffs)
    z = np.array([_polish(rec, zi) for zi in z])
    real = _is_real(rec)
    res = []
    for zi in z:
        p, _dp, s = eval_critical(rec, zi)
        res.append(abs(p) / s)
        if not math.isfinite(abs(p)) or abs(p) > 1e-8 * s:
            raise NumericalError(
                f"row {rec.row_id}: root iteration did not converge; "
                f"residuals {[float(r) for r in res]}")
    if real:
        z = np.array([complex(v.real, 0.0) if abs(v.imag) <= 1e-9 * (1 + abs(v.real)) else v
                      for v in z])
    out = []
    for E, mult in merge_levels(z):
        if real and abs(E.imag) <= 1e-9 * (1 + abs(E.real)):
            E = complex(E.real, 0.0)
        P = expansion_coeffs(rec, E)
        p, _dp, s = eval_critical(rec, E)
        out.append(BandEdgeSolution(E, P[: rec.n + 1], rec.row_id, mult, abs(p) / s))
    return out


def rows_spectrum(rows) -> dict[str, list[BandEdgeSolution]]:
    """Band edges for each row, keyed by row id."""
    return {r.row_id: band_edges(monic_recurrence(r)) for r in rows}


def union_levels(spectra: dict[str, list[BandEdgeSolution]],
                 tol: float = 1e-9) -> list[tuple[complex, list[str]]]:
    """Distinct levels over all rows with the rows that produce each."""
    items = [(e.energy, rid) for rid, edges in spectra.items() for e in edges]
    items.sort(key=lambda t: (round(t[0].real, 12), round(t[0].imag, 12)))
    groups: list[tuple[list[complex], list[str]]] = []
    scale = max([1.0] + [abs(e) for e, _ in items])
    for E, rid in items:
        for vals, rids in groups:
            if abs(vals[0] - E) <= tol * scale:
                vals.append(E)
                if rid not in rids:
                    rids.append(rid)
                break
        else:
            groups.append(([E], [rid]))
    return [(complex(np.mean(v)), r) for v, r in groups]

