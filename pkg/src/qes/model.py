"""Potential families, algebraization catalog, coordinate map and gauge factor."""
from __future__ import annotations

import enum
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Union

import numpy as np

from .elliptic import complete_K, ellipj
from .errors import ConstraintError, DomainError, NumericalError

Number = Union[int, float, Fraction]

RAT_TOL = 1e-9


class RegionWarning(UserWarning):
    """Parameters kept outside the nominal effective region."""


class Family(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"

    @classmethod
    def parse(cls, value) -> "Family":
        if isinstance(value, Family):
            return value
        text = str(value).strip().upper().replace("TYPE", "").strip()
        try:
            return cls(text)
        except ValueError:
            raise ConstraintError(f"unknown family {value!r}; expected I, II or III") from None


def to_rational(value) -> Number:
    """Parse "p/q", ints and Fractions exactly; other floats are kept as floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ConstraintError("boolean is not a parameter value")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            if Fraction(den.strip()) == 0:
                raise ConstraintError(f"zero denominator in {value!r}")
            return Fraction(num.strip()) / Fraction(den.strip())
        try:
            return Fraction(text)
        except ValueError:
            raise ConstraintError(f"cannot parse {value!r} as a number") from None
    v = float(value)
    if not math.isfinite(v):
        raise ConstraintError(f"parameter must be finite, got {value!r}")
    return v


def snap_rational(value: float, max_den: int = 64, tol: float = RAT_TOL) -> Number:
    """Snap a float onto a nearby small-denominator rational when within tol."""
    if isinstance(value, Fraction):
        return value
    f = Fraction(value).limit_denominator(max_den)
    if abs(float(f) - value) <= tol:
        if float(f) != value:
            warnings.warn(f"snapped {value!r} to rational {f}", RegionWarning, stacklevel=2)
        return f
    return value


def rational_str(v: Number) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


@dataclass(frozen=True)
class ModelParams:
    family: Family
    A: Number
    B: Number
    m: float

    @property
    def a(self) -> float:
        return float(self.A)

    @property
    def b(self) -> float:
        return float(self.B)

    @property
    def k(self) -> float:
        return math.sqrt(self.m)

    @property
    def kp(self) -> float:
        return math.sqrt(1.0 - self.m)

    @property
    def K(self) -> float:
        return complete_K(self.m)

    def to_dict(self) -> dict:
        return {"family": self.family.value, "A": rational_str(self.A),
                "B": rational_str(self.B), "m": self.m}


def _in_region(family: Family, A: Number, B: Number) -> bool:
    if family is Family.I:
        return A >= -Fraction(1, 2) and B >= 0
    if family is Family.II:
        return A >= -Fraction(1, 2) and B >= -Fraction(1, 2)
    return A >= -Fraction(1, 2)


def make_model(family, A, B, m: float) -> ModelParams:
    """Validate and canonicalize (A, B) into the family's effective region."""
    fam = Family.parse(family)
    m = float(m)
    if not (0.0 < m < 1.0):
        raise DomainError(f"m must lie in (0, 1), got {m!r}")
    A, B = to_rational(A), to_rational(B)
    if _in_region(fam, A, B):
        return ModelParams(fam, A, B, m)
    A2 = -A - 1
    B2 = -B - 1 if fam is Family.II else -B
    if _in_region(fam, A2, B2):
        return ModelParams(fam, A2, B2, m)
    if fam is Family.II and A >= -Fraction(1, 2):
        warnings.warn(f"Type II with B={rational_str(B)} < -1/2 kept as given", RegionWarning,
                      stacklevel=2)
        return ModelParams(fam, A, B, m)
    raise ConstraintError(
        f"(A, B) = ({rational_str(A)}, {rational_str(B)}) cannot be mapped into the "
        f"effective region of Type {fam.value}")


def quartic_coeffs(family, m: float) -> tuple[float, float, float]:
    """(C++, C00, C--) of the quartic Q(xi) = C++ xi^4 + C00 xi^2 + C--."""
    fam = Family.parse(family)
    if fam is Family.I:
        return -m, 2 * m - 1, 1 - m
    if fam is Family.II:
        return m, -(1 + m), 1.0
    return 1 - m, 2 - m, 1.0


def _period(model: ModelParams) -> float:
    return 2.0 * model.K


def is_regular(model: ModelParams) -> bool:
    """True when the potential has no inverse-square singularity at x = 0 mod 2K."""
    A, B = model.a, model.b
    if model.family is Family.III:
        return True
    if model.family is Family.II:
        return B * (B + 1) == 0
    return B * B + A * (A + 1) == 0 and B * (A + 0.5) == 0


def _check_open_interval(model: ModelParams, x: np.ndarray, periodic: bool) -> None:
    if is_regular(model):
        return
    P = _period(model)
    if periodic:
        r = np.mod(x, P)
        bad = np.minimum(r, P - r) <= 1e-14 * P
    else:
        bad = (x <= 0) | (x >= P)
    if np.any(bad):
        raise DomainError(
            f"x = {float(np.asarray(x)[bad][0])!r} is at or beyond a singular endpoint of "
            f"(0, {P!r})")


def potential_value(model: ModelParams, x, periodic: bool = False):
    """V(x) for the model's family.

    With periodic=True Type I/II points outside (0, 2K) are accepted as long as
    they avoid the singular lattice 2K*Z.
    """
    xa = np.asarray(x, dtype=float)
    _check_open_interval(model, np.atleast_1d(xa), periodic)
    sn, cn, dn, _ = ellipj(xa, model.m)
    A, B, m = model.a, model.b, model.m
    if model.family is not Family.III and is_regular(model):
        v = -A * (A + 1) * dn**2 if model.family is Family.II else 0.0 * sn
    elif model.family is Family.I:
        v = ((B * B + A * (A + 1)) * dn**2 - 2 * B * (A + 0.5) * cn) / sn**2
    elif model.family is Family.II:
        v = (B * (B + 1) / sn**2 - A * (A + 1)) * dn**2
    else:
        v = m * ((B * B - A * (A + 1)) * cn**2 + 2 * B * (A + 0.5) * sn * cn)
    return float(v) if np.ndim(v) == 0 else v


def xi_of_x(family, x, m: float):
    """Coordinate xi(x); the Type III pole (cn = 0) is returned as inf."""
    fam = Family.parse(family)
    sn, cn, dn, _ = ellipj(x, m)
    if fam is Family.I:
        return -cn
    if fam is Family.II:
        return -cn / dn
    cn_a = np.asarray(cn, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(np.abs(cn_a) < 1e-15, np.inf, np.asarray(sn) / np.where(cn_a == 0, 1, cn_a))
    return float(out) if np.ndim(out) == 0 else out


# --- algebraization catalog ------------------------------------------------

@dataclass(frozen=True)
class AlgebraizationRow:
    row_id: str
    n: int
    Cpp: float
    C00: float
    Cmm: float
    Cp: complex
    Cm: complex
    C0: complex
    xi1: complex
    xi2: complex
    d: complex
    params: ModelParams = field(repr=False)

    def quartic(self, xi):
        return self.Cpp * xi**4 + self.C00 * xi**2 + self.Cmm


@dataclass(frozen=True)
class _RowSpec:
    family: Family
    spin: Callable[[Number, Number], Number]
    coeffs: Callable[[float, float, float, float], tuple[complex, complex, complex]]
    roots: Callable[[float, float], tuple[complex, complex]]
    overall: Callable[[Number, Number], Number]


HALF = Fraction(1, 2)
_REAL_PAIR = lambda k, kp: (-1.0 + 0j, 1.0 + 0j)  # noqa: E731
_I_PAIR = lambda k, kp: (1j * kp / k, -1j * kp / k)  # noqa: E731
_III_PAIR = lambda k, kp: (1j / kp, -1j / kp)  # noqa: E731
_NONE = lambda A, B: 0  # noqa: E731

# coeffs(A, B, k, kp) -> (C+, C-, C0)
ROW_SPECS: dict[str, _RowSpec] = {
    "1.1": _RowSpec(Family.I, lambda A, B: A,
                    lambda A, B, k, kp: (2 * k * k * B, 2 * kp * kp * B, A),
                    _REAL_PAIR, lambda A, B: B - A),
    "1.2": _RowSpec(Family.I, lambda A, B: A - 1,
                    lambda A, B, k, kp: (2 * k * k * B, 2 * kp * kp * B, A + 1),
                    _REAL_PAIR, lambda A, B: B - A),
    "1.3": _RowSpec(Family.I, lambda A, B: B - 1,
                    lambda A, B, k, kp: (2 * k * k * (A + 0.5) - 1j * k * kp,
                                         2 * kp * kp * (A + 0.5) + 1j * k * kp, B),
                    _I_PAIR, lambda A, B: A - B + 1),
    "1.4": _RowSpec(Family.I, lambda A, B: A - HALF,
                    lambda A, B, k, kp: (2 * k * k * B - 1j * k * kp,
                                         2 * kp * kp * B + 1j * k * kp, A + 0.5),
                    _I_PAIR, lambda A, B: B - A),
    "1.5": _RowSpec(Family.I, lambda A, B: B - HALF,
                    lambda A, B, k, kp: (2 * k * k * (A + 0.5), 2 * kp * kp * (A + 0.5), B - 0.5),
                    _REAL_PAIR, lambda A, B: A - B + 1),
    "1.6": _RowSpec(Family.I, lambda A, B: B - 3 * HALF,
                    lambda A, B, k, kp: (2 * k * k * (A + 0.5), 2 * kp * kp * (A + 0.5), B + 0.5),
                    _REAL_PAIR, lambda A, B: A - B + 1),
    "2.1": _RowSpec(Family.II, lambda A, B: A - HALF,
                    lambda A, B, k, kp: (-2 * k * k * (B + 0.5), 2 * (B + 0.5),
                                         -kp * kp * (A + 0.5)),
                    _REAL_PAIR, _NONE),
    "2.2": _RowSpec(Family.II, lambda A, B: A - HALF,
                    lambda A, B, k, kp: (2 * k * k * (B + 0.5), -2 * (B + 0.5),
                                         -kp * kp * (A + 0.5)),
                    _REAL_PAIR, lambda A, B: -B),
    "3.1": _RowSpec(Family.III, lambda A, B: A,
                    lambda A, B, k, kp: (-2 * kp * kp * B, -2 * B, -A * k * k),
                    _III_PAIR, _NONE),
    "3.2": _RowSpec(Family.III, lambda A, B: A - 1,
                    lambda A, B, k, kp: (-2 * kp * kp * B, -2 * B, -(A + 1) * k * k),
                    _III_PAIR, _NONE),
    "3.3": _RowSpec(Family.III, lambda A, B: A - HALF,
                    lambda A, B, k, kp: (-2 * kp * kp * B + 1j * kp, -2 * B + 1j * kp,
                                         -(A + 0.5) * k * k),
                    _III_PAIR, _NONE),
}

ROW_IDS = tuple(ROW_SPECS)


def _nonneg_int(v: Number) -> int | None:
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 and v >= 0 else None
    r = round(float(v))
    return int(r) if abs(float(v) - r) <= RAT_TOL and r >= 0 else None


def _nonneg(v: Number) -> bool:
    return v >= 0 if isinstance(v, Fraction) else float(v) >= -RAT_TOL


def row_admissible(model: ModelParams, row_id: str) -> bool:
    spec = ROW_SPECS[row_id]
    if spec.family is not model.family:
        return False
    return (_nonneg_int(spec.spin(model.A, model.B)) is not None
            and _nonneg(spec.overall(model.A, model.B)))


def shift_d(row: AlgebraizationRow) -> complex:
    """Additive energy shift d of the gauged Hamiltonian."""
    return _shift(row.params.family, row.n, row.Cp, row.Cm, row.C0, row.params.m)


def _shift(family: Family, n: int, Cp, Cm, C0, m: float) -> complex:
    k2, kp2 = m, 1.0 - m
    if family is Family.I:
        return (C0 / 4 * (C0 - 4 * kp2 * (n + 1)) + Cp / (2 * k2) * (k2 * Cm - kp2 * Cp)
                + n * (n + 2) * kp2 / 2)
    if family is Family.II:
        return (Cp / (2 * math.sqrt(k2))) ** 2 - C0 * (n + 1) / 2 + n * (n + 2) * (1 + k2) / 4
    return ((Cp / math.sqrt(kp2)) ** 2 - n * (n + 2) * (2 - k2) - 2 * C0 * (n + 1)) / 4


def make_row(model: ModelParams, row_id: str, check: bool = True) -> AlgebraizationRow:
    """Build one catalog row; with check=True its restrictions must hold."""
    if row_id not in ROW_SPECS:
        raise ConstraintError(f"unknown row {row_id!r}")
    spec = ROW_SPECS[row_id]
    if spec.family is not model.family:
        raise ConstraintError(f"row {row_id} belongs to Type {spec.family.value}")
    if check and not row_admissible(model, row_id):
        raise ConstraintError(f"row {row_id} restrictions fail for A={rational_str(model.A)}, "
                              f"B={rational_str(model.B)}")
    n = _nonneg_int(spec.spin(model.A, model.B))
    if n is None:
        raise ConstraintError(f"row {row_id} spin is not a non-negative integer")
    k, kp = model.k, model.kp
    Cp, Cm, C0 = (complex(c) for c in spec.coeffs(model.a, model.b, k, kp))
    xi1, xi2 = spec.roots(k, kp)
    Cpp, C00, Cmm = quartic_coeffs(model.family, model.m)
    d = _shift(model.family, n, Cp, Cm, C0, model.m)
    return AlgebraizationRow(row_id, n, Cpp, C00, Cmm, Cp, Cm, C0, complex(xi1), complex(xi2),
                             complex(d), model)


class RowList(list):
    """List of rows; `no_algebraic_sector` is True when nothing qualifies."""

    @property
    def no_algebraic_sector(self) -> bool:
        return len(self) == 0


def catalog_rows(model: ModelParams, rows=None) -> RowList:
    """All admissible rows for the model, or the requested subset ("auto" = all)."""
    if rows in (None, "auto"):
        ids = [r for r in ROW_IDS if row_admissible(model, r)]
    else:
        ids = list(rows)
        for r in ids:
            if r not in ROW_SPECS:
                raise ConstraintError(f"unknown row {r!r}")
            if not row_admissible(model, r):
                raise ConstraintError(f"row {r} is not admissible for this model")
    return RowList(make_row(model, r) for r in ids)


# --- gauge factor ------------------------------------------------------------

_GL16 = np.polynomial.legendre.leggauss(16)
_GL8 = np.polynomial.legendre.leggauss(8)


def base_point(model: ModelParams) -> float:
    """x where xi(x) = 0: K for Type I/II, 0 for Type III."""
    return 0.0 if model.family is Family.III else model.K


def exponent_integrand(row: AlgebraizationRow, x) -> np.ndarray:
    """R(xi)/(2 xi'(x)) as a function of x, written without poles."""
    p = row.params
    sn, cn, dn, _ = ellipj(np.asarray(x, dtype=float), p.m)
    if p.family is Family.I:
        return (row.Cp * cn**2 - row.C0 * cn + row.Cm) / (2 * sn * dn)
    if p.family is Family.II:
        return (row.Cp * cn**2 - row.C0 * cn * dn + row.Cm * dn**2) / (2 * (1 - p.m) * sn)
    return (row.Cp * sn**2 + row.C0 * sn * cn + row.Cm * cn**2) / (2 * dn)


def _gl(f, a: np.ndarray, b: np.ndarray, rule) -> np.ndarray:
    t, w = rule
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    vals = f(mid[:, None] + half[:, None] * t[None, :])
    return half * (vals @ w)


def _segment_integrals(f, a: np.ndarray, b: np.ndarray, tol: float = 1e-13,
                       depth: int = 0) -> np.ndarray:
    fine = _gl(f, a, b, _GL16)
    coarse = _gl(f, a, b, _GL8)
    bad = np.abs(fine - coarse) > tol * (1.0 + np.abs(fine))
    if np.any(bad):
        if depth > 40:
            raise NumericalError(
                f"gauge quadrature did not converge on [{a[bad][0]!r}, {b[bad][0]!r}]")
        ab, bb = a[bad], b[bad]
        mid = 0.5 * (ab + bb)
        fine[bad] = (_segment_integrals(f, ab, mid, tol, depth + 1)
                     + _segment_integrals(f, mid, bb, tol, depth + 1))
    return fine


def _check_gauge_points(row: AlgebraizationRow, x: np.ndarray) -> None:
    p = row.params
    if p.family is not Family.III:
        P = 2 * p.K
        if np.any((x <= 0) | (x >= P)):
            raise DomainError(f"gauge factor needs x inside (0, {P!r})")


def gauge_exponent(row: AlgebraizationRow, x) -> np.ndarray:
    """Integral of the exponent integrand from the base point to each x."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    _check_gauge_points(row, xa)
    x0 = base_point(row.params)
    pts = np.unique(np.append(xa, x0))
    f = lambda s: exponent_integrand(row, s)  # noqa: E731
    seg = _segment_integrals(f, pts[:-1], pts[1:]) if len(pts) > 1 else np.zeros(0, complex)
    cum = np.concatenate([[0j], np.cumsum(seg)])
    cum -= cum[np.searchsorted(pts, x0)]
    out = cum[np.searchsorted(pts, xa)]
    return out.reshape(np.shape(x)) if np.ndim(x) else out[0]


def gauge_mu(row: AlgebraizationRow, x):
    """mu(x) = Q(xi)^(-n/4) exp(int R/(2Q) dxi), with the integral anchored at xi = 0.

    Q^(-n/4) is the positive root, so for Type III and odd n this literal form
    changes sign across the pole of xi; eigenfunction assembly uses the analytic
    continuation instead.
    """
    p = row.params
    xa = np.asarray(x, dtype=float)
    sn, cn, dn, _ = ellipj(xa, p.m)
    n = row.n
    if p.family is Family.I:
        q = np.abs(sn * dn) ** (-n / 2)
    elif p.family is Family.II:
        q = ((1 - p.m) * np.abs(sn) / dn**2) ** (-n / 2)
    else:
        q = np.abs(cn) ** n / dn ** (n / 2)
    return q * np.exp(gauge_exponent(row, xa))


# --- JSON model documents -----------------------------------------------------

def model_from_dict(doc: dict) -> tuple[ModelParams, object]:
    """Parse {"family", "A", "B", "m", "rows"} into (model, rows)."""
    try:
        model = make_model(doc["family"], doc["A"], doc["B"], doc["m"])
    except KeyError as exc:
        raise ConstraintError(f"model document is missing {exc.args[0]!r}") from None
    rows = doc.get("rows", "auto")
    if rows != "auto" and not (isinstance(rows, list) and all(isinstance(r, str) for r in rows)):
        raise ConstraintError("rows must be 'auto' or a list of row ids")
    return model, rows


def load_model_document(path: str) -> tuple[ModelParams, object]:
    with open(path) as fh:
        return model_from_dict(json.load(fh))
