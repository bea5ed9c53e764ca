"""Closed-form reference eigenstates used as golden fixtures.

Each fixture names a model, an energy formula E(m) and an eigenfunction
psi(x, m).  For the Type II A = 3/2 pair two discriminants are kept: the
as-printed one (`printed_energy`) and the one that actually solves the
Schrodinger equation; `energy` always holds the latter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .elliptic import ellipj

F = Fraction
EnergyFn = Callable[[float], complex]
PsiFn = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class Fixture:
    key: str
    family: str
    A: Fraction
    B: object
    energy: EnergyFn
    psi: PsiFn
    rows: tuple[str, ...]
    printed_energy: Optional[EnergyFn] = None
    complex_energy: bool = False
    real_when: Callable[[float], bool] = lambda m: True
    group: str = ""


def _k(m: float):
    return math.sqrt(m), math.sqrt(1 - m)


def _cont_angle(num: np.ndarray, den: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """arctan(num/den) on the branch continuous with the reference angle ref."""
    a = np.arctan2(num, den)
    return ref + np.angle(np.exp(1j * (a - ref)))


def _cpd(c: np.ndarray, d: np.ndarray, s: np.ndarray, m: float) -> np.ndarray:
    """cn + dn without cancellation where cn is close to -dn."""
    with np.errstate(divide="ignore", invalid="ignore"):
        alt = (1 - m) * s * s / (d - c)
    return np.where(c < 0, alt, c + d)


def _one_plus_cd(c: np.ndarray, d: np.ndarray, s: np.ndarray, m: float) -> np.ndarray:
    """1 + cn dn without cancellation where cn dn is close to -1."""
    cd = c * d
    with np.errstate(divide="ignore", invalid="ignore"):
        alt = s * s * (1 + m - m * s * s) / (1 - cd)
    return np.where(cd < 0, alt, 1 + cd)


def _type1(m: float):
    k, kp = _k(m)
    g = lambda s: 6 * m - 1 + s * np.sqrt(complex(1 - 36 * m * (1 - m)))  # noqa: E731
    return k, kp, g


def _type2_pair(m: float, B: float, sign: int, printed: bool):
    k2, kp2 = m, 1 - m
    if printed:
        disc = np.sqrt(complex(2 * (1 + k2 * k2) * (B + 0.5) ** 2 - kp2 * kp2))
    else:
        disc = np.sqrt(complex(4 * k2 * (B + 0.5) ** 2 + kp2 * kp2))
    E = (6 * k2 - 10 - k2 * (2 * B + 1) ** 2) / 4 + sign * disc
    eta = -(1 + k2) * (B + 0.5) + sign * disc
    return E, eta


def _build() -> list[Fixture]:
    out: list[Fixture] = []

    def ej(x, m):
        return ellipj(np.asarray(x, dtype=float), m)

    out.append(Fixture(
        "I:A=0,B=1/2", "I", F(0), F(1, 2), lambda m: 0j,
        lambda x, m: (lambda s, c, d, a: np.sqrt(s / (1 + c)) + 0j)(*ej(x, m)),
        ("1.1", "1.5"), group="I-a0-b1/2"))
    out.append(Fixture(
        "I:A=0,B=3/2", "I", F(0), F(3, 2), lambda m: 0j,
        lambda x, m: (lambda s, c, d, a: (s / (1 + c)) ** 1.5 + 0j)(*ej(x, m)),
        ("1.1",), group="I-a0-b3/2"))

    def twist(c, m):
        k, kp = _k(m)
        return np.exp(-0.5j * np.arctan(k * c / kp))

    out.append(Fixture(
        "I:A=1/2,B=1", "I", F(1, 2), F(1),
        lambda m: (1 - 2 * m) / 4 - 1j * math.sqrt(m * (1 - m)),
        lambda x, m: (lambda s, c, d, a: np.sqrt(s * d) / (1 + c) * twist(c, m))(*ej(x, m)),
        ("1.3", "1.4"), complex_energy=True, real_when=lambda m: False, group="I-a1/2-b1"))
    out.append(Fixture(
        "I:A=1/2,B=2", "I", F(1, 2), F(2),
        lambda m: (1 - 2 * m) / 4 - 2j * math.sqrt(m * (1 - m)),
        lambda x, m: (lambda s, c, d, a: np.sqrt(d) * s**1.5 / (1 + c) ** 2 * twist(c, m))(*ej(x, m)),
        ("1.4",), complex_energy=True, real_when=lambda m: False, group="I-a1/2-b2"))

    real35 = lambda m: 36 * m * (1 - m) <= 1  # noqa: E731
    for label, s in (("e0", -1), ("e1", 1)):
        out.append(Fixture(
            f"I:A=1,B=3/2:{label}", "I", F(1), F(3, 2),
            lambda m, s=s: 1 - 4 * m + _type1(m)[2](s) / 2,
            lambda x, m, s=s: (lambda sn, c, d, a, g=_type1(m)[2](s):
                               np.sqrt(sn) / (1 + c) ** 2.5 * (g * c * c + 4 * c + 4 - g))(*ej(x, m)),
            ("1.1", "1.5"), complex_energy=True, real_when=real35, group="I-a1-b3/2"))
    out.append(Fixture(
        "I:A=1,B=3/2:e2", "I", F(1), F(3, 2), lambda m: complex(1 - 2 * m),
        lambda x, m: (lambda s, c, d, a: d * np.sqrt(s) / (1 + c) ** 1.5 + 0j)(*ej(x, m)),
        ("1.2", "1.6"), group="I-a1-b3/2"))

    for B in (F(-2), F(-1), 0.7):
        b = float(B)
        e = lambda m, b=b: complex(-(1 - m) / 2 - m * (2 * b + 1) ** 2 / 4)  # noqa: E731
        out.append(Fixture(
            f"II:A=1/2,B={B}:phi", "II", F(1, 2), B, e,
            lambda x, m, b=b: (lambda s, c, d, a: s ** (b + 1) / _cpd(c, d, s, m) ** (b + 0.5) + 0j)(*ej(x, m)),
            ("2.1",), group=f"II-a1/2-b{B}"))
        if b <= 0:
            out.append(Fixture(
                f"II:A=1/2,B={B}:psi", "II", F(1, 2), B, e,
                lambda x, m, b=b: (lambda s, c, d, a: _cpd(c, d, s, m) ** (b + 0.5) / s**b + 0j)(*ej(x, m)),
                ("2.2",), group=f"II-a1/2-b{B}"))

    for B in (F(-2), F(-1), 0.7):
        b = float(B)
        for label, s in (("e0", -1), ("e1", 1)):
            energy = lambda m, b=b, s=s: _type2_pair(m, b, s, False)[0]  # noqa: E731
            printed = lambda m, b=b, s=s: _type2_pair(m, b, s, True)[0]  # noqa: E731

            def phi(x, m, b=b, s=s):
                sn, c, d, a = ej(x, m)
                eta = _type2_pair(m, b, s, False)[1]
                # quadratic in cn, dn rewritten with cn^2 = 1 - sn^2
                poly = 2 * (b + 1.5) * _one_plus_cd(c, d, sn, m) - ((1 + m) * (b + 1.5) + eta) * sn**2
                return sn ** (b + 1) / _cpd(c, d, sn, m) ** (b + 1.5) * poly

            def psi(x, m, b=b, s=s):
                sn, c, d, a = ej(x, m)
                eta = _type2_pair(m, b, s, False)[1]
                poly = (1 - 2 * b) * _one_plus_cd(c, d, sn, m) - ((1 + m) * (b + 1.5) + eta) * sn**2
                return _cpd(c, d, sn, m) ** (b - 0.5) / sn**b * poly

            out.append(Fixture(f"II:A=3/2,B={B}:phi:{label}", "II", F(3, 2), B, energy, phi,
                               ("2.1",), printed_energy=printed, group=f"II-a3/2-b{B}"))
            if b <= 0:
                out.append(Fixture(f"II:A=3/2,B={B}:psi:{label}", "II", F(3, 2), B, energy, psi,
                                   ("2.2",), printed_energy=printed, group=f"II-a3/2-b{B}"))

    for B in (F(1), F(-1, 2)):
        b = float(B)
        out.append(Fixture(
            f"III:A=0,B={B}", "III", F(0), B, lambda m, b=b: complex(-b * b * (1 - m)),
            lambda x, m, b=b: (lambda s, c, d, a: np.exp(-b * a) + 0j)(*ej(x, m)),
            ("3.1",), group=f"III-a0-b{B}"))
        out.append(Fixture(
            f"III:A=1/2,B={B}", "III", F(1, 2), B,
            lambda m, b=b: -m / 2 + ((1 + 2j * b * math.sqrt(1 - m)) / 2) ** 2,
            lambda x, m, b=b: (lambda s, c, d, a: np.sqrt(d) * np.exp(
                -b * a + 0.5j * _cont_angle(math.sqrt(1 - m) * s, c, a)))(*ej(x, m)),
            ("3.3",), complex_energy=b != 0, real_when=lambda m, b=b: b == 0,
            group=f"III-a1/2-b{B}"))

    for B in (F(0), F(1, 10)):
        b = float(B)
        real310 = lambda m, b=b: m * m >= 16 * (1 - m) * b * b  # noqa: E731
        out.append(Fixture(
            f"III:A=1,B={B}:e0", "III", F(1), B, lambda m, b=b: complex(-b * b * (1 - m) - m),
            lambda x, m, b=b: (lambda s, c, d, a: d * np.exp(-b * a) + 0j)(*ej(x, m)),
            ("3.2",), group=f"III-a1-b{B}"))
        for label, s in (("e1", -1), ("e2", 1)):
            sq = lambda m, b=b: np.sqrt(complex(m * m - 16 * (1 - m) * b * b))  # noqa: E731
            energy = lambda m, b=b, s=s, sq=sq: 1 - 1.5 * m - b * b * (1 - m) + s * sq(m) / 2
            for part in ("i", "ii"):
                if b == 0 and (s, part) in ((-1, "i"), (1, "ii")):
                    continue  # this partner vanishes identically at B = 0
                def fn(x, m, b=b, s=s, sq=sq, part=part):
                    sn, c, d, a = ej(x, m)
                    q = sq(m)
                    if part == "i":
                        poly = (m + s * q) * sn + 4 * b * c
                    else:
                        poly = 4 * b * (1 - m) * sn + (m - s * q) * c
                    return poly * np.exp(-b * a)
                out.append(Fixture(f"III:A=1,B={B}:{label}:{part}", "III", F(1), B, energy, fn,
                                   ("3.1",), complex_energy=b != 0, real_when=real310,
                                   group=f"III-a1-b{B}"))
    return out


FIXTURES: tuple[Fixture, ...] = tuple(_build())


def by_key(key: str) -> Fixture:
    for f in FIXTURES:
        if f.key == key:
            return f
    raise KeyError(key)
