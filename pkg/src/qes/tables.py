"""Printed closed forms for lambda_j, rho_j and the omega_j step ratio.

These are used only as cross-checks of the derived recurrence.  omega_j is
compared through omega_{j+1}/omega_j, which removes the ambiguous product
limits and any j-independent normalization.
"""
from __future__ import annotations

import math


def _km(m: float):
    return math.sqrt(m), math.sqrt(1 - m), m, 1 - m


def table_lambda(row_id: str, j: int, A: float, B: float, m: float) -> complex:
    k, kp, k2, kp2 = _km(m)
    i = 1j
    s = (1 - 2 * k2)
    if row_id == "1.1":
        return s / 2 * (A * (A + 1) + (A - 2 * j) * (2 * B - A + 2 * j))
    if row_id == "1.2":
        return s / 2 * (A * (A + 1) + (A - 1 - 2 * j) * (2 * B + 2 * j - A + 1))
    if row_id == "1.3":
        return (s / 4 * (2 * B * B - 1 + 2 * (B - 1 - 2 * j) * (2 * j - B + 2))
                + 0.5 * i * k * kp * (2 * A + 1) * (2 * B - 2 * A - 4 * j - 3))
    if row_id == "1.4":
        return (s / 8 * (4 * A * (A + 1) - 1 + (2 * A - 4 * j - 1) * (4 * j - 2 * A + 3))
                + 2 * B * i * k * kp * (A - 2 * j - 1))
    if row_id == "1.5":
        return s / 8 * (4 * B * B - 1 + (2 * B - 4 * j - 1) * (4 * j + 4 * A - 2 * B + 3))
    if row_id == "1.6":
        return s / 8 * (4 * B * B - 1 + (2 * B - 4 * j - 3) * (4 * j + 4 * A - 2 * B + 5))
    if row_id == "2.1":
        return (-k2 / 4 * (2 * B + 1) ** 2 - kp2 / 8 * (2 * A + 1) ** 2
                + (1 + k2) / 8 * (2 * A - 4 * j - 1) * (4 * B - 2 * A + 4 * j + 3))
    if row_id == "2.2":
        return (-k2 / 4 * (2 * B + 1) ** 2 - kp2 / 8 * (2 * A + 1) ** 2
                + (1 + k2) / 8 * (2 * A - 4 * j - 1) * (4 * j - 2 * A - 4 * B - 1))
    if row_id == "3.1":
        return ((2 * j - A) / 2 * ((2 * j - A) * (2 - k2) + 4 * B * i * kp)
                - B * B * kp2 - A * (A + 1) * k2 / 2)
    if row_id == "3.2":
        return ((2 * j - A + 1) / 2 * ((2 * j - A + 1) * (2 - k2) + 4 * B * i * kp)
                - B * B * kp2 - A * (A + 1) * k2 / 2)
    if row_id == "3.3":
        return (((1 + 2 * B * i * kp) / 2) ** 2 - k2 / 8 * (2 * A + 1) ** 2
                + (2 * A - 4 * j - 1) / 8 * ((k2 - 2) * (4 * j - 2 * A + 3) - 8 * B * i * kp))
    raise KeyError(row_id)


def table_rho(row_id: str, j: int, A: float, B: float, m: float) -> complex:
    k, kp, k2, kp2 = _km(m)
    if row_id == "1.1":
        return j * (j - 1 - A) * (2 * j + 2 * B - 1) * (2 * B - 2 * A + 2 * j - 1) / 4
    if row_id == "1.2":
        return j * (j - A) * (2 * j + 2 * B + 1) * (2 * B - 2 * A + 2 * j - 1) / 4
    if row_id == "1.3":
        return j * (j - B) * (2 * j + 1) * (2 * j - 2 * B + 1) / 4
    if row_id == "1.4":
        return j * (2 * j - 2 * A - 1) * (j - A) * (2 * j + 1) / 4
    if row_id == "1.5":
        return j * (j + A) * (2 * j - 2 * B - 1) * (2 * A - 2 * B + 2 * j + 1) / 4
    if row_id == "1.6":
        return j * (2 * j - 2 * B + 1) * (j + A + 1) * (2 * A - 2 * B + 2 * j + 1) / 4
    if row_id == "2.1":
        return (kp2 / 2) ** 2 * j * (2 * j - 2 * A - 1) * (j - A + B) * (2 * j + 2 * B + 1)
    if row_id == "2.2":
        return (kp2 / 2) ** 2 * j * (2 * j - 2 * A - 1) * (j - A - B - 1) * (2 * j - 2 * B - 1)
    if row_id == "3.1":
        return (k2 / 2) ** 2 * j * (j - A - 1) * (2 * j - 1) * (2 * j - 2 * A - 1)
    if row_id in ("3.2", "3.3"):
        return (k2 / 2) ** 2 * j * (j - A) * (2 * j - 2 * A - 1) * (2 * j + 1)
    raise KeyError(row_id)


def table_omega_ratio(row_id: str, j: int, A: float, B: float, m: float) -> complex:
    """omega_{j+1} / omega_j implied by the printed product formulas."""
    k, kp, k2, kp2 = _km(m)
    if row_id in ("1.1", "1.2"):
        return (2 * B - 2 * A + 2 * j + 1) / 2
    if row_id in ("1.3", "1.4"):
        return -(2 * j + 3) / 2
    if row_id in ("1.5", "1.6"):
        return (2 * A - 2 * B + 2 * j + 3) / 2
    if row_id == "2.1":
        return kp2 / 2 * (2 * j + 2 * B + 3)
    if row_id == "2.2":
        return kp2 / 2 * (2 * j + 1 - 2 * B)
    if row_id == "3.1":
        return k2 / 2 * (2 * j + 1)
    if row_id in ("3.2", "3.3"):
        return k2 / 2 * (2 * j + 3)
    raise KeyError(row_id)


def table_omega(row_id: str, j: int, A: float, B: float, m: float) -> complex:
    """omega_j normalized to omega_0 = 1 from the printed step ratios."""
    w = 1 + 0j
    for t in range(j):
        w *= table_omega_ratio(row_id, t, A, B, m)
    return w
