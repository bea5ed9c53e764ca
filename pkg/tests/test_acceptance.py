"""Acceptance criteria 1-8, one PASS/FAIL line each in the terminal summary.

Closed forms below are transcribed here directly (not taken from qes.fixtures)
so energies and shapes are checked against an independent route. Tolerances
are pinned as module constants.
"""
import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from helpers import draw_row
from qes.elliptic import complete_K, ellipj
from qes.eslimit import default_m_sequence, limit_scan
from qes.model import catalog_rows, make_model, make_row
from qes.oracle import (
    dirichlet_estimate, discretize, h_convergence_factor, lowest_eigenvalues, type3_band_edges)
from qes.recurrence import band_edges, eval_critical, monic_recurrence, rows_spectrum, union_levels
from qes.tables import table_lambda, table_rho
from qes.wavefunction import assemble, constant_fit, gram_determinant, grid_with_step

ENERGY_RTOL = 1e-9          # relative, floored at |E| = 1 so E = 0 is meaningful
PER_EXAMPLE_SECONDS = 1.0
RESID_TOL = 1e-5
RESID_H = 1e-3
ORDER_H = (0.02, 0.01)      # h pair for the O(h^4) decay factor
ORDER_BAND = (12.0, 20.0)
TRUNC_TOL = 1e-8
TABLE_RTOL = 1e-9
LIMIT_GAP = 1e-4
LIMIT_DIST = 1e-6
ORACLE_III_TOL = 5e-4
ORACLE_II_TOL = 1e-3
H_FACTOR_BAND = (3.8, 4.2)
ID_TOL = 1e-12
PERIOD_TOL = 1e-10
FD_STEP, FD_TOL = 1e-5, 1e-6
K_TOL = 1e-13
GRAM_MIN = 1e-6
MS = (0.1, 0.5, 0.9)


# --- closed forms ----------------------------------------------------------------

def _kk(m):
    return math.sqrt(m), math.sqrt(1 - m)


def _sq(z):
    return np.sqrt(complex(z))


def _jac(x, m):
    sn, cn, dn, _ = ellipj(np.asarray(x, dtype=float), m)
    return sn, cn, dn


def _phase(num, den):
    # continuous branch of arctan(num/den) along an ordered grid
    return np.unwrap(np.arctan2(num, den))


def _g(m, s):
    return 6 * m - 1 + s * _sq(1 - 36 * m * (1 - m))


def _eta_disc(m, B, printed):
    if printed:
        return _sq(2 * (1 + m * m) * (B + 0.5) ** 2 - (1 - m) ** 2)
    return _sq(4 * m * (B + 0.5) ** 2 + (1 - m) ** 2)


def _e_ii32(m, B, s, printed):
    return (6 * m - 10 - m * (2 * B + 1) ** 2) / 4 + s * _eta_disc(m, B, printed)


def _eta(m, B, s, printed):
    return -(1 + m) * (B + 0.5) + s * _eta_disc(m, B, printed)


def _ii32_phi(B, s, printed):
    def f(x, m):
        sn, cn, dn = _jac(x, m)
        eta = _eta(m, B, s, printed)
        b3 = B + 1.5
        poly = ((1 + m) * b3 + eta) * cn**2 + 2 * b3 * cn * dn + (1 - m) * b3 - eta
        return sn ** (B + 1) / (cn + dn) ** b3 * poly
    return f


def _ii32_psi(B, s, printed):
    def f(x, m):
        sn, cn, dn = _jac(x, m)
        eta = _eta(m, B, s, printed)
        poly = (((1 + m) * (B + 1.5) + eta) * cn**2 + (1 - 2 * B) * cn * dn
                - (1 - m) * (B - 0.5) - (1 + m) * (2 * B + 1) - eta)
        return (cn + dn) ** (B - 0.5) / sn**B * poly
    return f


def _iii_a1(B, s, part):
    def f(x, m):
        sn, cn, dn = _jac(x, m)
        q = _sq(m * m - 16 * (1 - m) * B * B)
        if part == "i":
            poly = (m + s * q) * sn + 4 * B * cn
        else:
            poly = 4 * B * (1 - m) * sn + (m - s * q) * cn
        return poly * np.exp(-B * _phase(sn, cn))
    return f


def _examples():
    """(label, family, A, B, energy(m), psi(x, m), printed-form-is-correct)."""
    ex = []
    ex.append(("I A=0 B=1/2", "I", "0", "1/2", lambda m: 0j,
               lambda x, m: (lambda s, c, d: np.sqrt(s / (1 + c)))(*_jac(x, m)), True))
    ex.append(("I A=0 B=3/2", "I", "0", "3/2", lambda m: 0j,
               lambda x, m: (lambda s, c, d: (s / (1 + c)) ** 1.5)(*_jac(x, m)), True))

    def tw(c, m):
        k, kp = _kk(m)
        return np.exp(-0.5j * np.arctan(k * c / kp))

    ex.append(("I A=1/2 B=1", "I", "1/2", "1",
               lambda m: (1 - 2 * m) / 4 - 1j * math.sqrt(m * (1 - m)),
               lambda x, m: (lambda s, c, d: np.sqrt(s * d) / (1 + c) * tw(c, m))(*_jac(x, m)), True))
    ex.append(("I A=1/2 B=2", "I", "1/2", "2",
               lambda m: (1 - 2 * m) / 4 - 2j * math.sqrt(m * (1 - m)),
               lambda x, m: (lambda s, c, d: np.sqrt(d) * s**1.5 / (1 + c) ** 2 * tw(c, m))(*_jac(x, m)),
               True))
    for lab, s in (("e0", -1), ("e1", 1)):
        ex.append((f"I A=1 B=3/2 {lab}", "I", "1", "3/2",
                   lambda m, s=s: 1 - 4 * m + _g(m, s) / 2,
                   lambda x, m, s=s: (lambda sn, c, d: np.sqrt(sn) / (1 + c) ** 2.5
                                      * (_g(m, s) * c * c + 4 * c + 4 - _g(m, s)))(*_jac(x, m)), True))
    ex.append(("I A=1 B=3/2 e2", "I", "1", "3/2", lambda m: complex(1 - 2 * m),
               lambda x, m: (lambda s, c, d: d * np.sqrt(s) / (1 + c) ** 1.5)(*_jac(x, m)), True))
    for B in (-2.0, -1.0, 0.7):
        e = lambda m, B=B: complex(-(1 - m) / 2 - m * (2 * B + 1) ** 2 / 4)  # noqa: E731
        ex.append((f"II A=1/2 B={B:g} phi", "II", "1/2", B, e,
                   lambda x, m, B=B: (lambda s, c, d: s ** (B + 1) / (c + d) ** (B + 0.5))(*_jac(x, m)),
                   True))
        if B <= 0:
            ex.append((f"II A=1/2 B={B:g} psi", "II", "1/2", B, e,
                       lambda x, m, B=B: (lambda s, c, d: (c + d) ** (B + 0.5) / s**B)(*_jac(x, m)),
                       True))
    for printed in (True, False):
        tag = "printed" if printed else "corrected"
        for B in (-2.0, -1.0, 0.7):
            for lab, s in (("e0", -1), ("e1", 1)):
                e = lambda m, B=B, s=s, p=printed: _e_ii32(m, B, s, p)  # noqa: E731
                ex.append((f"II A=3/2 B={B:g} phi {lab} ({tag})", "II", "3/2", B, e,
                           _ii32_phi(B, s, printed), not printed))
                if B <= 0:
                    ex.append((f"II A=3/2 B={B:g} psi {lab} ({tag})", "II", "3/2", B, e,
                               _ii32_psi(B, s, printed), not printed))
    for B in (1.0, -0.5):
        ex.append((f"III A=0 B={B:g}", "III", "0", B, lambda m, B=B: complex(-B * B * (1 - m)),
                   lambda x, m, B=B: (lambda s, c, d: np.exp(-B * _phase(s, c)))(*_jac(x, m)), True))
        ex.append((f"III A=1/2 B={B:g}", "III", "1/2", B,
                   lambda m, B=B: -m / 2 + ((1 + 2j * B * math.sqrt(1 - m)) / 2) ** 2,
                   lambda x, m, B=B: (lambda s, c, d: np.sqrt(d) * np.exp(
                       -B * _phase(s, c) + 0.5j * _phase(math.sqrt(1 - m) * s, c)))(*_jac(x, m)),
                   True))
    for B in (0.0, 0.1):
        ex.append((f"III A=1 B={B:g} e0", "III", "1", B, lambda m, B=B: complex(-B * B * (1 - m) - m),
                   lambda x, m, B=B: (lambda s, c, d: d * np.exp(-B * _phase(s, c)))(*_jac(x, m)), True))
        for lab, s in (("e1", -1), ("e2", 1)):
            e = lambda m, B=B, s=s: 1 - 1.5 * m - B * B * (1 - m) + s * _sq(m * m - 16 * (1 - m) * B * B) / 2  # noqa: E731
            for part in ("i", "ii"):
                if B == 0 and (s, part) in ((-1, "i"), (1, "ii")):
                    continue  # identically zero at B = 0
                ex.append((f"III A=1 B={B:g} {lab} ({part})", "III", "1", B, e, _iii_a1(B, s, part), True))
    return ex


EXAMPLES = _examples()


def _potential(fam, A, B, x, m):
    sn, cn, dn = _jac(x, m)
    A, B = float(Fraction(A)), float(Fraction(B))
    if fam == "I":
        return ((B * B + A * (A + 1)) * dn**2 - 2 * B * (A + 0.5) * cn) / sn**2
    if fam == "II":
        return (B * (B + 1) / sn**2 - A * (A + 1)) * dn**2
    return m * ((B * B - A * (A + 1)) * cn**2 + 2 * B * (A + 0.5) * sn * cn)


def _grid(fam, m, h):
    K = complete_K(m)
    if fam == "III":
        return -2 * K + (np.arange(int(4 * K / h)) + 1 / 3) * h
    return np.arange(0.25 * K, 1.75 * K, h)   # scored interior, clear of the singular ends


def _residual(fam, A, B, m, xs, psi, E):
    h = xs[1] - xs[0]
    d2 = (-psi[4:] + 16 * psi[3:-1] - 30 * psi[2:-2] + 16 * psi[1:-3] - psi[:-4]) / (12 * h * h)
    mid = psi[2:-2]
    r = -d2 + (_potential(fam, A, B, xs[2:-2], m) - E) * mid
    return float(np.max(np.abs(r)) / np.max(np.abs(mid)))


def _union(fam, A, B, m):
    return [E for E, _ in union_levels(rows_spectrum(catalog_rows(make_model(fam, A, B, m))))]


def _rel(E, target):
    return abs(E - target) / max(abs(target), 1.0)


# --- criterion 1 -----------------------------------------------------------------

def _energy_sweep(examples):
    worst, slow, bad = 0.0, 0.0, []
    for label, fam, A, B, efn, _, _ in examples:
        for m in MS:
            t0 = time.perf_counter()
            got = _union(fam, A, B, m)
            target = complex(efn(m))
            dev = min(_rel(E, target) for E in got)
            slow = max(slow, time.perf_counter() - t0)
            worst = max(worst, dev)
            if dev > ENERGY_RTOL:
                bad.append(f"{label}@m={m}:{dev:.1e}")
    return worst, slow, bad


def test_criterion_1_printed_energies(criterion):
    printed_only = [e for e in EXAMPLES if "corrected" not in e[0]]
    worst, slow, bad = _energy_sweep(printed_only)
    ok = not bad and slow < PER_EXAMPLE_SECONDS
    assert criterion("1", ok, f"all printed energies, m in {MS}: max rel dev {worst:.1e}, "
                              f"slowest {slow:.2f}s, {len(bad)} misses {bad[:4]}")


def test_criterion_1_corrected_discriminant(criterion):
    corrected = [e for e in EXAMPLES if "printed" not in e[0]]
    worst, slow, bad = _energy_sweep(corrected)
    ok = not bad and slow < PER_EXAMPLE_SECONDS
    assert criterion("1 (Type II A=3/2 with sqrt(4m(B+1/2)^2+(1-m)^2))", ok,
                     f"max rel dev {worst:.1e}, slowest {slow:.2f}s, misses {bad}")


def test_criterion_1_suffix_swap(criterion):
    out = {}
    for m in (0.02, 0.98):
        got = sorted(E.real for E in _union("I", 1, "3/2", m))
        e0, e1 = (1 - 4 * m + _g(m, s).real / 2 for s in (-1, 1))
        e2 = 1 - 2 * m
        out[m] = np.max(np.abs(np.array(got) - np.array([e0, e1, e2] if m < 0.5 else [e2, e0, e1])))
    ok = max(out.values()) < 1e-12
    assert criterion("1 (I A=1 B=3/2 ordering across m=1/2)", ok,
                     f"max dev of ascending edges from relabelled forms {max(out.values()):.1e}")


# --- criterion 2 -----------------------------------------------------------------

def _assembled(fam, A, B, m, xs):
    model = make_model(fam, A, B, m)
    for row in catalog_rows(model):
        for e in band_edges(monic_recurrence(row)):
            yield row.row_id, e.energy, assemble(row, e, xs).psi


def _residual_sweep(examples):
    worst, worst_asm, bad, order = 0.0, 0.0, [], []
    t0 = time.perf_counter()
    done = set()
    for label, fam, A, B, efn, psi, _ in examples:
        for m in MS:
            xs = _grid(fam, m, RESID_H)
            r = _residual(fam, A, B, m, xs, psi(xs, m), complex(efn(m)))
            worst = max(worst, r)
            if r > RESID_TOL:
                bad.append(f"{label}@m={m}:{r:.1e}")
            if m == 0.5:
                r1, r2 = (_residual(fam, A, B, m, g, psi(g, m), complex(efn(m)))
                          for g in (_grid(fam, m, h) for h in ORDER_H))
                order.append(r1 / r2)
            if (fam, A, B, m) in done:
                continue
            done.add((fam, A, B, m))
            for rid, E, p in _assembled(fam, A, B, m, xs):
                r = _residual(fam, A, B, m, xs, p, E)
                worst_asm = max(worst_asm, r)
                if r > RESID_TOL:
                    bad.append(f"assembled {fam} {A} {B} row {rid}@m={m}:{r:.1e}")
                if m == 0.5:
                    g1, g2 = (_grid(fam, m, h) for h in ORDER_H)
                    ps = dict(((r_, E_), p_) for r_, E_, p_ in _assembled(fam, A, B, m, g1))
                    ps2 = dict(((r_, E_), p_) for r_, E_, p_ in _assembled(fam, A, B, m, g2))
                    order.append(_residual(fam, A, B, m, g1, ps[(rid, E)], E)
                                 / _residual(fam, A, B, m, g2, ps2[(rid, E)], E))
    return worst, worst_asm, bad, order, time.perf_counter() - t0


def test_criterion_2_printed_residuals(criterion):
    printed_only = [e for e in EXAMPLES if "corrected" not in e[0]]
    worst, worst_asm, bad, order, dt = _residual_sweep(printed_only)
    in_band = all(ORDER_BAND[0] <= f <= ORDER_BAND[1] for f in order)
    ok = not bad and in_band and dt < 10
    assert criterion("2", ok, f"printed max {worst:.1e}, assembled max {worst_asm:.1e} at h={RESID_H}; "
                              f"h^4 factors {min(order):.1f}..{max(order):.1f}; {dt:.1f}s; "
                              f"{len(bad)} over {RESID_TOL:g}: {bad[:3]}")


def test_criterion_2_corrected_residuals(criterion):
    corrected = [e for e in EXAMPLES if "printed" not in e[0]]
    worst, worst_asm, bad, order, dt = _residual_sweep(corrected)
    in_band = all(ORDER_BAND[0] <= f <= ORDER_BAND[1] for f in order)
    ok = not bad and in_band and dt < 10
    assert criterion("2 (Type II A=3/2 with corrected discriminant)", ok,
                     f"closed forms max {worst:.1e}, assembled max {worst_asm:.1e}; h^4 factors "
                     f"{min(order):.1f}..{max(order):.1f}; {dt:.1f}s; over tolerance: {bad[:3]}")


# --- criterion 3 -----------------------------------------------------------------

def test_criterion_3_truncation(criterion):
    rng = np.random.default_rng(20240601)
    worst, bad = 0.0, 0
    for _ in range(100):
        _, row = draw_row(rng)
        rec = monic_recurrence(row, crosscheck=False)
        if rec.rho[0] != 0 or rec.rho[rec.n + 1] != 0:
            bad += 1
        for e in band_edges(rec):
            p, _, scale = eval_critical(rec, e.energy)
            worst = max(worst, abs(p) / scale)
    ok = bad == 0 and worst < TRUNC_TOL
    assert criterion("3", ok, f"100 draws: {bad} nonzero end rho, max |P_(n+1)|/scale {worst:.1e}")


# --- criterion 4 -----------------------------------------------------------------

ALL_ROWS = ("1.1", "1.2", "1.3", "1.4", "1.5", "1.6", "2.1", "2.2", "3.1", "3.2", "3.3")


def test_criterion_4_table_crosscheck(criterion):
    rng = np.random.default_rng(4)
    unlogged_bad, logged, malformed = [], set(), 0
    for rid in ALL_ROWS:
        for _ in range(50):
            model, row = draw_row(rng, rid)
            rec = monic_recurrence(row)
            log = {(mm.quantity, mm.j) for mm in rec.mismatch_log}
            for mm in rec.mismatch_log:
                if mm.row_id != rid or not (np.isfinite(mm.derived) and np.isfinite(mm.table)):
                    malformed += 1
                logged.add((rid, mm.quantity))
            A, B, m = float(model.A), float(model.B), model.m
            for j in range(rec.n + 1):
                for q, d, t in (("lambda", rec.lam[j], table_lambda(rid, j, A, B, m)),
                                ("rho", rec.rho[j], table_rho(rid, j, A, B, m))):
                    close = abs(d - t) <= TABLE_RTOL * max(abs(d), abs(t), 1e-300) or abs(d - t) < 1e-13
                    if not close and (q, j) not in log:
                        unlogged_bad.append((rid, q, j))
    ok = not unlogged_bad and malformed == 0
    assert criterion("4", ok, f"550 draws; logged (row, quantity): {sorted(logged)}; "
                              f"unlogged disagreements {unlogged_bad[:3]}")


def test_criterion_4_logged_offset(criterion):
    rng = np.random.default_rng(44)
    worst = 0.0
    for _ in range(50):
        model, row = draw_row(rng, "1.3")
        A, k, kp = float(model.A), math.sqrt(model.m), math.sqrt(1 - model.m)
        for mm in monic_recurrence(row).mismatch_log:
            worst = max(worst, abs(mm.derived - mm.table - 1j * k * kp * A * (2 * A + 1)))
    ok = worst < 1e-9
    assert criterion("4 (row 1.3 lambda entries differ by i k k' A(2A+1))", ok, f"max residual {worst:.1e}")


# --- criterion 5 -----------------------------------------------------------------

LIMIT_CASES = ([("I", A, B, t) for A, B in (("0", "1/2"), ("0", "3/2"), ("1/2", "1"), ("1/2", "2"),
                                             ("1", "3/2")) for t in ("k1", "k0")]
               + [("II", "1/2", "-1", "k1"), ("II", "3/2", "-2", "k1")]
               + [("III", A, B, "k1") for A, B in (("0", "1"), ("1/2", "1"), ("1", "1/10"))])


def _es_energy_local(fam, target, A, B, r):
    A, B = float(Fraction(A)), float(Fraction(B))
    if fam == "I" and target == "k0":
        return (A - r) ** 2
    if fam == "II":
        return -((A + B - 2 * r) ** 2)
    return -((A - r) ** 2)


def _scan_gaps(depth):
    out, t0 = {}, time.perf_counter()
    for fam, A, B, t in LIMIT_CASES:
        res = limit_scan(fam, A, B, t, default_m_sequence(t, depth))
        last = res.ms[-1]
        gaps = [abs(p.energy - _es_energy_local(fam, t, A, B, p.es_level))
                for p in res.points if p.m == last]
        out[(fam, A, B, t)] = (last, max(gaps))
    return out, time.perf_counter() - t0


def test_criterion_5_es_limits(criterion):
    # the largest gap inside the window sits at its far edge, m = 1 - 1e-6 (or 1e-6)
    out, dt = _scan_gaps(6)
    bad = {k: f"{v[1]:.1e}" for k, v in out.items() if v[1] >= LIMIT_GAP}
    ok = not bad and dt < 30
    assert criterion("5", ok, f"gap < {LIMIT_GAP:g} at distance {LIMIT_DIST:g}: {len(out) - len(bad)}/"
                              f"{len(out)} pass, {dt:.1f}s; failing {bad}")


def test_criterion_5_real_energy_cases(criterion):
    out, dt = _scan_gaps(6)
    complex_cases = {("I", "1/2", "1"), ("I", "1/2", "2"), ("III", "1/2", "1")}
    real = {k: v for k, v in out.items() if k[:3] not in complex_cases}
    worst = max(v[1] for v in real.values())
    assert criterion("5 (cases with real limiting edges)", worst < LIMIT_GAP,
                     f"{len(real)} scans, max final gap {worst:.1e}")


def test_criterion_5_deeper_scan(criterion):
    out, dt = _scan_gaps(10)
    worst = max(v[1] for v in out.values())
    assert criterion("5 (m-sequence to distance 1e-10)", worst < LIMIT_GAP and dt < 30,
                     f"max final gap {worst:.1e}, {dt:.1f}s")


def test_criterion_5_monotone_tail(criterion):
    bad = []
    for fam, A, B, t in LIMIT_CASES:
        res = limit_scan(fam, A, B, t)
        for i in res.levels():
            g = res.gaps(i)[-5:]
            if max(g) > 1e-13 and any(b > a for a, b in zip(g, g[1:])):
                bad.append((fam, A, B, t, i))
    assert criterion("5 (gap monotone over last 5 points)", not bad, f"non-monotone: {bad}")


# --- criterion 6 -----------------------------------------------------------------

def test_criterion_6_type3_oracle(criterion):
    t0 = time.perf_counter()
    model = make_model("III", 1, 0, 0.5)
    fd = type3_band_edges(model, count=3, N=4000)
    alg = sorted(E.real for E in _union("III", 1, 0, 0.5))
    dev = float(np.max(np.abs(fd - np.array(alg))))
    # halving from N=2000 to the N=4000 grid used above
    f = h_convergence_factor(model, "periodic-2K", [-0.5], N=2000)
    f += h_convergence_factor(model, "antiperiodic-2K", [0.0, 0.5], N=2000)
    in_band = all(H_FACTOR_BAND[0] <= v <= H_FACTOR_BAND[1] for v in f)
    dt = time.perf_counter() - t0
    ok = dev < ORACLE_III_TOL and in_band and dt < 60
    assert criterion("6a", ok, f"III A=1 B=0 m=0.5: FD {np.round(fd, 7).tolist()} vs {alg}, max dev {dev:.1e}; "
                               f"h-halving factors {[round(v, 3) for v in f]}; {dt:.1f}s")


def test_criterion_6_type2_dirichlet(criterion):
    t0 = time.perf_counter()
    est = dirichlet_estimate(make_model("II", "1/2", -1, 0.5), count=1)["estimate"][0]
    dt = time.perf_counter() - t0
    ok = abs(est + 0.375) < ORACLE_II_TOL and dt < 60
    assert criterion("6b", ok, f"II A=1/2 B=-1 m=0.5 truncated Dirichlet + Richardson: {est:.6f} "
                               f"vs -0.375; {dt:.1f}s")


def test_criterion_6_type2_antiperiodic(criterion):
    model = make_model("II", "1/2", -1, 0.5)
    a = lowest_eigenvalues(discretize(model, 2000, "antiperiodic-4K"), 1)[0]
    b = lowest_eigenvalues(discretize(model, 4000, "antiperiodic-4K"), 1)[0]
    est = (4 * b - a) / 3
    assert criterion("6b (antiperiodic over 4K instead)", abs(est + 0.375) < ORACLE_II_TOL,
                     f"Richardson {est:.7f} vs -0.375")


# --- criterion 7 -----------------------------------------------------------------

def test_criterion_7_special_functions(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(77)
    xs = rng.uniform(-50, 50, 10_000)
    ms = rng.uniform(0, 1, 10_000)
    ident = period = deriv = 0.0
    h = FD_STEP
    for x, m in zip(xs, ms):
        K = complete_K(m)
        sn, cn, dn, _ = ellipj(np.array([x, x + 2 * K, x - h, x + h]), m)
        ident = max(ident, abs(sn[0] ** 2 + cn[0] ** 2 - 1), abs(dn[0] ** 2 + m * sn[0] ** 2 - 1))
        period = max(period, abs(sn[1] + sn[0]), abs(cn[1] + cn[0]), abs(dn[1] - dn[0]))
        deriv = max(deriv,
                    abs((sn[3] - sn[2]) / (2 * h) - cn[0] * dn[0]),
                    abs((cn[3] - cn[2]) / (2 * h) + sn[0] * dn[0]),
                    abs((dn[3] - dn[2]) / (2 * h) + m * sn[0] * cn[0]))
    mpmath.mp.dps = 40
    Kref = float(mpmath.pi / (2 * mpmath.agm(1, mpmath.sqrt(mpmath.mpf("0.5")))))
    kdev = abs(complete_K(0.5) - Kref) / Kref
    dt = time.perf_counter() - t0
    ok = ident < ID_TOL and period < PERIOD_TOL and deriv < FD_TOL and kdev < K_TOL and dt < 5
    assert criterion("7", ok, f"10^4 points: identities {ident:.1e}, periodicity {period:.1e}, "
                              f"derivatives {deriv:.1e}; K(0.5) rel dev {kdev:.1e}; {dt:.1f}s")


# --- criterion 8 -----------------------------------------------------------------

def test_criterion_8a_type3_partners(criterion):
    m, B = 0.9, 0.1
    xs = _grid("III", m, RESID_H)
    lines, ok = [], True
    for lab, s in (("e1", -1), ("e2", 1)):
        E = 1 - 1.5 * m - B * B * (1 - m) + s * _sq(m * m - 16 * (1 - m) * B * B) / 2
        fi, fii = _iii_a1(B, s, "i")(xs, m), _iii_a1(B, s, "ii")(xs, m)
        ri = _residual("III", 1, B, m, xs, fi, E)
        rii = _residual("III", 1, B, m, xs, fii, E)
        gram = gram_determinant(fi, fii)
        ok &= max(ri, rii) <= RESID_TOL and gram > GRAM_MIN
        lines.append(f"{lab}: residuals {ri:.1e}/{rii:.1e}, Gram {gram:.1e}")
    assert criterion("8a", ok, f"III A=1 B=0.1 m=0.9; " + "; ".join(lines))


def _row22_check(A, printed):
    worst_e = worst_fit = worst_r = 0.0
    min_gram = math.inf
    for B in (-2.0, -1.0):
        for m in MS:
            model = make_model("II", A, B, m)
            xs = _grid("II", m, RESID_H)
            rec = monic_recurrence(make_row(model, "2.2"))
            edges = band_edges(rec)
            if A == "1/2":
                targets = [(complex(-(1 - m) / 2 - m * (2 * B + 1) ** 2 / 4),
                            (lambda x, B=B: (lambda s, c, d: (c + d) ** (B + 0.5) / s**B)(*_jac(x, m))),
                            (lambda x, B=B: (lambda s, c, d: s ** (B + 1) / (c + d) ** (B + 0.5))(*_jac(x, m))))]
            else:
                targets = [(_e_ii32(m, B, s, printed), (lambda x, f=_ii32_psi(B, s, printed): f(x, m)),
                            (lambda x, f=_ii32_phi(B, s, printed): f(x, m))) for s in (-1, 1)]
            for E, psi, phi in targets:
                e = min(edges, key=lambda e: abs(e.energy - E))
                worst_e = max(worst_e, _rel(e.energy, E))
                ref = psi(xs)
                worst_r = max(worst_r, _residual("II", A, B, m, xs, ref, E))
                worst_fit = max(worst_fit, constant_fit(ref, assemble(make_row(model, "2.2"), e, xs).psi)[1])
                min_gram = min(min_gram, gram_determinant(ref, phi(xs)))
    ok = worst_e < ENERGY_RTOL and worst_fit < 1e-8 and worst_r < RESID_TOL and min_gram > GRAM_MIN
    return ok, (f"energy dev {worst_e:.1e}, shape dev {worst_fit:.1e}, residual {worst_r:.1e}, "
                f"min Gram vs 2.1 partner {min_gram:.1e}")


def test_criterion_8b_row22_half(criterion):
    ok, detail = _row22_check("1/2", True)
    assert criterion("8b (A=1/2)", ok, "B in {-2,-1}: " + detail)


def test_criterion_8b_row22_three_halves_printed(criterion):
    ok, detail = _row22_check("3/2", True)
    assert criterion("8b (A=3/2 as printed)", ok, "B in {-2,-1}: " + detail)


def test_criterion_8b_row22_three_halves_corrected(criterion):
    ok, detail = _row22_check("3/2", False)
    assert criterion("8b (A=3/2, corrected discriminant)", ok, "B in {-2,-1}: " + detail)
