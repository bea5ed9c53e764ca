import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import draw_row
from qes.errors import ConstraintError, DomainError
from qes.fixtures import FIXTURES
from qes.model import make_model, make_row
from qes.recurrence import band_edges, monic_recurrence
from qes.wavefunction import (
    assemble, constant_fit, default_grid, gram_determinant, grid_with_step, normalize, residual,
    residual_samples, to_csv)

RESID = 1e-5


def _model(fx, m):
    return make_model(fx.family, fx.A, fx.B, m)


@pytest.mark.parametrize("fx", FIXTURES, ids=lambda f: f.key)
def test_fixture_matches_assembled_edge(fx):
    m = 0.3
    model = _model(fx, m)
    xs = default_grid(model, 401)
    ref = fx.psi(xs, m)
    E = fx.energy(m)
    best = np.inf
    for rid in fx.rows:
        row = make_row(model, rid)
        for e in band_edges(monic_recurrence(row)):
            if abs(e.energy - E) < 1e-8 * (1 + abs(E)):
                best = min(best, constant_fit(ref, assemble(row, e, xs).psi)[1])
    assert best < 1e-8


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_assembled_edges_solve_equation(seed):
    model, row = draw_row(np.random.default_rng(seed), n_max=3)
    xs = grid_with_step(model, 1e-3)
    for e in band_edges(monic_recurrence(row, crosscheck=False)):
        wf = assemble(row, e, xs)
        assert residual(model, wf).value < RESID
        assert np.max(np.abs(wf.psi)) == pytest.approx(1)


def test_residual_is_fourth_order():
    model = make_model("I", 1, "3/2", 0.5)
    row = make_row(model, "1.2")
    (e,) = band_edges(monic_recurrence(row))
    r1 = residual(model, assemble(row, e, grid_with_step(model, 0.02))).value
    r2 = residual(model, assemble(row, e, grid_with_step(model, 0.01))).value
    assert 12 < r1 / r2 < 20


def test_wrong_energy_has_large_residual():
    model = make_model("III", 1, 0, 0.5)
    xs = default_grid(model)
    row = make_row(model, "3.2")
    (e,) = [e for e in band_edges(monic_recurrence(row)) if abs(e.energy + 0.5) < 1e-9]
    wf = assemble(row, e, xs)
    assert residual_samples(model, xs, wf.psi, e.energy + 0.1).value > 0.05


def test_grid_errors():
    model = make_model("I", 1, "3/2", 0.5)
    row = make_row(model, "1.2")
    (e,) = band_edges(monic_recurrence(row))
    with pytest.raises(DomainError):
        assemble(row, e, [0.0, 0.5])
    with pytest.raises(DomainError):
        assemble(row, e, [0.5, 2 * model.K])
    m3 = make_model("III", 1, 0, 0.5)
    r3 = make_row(m3, "3.2")
    with pytest.raises(DomainError):
        assemble(r3, band_edges(monic_recurrence(r3))[0], [m3.K])
    with pytest.raises(DomainError):
        residual_samples(model, np.linspace(0.5, 1, 5), np.ones(5), 0)
    with pytest.raises(DomainError):
        residual_samples(model, np.r_[np.linspace(0.5, 1, 10), 1.3], np.ones(11), 0)
    with pytest.raises(ConstraintError):
        assemble(make_row(model, "1.1"), e, [0.5])


def test_normalize():
    xs = np.linspace(0, 1, 101)
    psi = -3j * np.sin(np.pi * xs)
    a = normalize(xs, psi)
    assert np.max(np.abs(a)) == pytest.approx(1) and a[50] == pytest.approx(1)
    b = normalize(xs, psi, "unit-L2")
    assert np.sum(np.abs(b) ** 2) * 0.01 == pytest.approx(1)
    assert np.all(normalize(xs, np.zeros(101)) == 0)
    with pytest.raises(ConstraintError):
        normalize(xs, psi, "L1")


def test_gram_and_fit():
    x = np.linspace(0, 1, 200)
    f = np.sin(3 * x) + 0j
    assert gram_determinant(f, 2.5j * f) == pytest.approx(0, abs=1e-14)
    assert gram_determinant(f, np.cos(3 * x)) > 1e-2
    c, dev = constant_fit(2j * f, f)
    assert c == pytest.approx(2j) and dev < 1e-14


def test_csv_layout():
    model = make_model("I", 1, "3/2", 0.5)
    row = make_row(model, "1.2")
    (e,) = band_edges(monic_recurrence(row))
    wf = assemble(row, e, default_grid(model, 11))
    text = to_csv(model, wf, 1.5e-9)
    lines = text.splitlines()
    assert lines[:8] == ["# row_id=1.2", "# E=0+0i", "# m=0.5", "# A=1", "# B=3/2", "# family=I",
                         "# norm=unit-max", "# residual=1.5e-09"]
    assert lines[8] == "x,re_psi,im_psi,V" and len(lines) == 20
    data = np.loadtxt(io.StringIO(text), delimiter=",", comments="#", skiprows=9)
    assert np.allclose(data[:, 0], wf.xs, rtol=1e-14)
    assert np.allclose(data[:, 1], wf.psi.real, atol=1e-14)
