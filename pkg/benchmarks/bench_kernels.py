"""Compiled vs pure-Python kernels: inertia bisection and vectorized Jacobi elliptic functions.

Run: python3 benchmarks/bench_kernels.py [--quick]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from qes import _kernels_py

try:
    from qes import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def _cyclic_operator(N: int, m: float = 0.5):
    from qes.model import make_model
    from qes.oracle import discretize

    op = discretize(make_model("III", 1, 0, m), N, "periodic-2K")
    return op


def _best(fn, repeat: int) -> float:
    out = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t)
    return min(out)


def run(N: int = 4000, points: int = 100_000, count: int = 3, repeat: int = 3) -> list[dict]:
    """Timings per kernel and backend; the backends must agree on the results."""
    op = _cyclic_operator(N)
    lo, hi = -10.0, 10.0
    x = np.linspace(-20, 20, points)
    backends = {"python": _kernels_py}
    if _compiled is not None:
        backends["compiled"] = _compiled
    rows = []
    ref_vals = ref_sn = None
    for name, mod in backends.items():
        vals = mod.bisect_lowest(op.diag, op.offdiag, op.corner, True, count, lo, hi, 1e-12)
        sn = mod.ellipj_array(x, 0.7)[0]
        if ref_vals is None:
            ref_vals, ref_sn = np.asarray(vals), np.asarray(sn)
        else:
            assert np.allclose(vals, ref_vals, rtol=0, atol=1e-9)
            assert np.allclose(sn, ref_sn, rtol=0, atol=1e-13)
        t_bis = _best(lambda: mod.bisect_lowest(op.diag, op.offdiag, op.corner, True, count,
                                                lo, hi, 1e-12), repeat)
        t_ell = _best(lambda: mod.ellipj_array(x, 0.7), repeat)
        rows.append({"backend": name, "bisect_s": t_bis, "ellipj_s": t_ell})
    return rows


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="small sizes for a smoke run")
    a = ap.parse_args(argv)
    kw = dict(N=400, points=2000, repeat=1) if a.quick else {}
    rows = run(**kw)
    print(f"{'backend':<10}{'bisect [s]':>14}{'ellipj [s]':>14}")
    for r in rows:
        print(f"{r['backend']:<10}{r['bisect_s']:>14.4g}{r['ellipj_s']:>14.4g}")
    if len(rows) == 2:
        py, c = rows
        print(f"speedup   {py['bisect_s'] / c['bisect_s']:>14.1f}{py['ellipj_s'] / c['ellipj_s']:>14.1f}")


if __name__ == "__main__":
    main()
