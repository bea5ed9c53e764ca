"""Command-line front end: `qes spectrum|poly|wavefunction|limit|verify`."""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConstraintError, DomainError, NumericalError, QESError
from .model import ModelParams, catalog_rows, make_model, to_rational

EXIT_OK, EXIT_CONSTRAINT, EXIT_NUMERICAL = 0, 2, 3
FORMATS = ("json", "csv")


# --- configuration ---------------------------------------------------------------

@dataclass
class RunConfig:
    family: str = "I"
    A: str = "0"
    B: str = "1/2"
    m: float = 0.5
    rows: object = "auto"
    grid_n: int = 2001
    epsilon: Optional[float] = None
    domain: Optional[list] = None
    format: str = "json"
    path: Optional[str] = None
    precision: int = 15

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        """Parse the nested JSON schema {model, rows, grid, output}."""
        known = {"model", "rows", "grid", "output"}
        extra = set(doc) - known
        if extra:
            raise ConstraintError(f"unknown config keys {sorted(extra)}")
        mdl = doc.get("model", {})
        grid = doc.get("grid", {})
        out = doc.get("output", {})
        cfg = cls(
            family=str(mdl.get("family", cls.family)),
            A=str(mdl.get("A", cls.A)),
            B=str(mdl.get("B", cls.B)),
            m=float(mdl.get("m", cls.m)),
            rows=doc.get("rows", "auto"),
            grid_n=int(grid.get("N", cls.grid_n)),
            epsilon=grid.get("epsilon"),
            domain=grid.get("domain"),
            format=str(out.get("format", cls.format)),
            path=out.get("path"),
            precision=int(out.get("precision", cls.precision)),
        )
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return {
            "model": {"family": self.family, "A": self.A, "B": self.B, "m": self.m},
            "rows": self.rows,
            "grid": {"N": self.grid_n, "epsilon": self.epsilon, "domain": self.domain},
            "output": {"format": self.format, "path": self.path, "precision": self.precision},
        }

    def validate(self) -> None:
        for name in ("A", "B"):
            to_rational(getattr(self, name))
        if self.rows != "auto" and not (isinstance(self.rows, list)
                                        and all(isinstance(r, str) for r in self.rows)):
            raise ConstraintError("rows must be 'auto' or a list of row ids")
        if self.format not in FORMATS:
            raise ConstraintError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.grid_n < 1:
            raise ConstraintError(f"grid N must be positive, got {self.grid_n}")
        if self.domain is not None and (len(self.domain) != 2 or not self.domain[0] < self.domain[1]):
            raise ConstraintError("grid domain must be [lo, hi] with lo < hi")
        if not 1 <= self.precision <= 17:
            raise ConstraintError("precision must lie in 1..17")

    def model(self) -> ModelParams:
        return make_model(self.family, self.A, self.B, self.m)


# --- output helpers --------------------------------------------------------------

def _round(v: float, digits: int):
    if not math.isfinite(v):
        return None
    return float(f"{v:.{digits}g}")


def _plain(obj, digits: int):
    """JSON-ready copy with floats at `digits` significant digits and complex as [re, im]."""
    if isinstance(obj, dict):
        return {str(k): _plain(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v, digits) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_round(obj.real, digits), _round(obj.imag, digits)]
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj), digits)
    return obj


def _fmt(v: float, digits: int) -> str:
    return f"{v:.{digits}g}"


def _cfmt(z: complex, digits: int) -> str:
    im = _fmt(z.imag, digits)
    return f"{_fmt(z.real, digits)}{'' if im.startswith('-') else '+'}{im}i"


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.path:
        with open(cfg.path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(cfg: RunConfig, doc) -> str:
    return json.dumps(_plain(doc, cfg.precision), indent=2, sort_keys=False) + "\n"


# --- commands --------------------------------------------------------------------

def _rows(cfg: RunConfig, model: ModelParams):
    rows = catalog_rows(model, cfg.rows)
    if rows.no_algebraic_sector:
        raise ConstraintError("no admissible algebraization row for these parameters")
    return rows


def cmd_spectrum(cfg: RunConfig) -> int:
    from .recurrence import rows_spectrum, union_levels

    model = cfg.model()
    spectra = rows_spectrum(_rows(cfg, model))
    union = union_levels(spectra)
    if cfg.format == "csv":
        d = cfg.precision
        lines = ["kind,row_id,E,multiplicity"]
        for rid, edges in spectra.items():
            lines += [f"row,{rid},{_cfmt(e.energy, d)},{e.multiplicity_hint}" for e in edges]
        lines += [f"union,{'|'.join(rids)},{_cfmt(E, d)},{len(rids)}" for E, rids in union]
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        doc = {
            "model": model.to_dict(),
            "rows": {rid: [{"energy": e.energy, "multiplicity": e.multiplicity_hint,
                            "residual": e.residual} for e in edges]
                     for rid, edges in spectra.items()},
            "union": [{"energy": E, "rows": rids} for E, rids in union],
        }
        _emit(cfg, _json(cfg, doc))
    return EXIT_OK


def cmd_poly(cfg: RunConfig) -> int:
    from .recurrence import critical_polynomial, monic_recurrence

    model = cfg.model()
    out = []
    for row in _rows(cfg, model):
        rec = monic_recurrence(row)
        out.append({
            "row_id": rec.row_id, "n": rec.n,
            "lambda": list(rec.lam), "rho": list(rec.rho), "omega": list(rec.omega),
            "critical_polynomial": list(critical_polynomial(rec)),
            "mismatch_log": [mm.to_dict() for mm in rec.mismatch_log],
        })
    if cfg.format == "csv":
        d = cfg.precision
        lines = ["row_id,j,lambda,rho,omega"]
        for r in out:
            for j in range(r["n"] + 2):
                lam = _cfmt(r["lambda"][j], d) if j <= r["n"] else ""
                lines.append(f"{r['row_id']},{j},{lam},{_cfmt(r['rho'][j], d)},"
                             f"{_cfmt(r['omega'][j], d)}")
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _emit(cfg, _json(cfg, {"model": model.to_dict(), "rows": out}))
    return EXIT_OK


def cmd_wavefunction(cfg: RunConfig, level: int) -> int:
    from .recurrence import rows_spectrum, union_levels
    from .wavefunction import assemble, default_grid, residual_samples, to_csv

    model = cfg.model()
    rows = {r.row_id: r for r in _rows(cfg, model)}
    spectra = rows_spectrum(rows.values())
    union = union_levels(spectra)
    if not 0 <= level < len(union):
        raise ConstraintError(f"level index {level} out of range 0..{len(union) - 1}")
    E, rids = union[level]
    rid = rids[0]
    edge = min(spectra[rid], key=lambda e: abs(e.energy - E))
    if cfg.domain is not None:
        xs = np.linspace(float(cfg.domain[0]), float(cfg.domain[1]), cfg.grid_n)
    else:
        xs = default_grid(model, cfg.grid_n, cfg.epsilon)
    wf = assemble(rows[rid], edge, xs)
    res = residual_samples(model, xs, wf.psi, wf.energy).value
    if cfg.format == "csv":
        _emit(cfg, to_csv(model, wf, res))
    else:
        doc = {"model": model.to_dict(), "row_id": rid, "energy": wf.energy, "residual": res,
               "norm": wf.norm_convention, "x": wf.xs, "psi": wf.psi}
        _emit(cfg, _json(cfg, doc))
    return EXIT_OK


def cmd_limit(cfg: RunConfig, target: str, depth: int) -> int:
    from .eslimit import default_m_sequence, limit_scan

    res = limit_scan(cfg.family, cfg.A, cfg.B, target, default_m_sequence(target, depth),
                     rows=cfg.rows)
    if cfg.format == "csv":
        _emit(cfg, res.to_csv())
    else:
        doc = {"es_class": res.es_class.tag.value, "target": target, "events": res.events,
               "points": [{"m": p.m, "level_index": p.level_index, "E": p.energy,
                           "E_es": p.es_energy, "es_level": p.es_level, "abs_gap": p.gap}
                          for p in res.points]}
        _emit(cfg, _json(cfg, doc))
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import sweep

    report = sweep(oracle_n=cfg.grid_n)
    report["errata_note"] = ("printed discriminant for the Type II A=3/2 pair does not solve the "
                             "equation; fixtures use sqrt(4m(B+1/2)^2 + (1-m)^2)")
    if cfg.format == "csv":
        d = cfg.precision
        lines = ["key,m,mode,energy_rel_dev,shape_dev,residual_fixture,residual_assembled,passed"]
        for r in report["fixtures"]:
            lines.append(",".join([r["key"], _fmt(r["m"], d), r["mode"],
                                   _fmt(r["energy_rel_dev"], d), _fmt(r["shape_dev"], d),
                                   _fmt(r["residual_fixture"], d),
                                   _fmt(r["residual_assembled"], d), str(r["passed"]).lower()]))
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _emit(cfg, _json(cfg, report))
    return EXIT_OK if report["passed"] else EXIT_NUMERICAL


# --- argument parsing ------------------------------------------------------------

_VALUE_FLAGS = ("-A", "-B", "-m", "--epsilon")
_NEG = re.compile(r"^-[0-9.]")


def join_negative_values(argv: list[str]) -> list[str]:
    """Rewrite `-B -1/2` as `-B=-1/2` so argparse does not read the value as a flag."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv) and _NEG.match(argv[i + 1]):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model and output")
    g.add_argument("-f", "--family", help="I, II or III")
    g.add_argument("-A", help="parameter A, rational string such as 3/2")
    g.add_argument("-B", help="parameter B, rational string such as -1/2")
    g.add_argument("-m", type=float, help="elliptic parameter m = k^2 in (0, 1)")
    g.add_argument("--rows", help="comma-separated row ids or 'auto'")
    g.add_argument("--grid-n", type=int, help="grid size (oracle N for verify)")
    g.add_argument("--epsilon", type=float, help="endpoint offset for Type I/II grids")
    g.add_argument("--out", help="output path (default stdout)")
    g.add_argument("--format", choices=FORMATS, help="output format")
    g.add_argument("--config", help="JSON run configuration")

    p = argparse.ArgumentParser(prog="qes", description="Quasi-exactly solvable elliptic potentials.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="band edges per row and their union")
    sub.add_parser("poly", parents=[common], help="recurrence coefficients and critical polynomial")
    w = sub.add_parser("wavefunction", parents=[common], help="sampled eigenfunction as CSV")
    w.add_argument("--level", type=int, default=0, help="index into the union of levels")
    lim = sub.add_parser("limit", parents=[common], help="convergence scan toward m -> 1 or 0")
    lim.add_argument("--target", choices=("k1", "k0"), default="k1")
    lim.add_argument("--depth", type=int, default=6, help="m-sequence 1-10^-j (or 10^-j), j=1..depth")
    sub.add_parser("verify", parents=[common], help="fixture sweep with oracle and residual checks")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.config:
        with open(args.config) as fh:
            cfg = RunConfig.from_dict(json.load(fh))
    else:
        cfg = RunConfig()
        if args.command == "wavefunction":
            cfg.format = "csv"
    for name, attr in (("family", "family"), ("A", "A"), ("B", "B"), ("m", "m"),
                       ("grid_n", "grid_n"), ("epsilon", "epsilon"), ("out", "path"),
                       ("format", "format")):
        v = getattr(args, name)
        if v is not None:
            setattr(cfg, attr, v)
    if args.rows is not None:
        cfg.rows = "auto" if args.rows == "auto" else [r.strip() for r in args.rows.split(",") if r]
    cfg.validate()
    return cfg


def run(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(join_negative_values(argv))
    cfg = config_from_args(args)
    if args.command == "spectrum":
        return cmd_spectrum(cfg)
    if args.command == "poly":
        return cmd_poly(cfg)
    if args.command == "wavefunction":
        return cmd_wavefunction(cfg, args.level)
    if args.command == "limit":
        return cmd_limit(cfg, args.target, args.depth)
    return cmd_verify(cfg)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        return run(argv)
    except (ConstraintError, DomainError) as exc:
        print(f"qes: error: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except NumericalError as exc:
        print(f"qes: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except QESError as exc:
        print(f"qes: error: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except OSError as exc:
        print(f"qes: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT


if __name__ == "__main__":
    sys.exit(main())
