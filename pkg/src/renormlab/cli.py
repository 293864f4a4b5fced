"""Command-line entry point.

Subcommands: ``solve``, ``sweep``, ``limit``, ``julia`` and ``verify``.
Settings come from flags, optionally layered over a flat JSON config file
(``--config``); flags win.  Exit codes: 0 success, 2 numeric failure,
3 invalid input, 4 structural failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import complexdyn, limit, renorm
from .combinatorics import OrderType, validate_admissible
from .errors import CombinatoricsError, RenormError, ValidationError
from .invariants import check_solution

EXIT_OK, EXIT_NUMERIC, EXIT_INVALID, EXIT_STRUCTURE = 0, 2, 3, 4

DEFAULTS = {
    "type": "pd",
    "ell": 2.0,
    "ells": "2,4,8,16,32,64,128",
    "degree": 64,
    "tol": 1e-11,
    "precision": None,
    "a": complexdyn.DEFAULT_A,
    "c": complexdyn.DEFAULT_C,
    "viewport": None,
    "width": 200,
    "height": 160,
    "budget": 2000,
}


def _float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).replace("[", "").replace("]", "").split(",") if v.strip()]


class _Parser(argparse.ArgumentParser):
    """Usage errors map to the invalid-input exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="renormlab", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="flat JSON file with default settings")
    sub = parser.add_subparsers(dest="command", required=True)

    def numeric(p):
        p.add_argument("--type", dest="type", help='order type, "pd" or e.g. "[2,3,1]"')
        p.add_argument("--degree", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--precision", choices=["double", "dd", "auto"])

    p = sub.add_parser("solve", help="solve one fixed point")
    numeric(p)
    p.add_argument("--ell", type=float)
    p.add_argument("--out", help="solution JSON path (default: stdout)")

    p = sub.add_parser("sweep", help="continuation over a list of ell values")
    numeric(p)
    p.add_argument("--ells", help="comma-separated increasing ell values")
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = sub.add_parser("limit", help="sweep and extrapolate the large-ell limit")
    numeric(p)
    p.add_argument("--ells")
    p.add_argument("--out", help="estimate JSON path (default: stdout)")
    p.add_argument("--diagnostics", help="per-ell diagnostics CSV path")

    p = sub.add_parser("julia", help="render the Julia set of exp(-c (z-a)^-2)")
    p.add_argument("--a", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--viewport", help="xmin,xmax,ymin,ymax")
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--out", help="PGM path", required=False)

    p = sub.add_parser("verify", help="check the invariants of a stored solution")
    p.add_argument("solution", help="solution JSON file")
    p.add_argument("--max-residual", dest="max_residual", type=float, default=1e-10,
                   help="bound on the functional-equation defect")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ValidationError("config file must hold a flat JSON object")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if value is not None:
            cfg[key] = value
    if cfg.get("precision") is None and "RENORM_PRECISION" in os.environ:
        cfg["precision"] = os.environ["RENORM_PRECISION"]
    if cfg.get("precision") not in (None, "double", "dd", "auto"):
        raise ValidationError(f"precision must be double or dd, got {cfg['precision']!r}")
    if not 1e-14 <= float(cfg["tol"]) <= 1e-6:
        raise ValidationError("tol must lie in [1e-14, 1e-6]")
    if not 16 <= int(cfg["degree"]) <= 128:
        raise ValidationError("degree must lie in [16, 128]")
    for key in ("out", "diagnostics"):
        _check_writable(cfg.get(key))
    return cfg


def _check_writable(path: str | None) -> None:
    if not path:
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise ValidationError(f"output path {path} is not writable")


def _emit(path: str | None, data, binary: bool = False) -> None:
    if path is None:
        if binary:
            sys.stdout.buffer.write(data)
        else:
            sys.stdout.write(data if data.endswith("\n") else data + "\n")
        return
    Path(path).write_bytes(data) if binary else Path(path).write_text(data)


def _order_type(cfg) -> OrderType:
    t = cfg["type"] if isinstance(cfg["type"], OrderType) else OrderType.parse(str(cfg["type"]))
    if not validate_admissible(t):
        raise CombinatoricsError(f"order type {t} is not admissible")
    return t


def run_solve(cfg: dict) -> int:
    t = _order_type(cfg)
    ell = float(cfg["ell"])
    if not ell > 1.0:
        raise ValidationError(f"ell must exceed 1, got {ell}")
    try:
        sol = renorm.solve_fixed_point(ell, t, int(cfg["degree"]), float(cfg["tol"]),
                                       precision=cfg.get("precision"))
    except RenormError as exc:
        if exc.exit_code != EXIT_NUMERIC:
            raise
        diag = {"status": "no-convergence", "error": str(exc),
                "residual": repr(float(getattr(exc, "residual", float("nan")))),
                "ell": repr(float(getattr(exc, "ell", None) or ell))}
        _emit(cfg.get("out"), json.dumps(diag, indent=1))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(cfg.get("out"), sol.to_json())
    return EXIT_OK


def run_sweep(cfg: dict) -> int:
    t = _order_type(cfg)
    ells = _float_list(cfg["ells"])
    if any(b <= a for a, b in zip(ells, ells[1:])) or not ells:
        raise ValidationError("ell list must be non-empty and strictly increasing")
    if ells[0] <= 1.0:
        raise ValidationError("ell values must exceed 1")
    try:
        table = renorm.sweep(t, ells, int(cfg["degree"]), float(cfg["tol"]), precision=cfg.get("precision"))
    except RenormError as exc:
        partial = getattr(exc, "partial", None)
        if partial is None or exc.exit_code != EXIT_NUMERIC:
            raise
        _emit(cfg.get("out"), partial.to_csv())
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(cfg.get("out"), table.to_csv())
    return EXIT_OK


def run_limit(cfg: dict) -> int:
    t = _order_type(cfg)
    table = renorm.sweep(t, _float_list(cfg["ells"]), int(cfg["degree"]), float(cfg["tol"]),
                         precision=cfg.get("precision"))
    rows = [limit.diagnostics(s) for s in table.solutions]
    if cfg.get("diagnostics"):
        _emit(cfg["diagnostics"], limit.diagnostics_csv(rows))
    est = limit.extrapolate_limit(table, rows)
    _emit(cfg.get("out"), est.to_json())
    return EXIT_OK


def run_julia(cfg: dict) -> int:
    m = complexdyn.FlatExpMap(float(cfg["a"]), float(cfg["c"]))
    viewport = _float_list(cfg["viewport"]) if cfg.get("viewport") else None
    if viewport is not None and len(viewport) != 4:
        raise ValidationError("viewport needs four numbers xmin,xmax,ymin,ymax")
    raster = complexdyn.render_julia(m, viewport, int(cfg["width"]), int(cfg["height"]), int(cfg["budget"]))
    out = cfg.get("out")
    _emit(out, raster.to_pgm(), binary=True)
    if out:
        Path(out).with_suffix(".json").write_text(complexdyn.sidecar(m, raster))
    return EXIT_OK


def run_verify(cfg: dict) -> int:
    try:
        sol = renorm.FixedPointSolution.from_json(Path(cfg["solution"]).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read {cfg['solution']}: {exc}") from exc
    checks = check_solution(sol, float(cfg["max_residual"]))
    for c in checks:
        print(f"{'PASS' if c.ok else 'FAIL'} {c.name}: {c.detail}")
    return EXIT_OK if all(c.ok for c in checks) else EXIT_STRUCTURE


COMMANDS = {"solve": run_solve, "sweep": run_sweep, "limit": run_limit,
            "julia": run_julia, "verify": run_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except RenormError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
