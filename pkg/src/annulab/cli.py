"""Command-line front end.

Exit status: 0 all applicable checks passed, 1 a check failed, 2 usage or
configuration error, 3 a numerical construction or solve failed.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from annulab import __version__
from annulab.convergence import COLUMNS as CONV_COLUMNS
from annulab.convergence import STUDIES, convergence_study, parse_grid
from annulab.errors import ComputationError, ConfigError
from annulab.frames import canonical_frame, write_frame_csv
from annulab.grid import make_grid
from annulab.io import dumps_json, write_csv, write_json
from annulab.kernels import BACKEND
from annulab.pde import AUDIT_COLUMNS, C_INFTY, C_L2, wente_audit, wente_solve
from annulab.surfaces import (
    CATALOG,
    default_grid,
    resolve_params,
    sample_catalog,
    write_mesh,
    write_point_cloud,
)
from annulab.theorems import CHECKS, CSV_COLUMNS, CheckReport, run_check

log = logging.getLogger("annulab")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3
FORMATS = ("json", "csv", "mesh")
CONFIG_KEYS = {"surface", "params", "grid", "domain", "checks", "tolerance", "seed",
               "output", "formats"}


@dataclass(frozen=True)
class RunConfig:
    surface: str = "catenoid"
    params: dict = field(default_factory=dict)
    grid: tuple = (128, 256)
    domain: tuple | None = None
    checks: tuple = ("appendix",)
    tolerance: float | None = None
    seed: int = 0
    output: str = "annulab-out"
    formats: tuple = ("json", "csv")

    def validate(self) -> "RunConfig":
        params = resolve_params(self.surface, self.params)
        unknown = [c for c in self.checks if c not in CHECKS]
        if unknown:
            raise ConfigError(f"checks: unknown check {unknown[0]!r}; "
                              f"expected one of {', '.join(CHECKS)}")
        if not self.checks:
            raise ConfigError("checks: at least one check is required")
        bad = [f for f in self.formats if f not in FORMATS]
        if bad:
            raise ConfigError(f"formats: unknown format {bad[0]!r}; expected json, csv or mesh")
        if self.tolerance is not None and not (self.tolerance > 0 and math.isfinite(self.tolerance)):
            raise ConfigError(f"tolerance: must be a positive number, got {self.tolerance!r}")
        self.make_grid(params)
        return self

    def make_grid(self, params=None):
        params = resolve_params(self.surface, self.params) if params is None else params
        n_s, n_t = self.grid
        if self.domain is None:
            return default_grid(self.surface, params, n_s, n_t)
        return make_grid(self.domain[0], self.domain[1], n_s, n_t)


# -- argument parsing ------------------------------------------------------------


def _parse_param(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise ConfigError(f"param: expected key=value, got {text!r}")
    k, v = text.split("=", 1)
    return k.strip(), v.strip()


def _grid_arg(text) -> tuple[int, int]:
    if isinstance(text, (list, tuple)):
        return int(text[0]), int(text[1])
    try:
        return parse_grid(str(text))
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc


def _domain_arg(text) -> tuple[float, float]:
    try:
        if isinstance(text, (list, tuple)):
            b, a = (float(x) for x in text)
        else:
            b, a = (float(x) for x in str(text).split(","))
    except ValueError as exc:
        raise ConfigError(f"domain: expected 'b,a', got {text!r}") from exc
    return b, a


def _split_list(value) -> tuple:
    if isinstance(value, (list, tuple)):
        return tuple(str(v).strip() for v in value)
    return tuple(v.strip() for v in str(value).split(",") if v.strip())


def load_config_file(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config: file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a JSON object")
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"config: unknown key {unknown[0]!r}")
    return data


def build_config(args: argparse.Namespace) -> RunConfig:
    """File values first, then any flag given on the command line."""
    cfg = RunConfig()
    data = load_config_file(args.config) if args.config else {}
    merged: dict = {}
    for key in CONFIG_KEYS:
        if key in data:
            merged[key] = data[key]
    flag_map = {
        "surface": args.surface, "grid": args.grid, "domain": args.domain,
        "checks": args.checks, "tolerance": args.tolerance, "seed": args.seed,
        "output": args.out, "formats": args.formats,
    }
    for key, value in flag_map.items():
        if value is not None:
            merged[key] = value
    params = dict(merged.get("params", {}) or {})
    if not isinstance(params, dict):
        raise ConfigError("params: must be an object of key/value pairs")
    for text in args.param or []:
        k, v = _parse_param(text)
        params[k] = v
    kw: dict = {"params": params}
    if "surface" in merged:
        kw["surface"] = str(merged["surface"])
    if "grid" in merged:
        kw["grid"] = _grid_arg(merged["grid"])
    if "domain" in merged and merged["domain"] is not None:
        kw["domain"] = _domain_arg(merged["domain"])
    if "checks" in merged:
        kw["checks"] = _split_list(merged["checks"])
    if "formats" in merged:
        kw["formats"] = _split_list(merged["formats"])
    if "tolerance" in merged and merged["tolerance"] is not None:
        try:
            kw["tolerance"] = float(merged["tolerance"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"tolerance: not a number: {merged['tolerance']!r}") from exc
    if "seed" in merged:
        try:
            kw["seed"] = int(merged["seed"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"seed: not an integer: {merged['seed']!r}") from exc
    if "output" in merged:
        kw["output"] = str(merged["output"])
    return replace(cfg, **kw).validate()


def max_workers() -> int:
    raw = os.environ.get("ANNULAB_MAX_WORKERS", "")
    if raw:
        try:
            n = int(raw)
        except ValueError as exc:
            raise ConfigError(f"ANNULAB_MAX_WORKERS: not an integer: {raw!r}") from exc
        return max(1, n)
    return max(1, min(4, os.cpu_count() or 1))


# -- subcommands -----------------------------------------------------------------


def cmd_catalog(args) -> int:
    entries = []
    for name, entry in CATALOG.items():
        p = resolve_params(name, {})
        g = default_grid(name, p)
        entries.append({"name": name, "description": entry.description,
                        "defaults": p, "domain": [g.b, g.a]})
    if args.json:
        sys.stdout.write(dumps_json(entries))
    else:
        for e in entries:
            defaults = ", ".join(f"{k}={v}" for k, v in e["defaults"].items())
            print(f"{e['name']:<14s} b={e['domain'][0]:.6g} a={e['domain'][1]:.6g}  "
                  f"[{defaults}]  {e['description']}")
    if args.export:
        imm = sample_catalog(args.export, None, dict(_parse_param(t) for t in args.param or []))
        out = Path(args.out or ".")
        write_point_cloud(out / f"{imm.name}_points.csv", imm)
        write_mesh(out / f"{imm.name}.obj", imm)
        print(f"wrote {out / (imm.name + '_points.csv')} and {out / (imm.name + '.obj')}")
    return EXIT_OK


def run(config: RunConfig) -> tuple[int, list[CheckReport]]:
    """Execute the checks of ``config`` and write the requested artifacts."""
    params = resolve_params(config.surface, config.params)
    grid = config.make_grid(params)
    imm = sample_catalog(config.surface, grid, params)
    out = Path(config.output)

    def one(name):
        return run_check(name, imm, tolerance=config.tolerance, seed=config.seed)

    workers = min(max_workers(), len(config.checks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(one, config.checks))
    else:
        reports = [one(c) for c in config.checks]

    if "json" in config.formats:
        for rep in reports:
            write_json(out / f"{imm.name}_{rep.name}.json", rep.to_dict())
    if "csv" in config.formats:
        write_csv(out / "summary.csv", CSV_COLUMNS, [r.csv_row() for r in reports])
    if "mesh" in config.formats:
        write_mesh(out / f"{imm.name}.obj", imm)
        write_point_cloud(out / f"{imm.name}_points.csv", imm)
        write_frame_csv(out / f"{imm.name}_frame.csv", canonical_frame(imm))
    status = EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL
    return status, reports


def cmd_verify(args) -> int:
    config = build_config(args)
    status, reports = run(config)
    for rep in reports:
        print(rep.to_text() if args.verbose else
              f"{rep.surface:<14s} {rep.name:<16s} {rep.status():<5s} "
              f"margin {'-' if rep.na else _num(rep.margin)}")
    return status


def cmd_wente(args) -> int:
    if args.n < 1:
        raise ConfigError(f"n: need at least one sample, got {args.n}")
    n_s, n_t = _grid_arg(args.grid)
    b, a = _domain_arg(args.domain)
    grid = make_grid(b, a, n_s, n_t)
    audit = wente_audit(grid, args.n, args.seed, tolerance=args.tolerance)
    out = Path(args.out)
    write_csv(out / "wente_audit.csv", AUDIT_COLUMNS, [r.as_row() for r in audit.rows])
    # analytic case a = x, b = y: -lap v = 1
    xy = wente_solve(grid, grid.X, grid.Y)
    from annulab.pde import poisson_dirichlet

    _, info = poisson_dirichlet(grid, 1.0, full_output=True)
    write_json(out / "wente_audit.json", {
        "grid": grid.summary(),
        "n_samples": args.n,
        "seed": args.seed,
        "tolerance": audit.tolerance,
        "max_sup_ratio": audit.max_sup_ratio,
        "max_grad_ratio": audit.max_grad_ratio,
        "C_infinity": C_INFTY,
        "C_2": C_L2,
        "worst_sample": audit.worst_sample,
        "passed": audit.passed,
        "analytic_xy_sup": xy.sup_norm,
        "solver": info.to_dict(),
        "backend": BACKEND,
    })
    print(f"max sup ratio  {audit.max_sup_ratio:.6f} (bound {C_INFTY:.6f})")
    print(f"max grad ratio {audit.max_grad_ratio:.6f} (bound {C_L2:.6f})")
    if not audit.passed:
        print(f"violation: worst sample {audit.worst_sample} (seed {args.seed})")
        return EXIT_FAIL
    return EXIT_OK


def cmd_converge(args) -> int:
    grids = [_grid_arg(g) for g in _split_list(args.grids)]
    if len(grids) < 3:
        raise ConfigError("grids: a convergence study needs at least three grids")
    if args.study not in STUDIES:
        raise ConfigError(f"study: unknown study {args.study!r}; expected one of {', '.join(STUDIES)}")
    params = dict(_parse_param(t) for t in args.param or [])
    resolve_params(args.surface, params)
    domain = _domain_arg(args.domain) if args.domain else None
    try:
        result = convergence_study(args.study, args.surface, params, grids, domain, args.seed)
    except KeyError as exc:
        raise ConfigError(f"study: {exc.args[0]}") from exc
    out = Path(args.out)
    rows = [r.as_row() for r in result.rows]
    write_csv(out / f"converge_{args.surface}_{args.study}.csv", CONV_COLUMNS, rows)
    for r in result.rows:
        print(f"{r.grid:<10s} residual {r.residual:.6e} order {r.order:.4f}")
    print(f"observed order: {result.order_label()} -> {'PASS' if result.passed else 'FAIL'}")
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_report(args) -> int:
    src = Path(args.dir)
    files = sorted(src.glob("*.json")) if src.is_dir() else []
    reports = []
    for f in files:
        data = json.loads(f.read_text())
        if isinstance(data, dict) and {"name", "surface", "passed"} <= set(data):
            reports.append(data)
    if not reports:
        raise ConfigError(f"dir: no check reports found in {src}")
    rows = []
    for d in reports:
        status = "N/A" if not d["applicable"] else ("PASS" if d["passed"] else "FAIL")
        g = d["grid"]
        rows.append([d["surface"], d["name"], d["passed"], not d["applicable"], d["margin"],
                     d["tolerance"], f"{g['n_s']}x{g['n_theta']}"])
        print(f"{d['surface']:<14s} {d['name']:<16s} {status:<5s} margin {'-' if status == 'N/A' else _num(d['margin'])}")
    if args.csv:
        write_csv(args.csv, CSV_COLUMNS, rows)
    return EXIT_OK if all(d["passed"] for d in reports) else EXIT_FAIL


def _num(v) -> str:
    return v if isinstance(v, str) else f"{v:.3e}"


# -- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="annulab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"annulab {__version__} ({BACKEND})")
    p.add_argument("-q", "--quiet", action="store_true", help="only print errors")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("catalog", help="list catalog surfaces")
    c.add_argument("--json", action="store_true")
    c.add_argument("--export", metavar="NAME", help="also write point cloud and mesh for NAME")
    c.add_argument("--param", action="append", metavar="K=V")
    c.add_argument("--out", default=None)
    c.set_defaults(func=cmd_catalog)

    v = sub.add_parser("verify", help="run theorem checks on a catalog surface")
    v.add_argument("--config", help="JSON run configuration; flags override it")
    v.add_argument("--surface")
    v.add_argument("--param", action="append", metavar="K=V")
    v.add_argument("--grid", help="n_s x n_theta, e.g. 128x256")
    v.add_argument("--domain", help="inner,outer radius (default: surface's own)")
    v.add_argument("--checks", help=f"comma list from: {', '.join(CHECKS)}")
    v.add_argument("--tolerance", type=float)
    v.add_argument("--seed", type=int)
    v.add_argument("--out")
    v.add_argument("--formats", help="comma list from json,csv,mesh")
    v.add_argument("-v", "--verbose", action="store_true", help="print full reports")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("wente", help="audit the Wente constants on random fields")
    w.add_argument("--n", type=int, default=50)
    w.add_argument("--seed", type=int, default=7)
    w.add_argument("--grid", default="64x128")
    w.add_argument("--domain", default="1,2")
    w.add_argument("--tolerance", type=float)
    w.add_argument("--out", default="annulab-out")
    w.set_defaults(func=cmd_wente)

    k = sub.add_parser("converge", help="grid-refinement study")
    k.add_argument("--surface", default="catenoid")
    k.add_argument("--param", action="append", metavar="K=V")
    k.add_argument("--study", default="appendix-3.4", help=f"one of {', '.join(STUDIES)}")
    k.add_argument("--grids", default="64x128,128x256,256x512")
    k.add_argument("--domain")
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--out", default="annulab-out")
    k.set_defaults(func=cmd_converge)

    r = sub.add_parser("report", help="summarize JSON reports in a directory")
    r.add_argument("dir")
    r.add_argument("--csv", help="also write the summary CSV here")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="annulab: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"annulab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ComputationError as exc:
        print(f"annulab: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
