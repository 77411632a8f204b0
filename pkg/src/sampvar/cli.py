"""``sampvar`` command line.

    sampvar SUBCOMMAND --config PATH [--out PATH] [--format json|csv]
                       [--seed U64] [--order J] [--engine moment|cumulant|both]

Exit status: 0 on success, 1 on a usage or config error, 2 when
``validate`` finds a check outside its tolerance.  Artifacts carry the tool
version and the SHA-256 of the effective config and nothing time- or
host-dependent, so the same config and seed give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .config import OUTPUTS, ConfigError, RunConfig, load_config
from .cumulants import (
    A12_DENOMINATORS,
    CumulantSet,
    chisq_deviation,
    cumulants_moment_route,
    kappa2,
    kappa3_cumulant_route,
    kappa4_cumulant_route,
    moment_set,
)
from .expansion import GRID_COLUMNS, density_grid
from .oracles import gamma_reference, simulate_ar1
from .process import covariance_matrix
from .symmetric import InsufficientSampleSizeError, build_tables
from .validation import run_checks

__all__ = ["main", "run", "build_parser"]

EXIT_OK, EXIT_USAGE, EXIT_INVALID = 0, 1, 2

_ORDER_COLUMN = {
    ("gram-charlier", 0): "normal",
    ("gram-charlier", 3): "gc3",
    ("gram-charlier", 4): "gc4",
    ("gram-charlier", 6): "gc6",
    ("edgeworth", 1): "edgeworth1",
    ("edgeworth", 2): "edgeworth2",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sampvar", description="Cumulants and series approximations of the sample variance.")
    parser.add_argument("--version", action="version", version=f"sampvar {__version__}")
    parser.add_argument("subcommand", choices=OUTPUTS)
    parser.add_argument("--config", required=True, help="JSON config file (or inline JSON object)")
    parser.add_argument("--out", help="write the artifact here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"))
    parser.add_argument("--seed", type=int, help="unsigned 64-bit seed for simulate")
    parser.add_argument("--order", type=int, help="expansion order: 0,3,4,6 (gram-charlier) or 1,2 (edgeworth)")
    parser.add_argument("--engine", choices=("moment", "cumulant", "both"))
    parser.add_argument("--workers", type=int, help="process pool size for enumeration and simulation")
    return parser


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _meta(config: RunConfig) -> dict[str, Any]:
    return {
        "tool": "sampvar",
        "version": __version__,
        "subcommand": config.output,
        "config_sha256": config.sha256(),
    }


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _render_json(config: RunConfig, payload: dict) -> str:
    doc = {"meta": _meta(config), **payload}
    return json.dumps(_clean(doc), indent=2) + "\n"


def _render_csv(config: RunConfig, header: Sequence[str], rows: Sequence[Sequence], notes: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for key, val in _meta(config).items():
        buf.write(f"# {key}={val}\n")
    for note in notes:
        buf.write(f"# {note}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _write(config: RunConfig, text: str) -> None:
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _moment_cumulants(config: RunConfig, tables=None) -> CumulantSet:
    order = config.max_cumulant_order()
    return cumulants_moment_route(config.build_model(), config.n, order, tables=tables, workers=config.workers)


def _cumulant_route(config: RunConfig, tables, moment: CumulantSet) -> CumulantSet:
    n, order = config.n, config.max_cumulant_order()
    ks: list[float | None] = [moment.k1, None, None, None]
    if order >= 2:
        ks[1] = kappa2(tables, n)
    if order >= 3:
        ks[2] = kappa3_cumulant_route(tables, n, moment_set(tables, n), A12_DENOMINATORS[0])
    if order >= 4:
        ks[3] = kappa4_cumulant_route(tables, n)
    return CumulantSet(n, *ks, engine="cumulant-route", residuals=dict(moment.residuals))


def _cmd_cumulants(config: RunConfig) -> int:
    tables = build_tables(config.build_model(), config.n, config.max_cumulant_order(), workers=config.workers)
    moment = _moment_cumulants(config, tables)
    sets = []
    if config.engine in ("moment", "both"):
        sets.append(moment)
    if config.engine in ("cumulant", "both"):
        sets.append(_cumulant_route(config, tables, moment))
    if config.format == "json":
        payload = {s.engine.replace("-", "_"): s.to_dict() for s in sets}
        _write(config, _render_json(config, payload))
    else:
        rows = [(s.engine, s.n, *(float("nan") if k is None else k for k in s.kappas)) for s in sets]
        resid = [f"{k}={v!r}" for k, v in sorted(moment.residuals.items())]
        _write(config, _render_csv(config, ("engine", "n", "k1", "k2", "k3", "k4"), rows, resid))
    return EXIT_OK


def _cmd_moments(config: RunConfig) -> int:
    tables = build_tables(config.build_model(), config.n, config.max_cumulant_order(), workers=config.workers)
    if config.format == "json":
        _write(config, _render_json(config, {"n": config.n, "tables": [t.to_dict() for t in tables]}))
    else:
        rows = [(t.group, label, v) for t in tables for label, v in t.to_dict()["entries"].items()]
        _write(config, _render_csv(config, ("group", "pattern", "value"), rows))
    return EXIT_OK


def _point_mass(config: RunConfig, cs: CumulantSet) -> bool:
    return cs.k2 is not None and cs.k2 <= config.abs_tol


def _warn_point_mass(config: RunConfig, cs: CumulantSet) -> int:
    msg = f"s^2 is a point mass at {cs.k1!r}; no density approximation exists"
    print(f"warning: {msg}", file=sys.stderr)
    if config.format == "json":
        _write(config, _render_json(config, {"point_mass": cs.k1, "warning": msg, "cumulants": cs.to_dict()}))
    else:
        _write(config, _render_csv(config, ("point_mass",), [(cs.k1,)], [f"warning: {msg}"]))
    return EXIT_OK


def _cmd_grid(config: RunConfig) -> int:
    cs = _moment_cumulants(config)
    if _point_mass(config, cs):
        return _warn_point_mass(config, cs)
    sd = math.sqrt(cs.k2)
    lo = config.grid_min if config.grid_min is not None else max(0.0, cs.k1 - 6 * sd)
    hi = config.grid_max if config.grid_max is not None else cs.k1 + 6 * sd
    if not hi > lo:
        raise ConfigError("grid_max must exceed grid_min")
    xs = np.linspace(lo, hi, config.grid_points)
    if config.order is None:
        columns = GRID_COLUMNS
    else:
        columns = tuple(dict.fromkeys(("normal", _ORDER_COLUMN[(config.expansion, config.order)])))
    grid = density_grid(cs, xs, columns, kind=config.output)
    if config.is_iid_normal():
        inside = xs >= 0
        ref = np.zeros_like(xs)
        pdf, cdf = gamma_reference(config.n, config.normal_sigma(), xs[inside])
        ref[inside] = pdf if config.output == "density" else cdf
        grid["reference"] = ref
    names = list(grid)
    if config.format == "json":
        payload = {"kind": config.output, "cumulants": cs.to_dict(), "columns": {k: grid[k] for k in names}}
        _write(config, _render_json(config, payload))
    else:
        rows = zip(*(grid[k].tolist() for k in names))
        _write(config, _render_csv(config, names, list(rows)))
    return EXIT_OK


def _cmd_validate(config: RunConfig) -> int:
    report = run_checks(
        config.build_model(),
        config.n,
        rel_tol=config.rel_tol,
        abs_tol=config.abs_tol,
        shift_tol=config.shift_tol,
        workers=config.workers,
    )
    lines = [c.line() for c in report.checks]
    lines.append(f"{'PASS' if report.passed else 'FAIL'}  {sum(c.passed for c in report.checks)}/{len(report.checks)} checks")
    # the human-readable lines go to stderr when stdout carries the artifact
    print("\n".join(lines), file=sys.stdout if config.out else sys.stderr)
    if config.format == "json":
        _write(config, _render_json(config, report.to_dict()))
    else:
        rows = [(c.name, c.value, c.reference, c.error, c.tolerance, c.passed) for c in report.checks]
        _write(config, _render_csv(config, ("check", "value", "reference", "error", "tolerance", "passed"), rows))
    return EXIT_OK if report.passed else EXIT_INVALID


def _cmd_simulate(config: RunConfig) -> int:
    if config.kind == "constant":
        return _warn_point_mass(config, _moment_cumulants(config))
    phi, sd = config.ar1_params()
    summary = simulate_ar1(phi, sd, config.n, config.draws, config.seed, config.streams, config.workers,
                           min_draws=min(config.draws, 10**4))
    if config.format == "json":
        _write(config, _render_json(config, summary.to_dict()))
    else:
        notes = [f"k{r}={v!r}" for r, v in enumerate(summary.k, 1)] + [f"se{r}={v!r}" for r, v in enumerate(summary.se, 1)]
        _write(config, _render_csv(config, ("edge", "mass"), summary.histogram_rows(), notes))
    return EXIT_OK


def _cmd_chisq(config: RunConfig) -> int:
    cov = covariance_matrix(config.build_model(), config.n)
    dev = chisq_deviation(cov)
    exact = dev <= config.chisq_tol
    if config.format == "json":
        _write(config, _render_json(config, {"exact": exact, "max_deviation": dev, "tolerance": config.chisq_tol}))
    else:
        _write(config, _render_csv(config, ("exact", "max_deviation", "tolerance"), [(exact, dev, config.chisq_tol)]))
    return EXIT_OK


_COMMANDS = {
    "cumulants": _cmd_cumulants,
    "moments": _cmd_moments,
    "density": _cmd_grid,
    "cdf": _cmd_grid,
    "validate": _cmd_validate,
    "simulate": _cmd_simulate,
    "chisq-check": _cmd_chisq,
}


def run(config: RunConfig) -> int:
    """Execute ``config.output`` and return the exit status."""
    try:
        return _COMMANDS[config.output](config)
    except (ConfigError, InsufficientSampleSizeError) as exc:
        print(f"sampvar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(
            args.config,
            output=args.subcommand,
            out=args.out,
            format=args.format,
            seed=args.seed,
            order=args.order,
            engine=args.engine,
            workers=args.workers,
        )
    except ConfigError as exc:
        print(f"sampvar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(config)
    except (ValueError, OSError) as exc:
        print(f"sampvar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
