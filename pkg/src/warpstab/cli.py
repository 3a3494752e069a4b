"""Scenario-driven batch runner.

Every subcommand resolves a scenario config (from --config or --preset),
dispatches to module operations, writes a JSON report and optional CSV
curves, and exits 0 on success, 1 on config errors, 2 on numerical
contract failures.  Reports are deterministic for a fixed config and
version; the wall-clock field is excluded from that guarantee.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import (
    ball_volume,
    cutoff_energy,
    decay_fit,
    polynomial_growth_check,
    sphere_area_ratio,
)
from .config import ScenarioConfig, load_config, preset_config
from .conformal import annulus_min_ricci, conformal_ricci
from .curvature import CSV_COLUMNS, curvature_rows
from .errors import ConfigError, NumericalContractError, WarpstabError
from .expr import ExprSyntaxError
from .flow import FLOW_CSV_COLUMNS, monotonicity_report
from .slices import SLICE_CSV_COLUMNS, f_minimal_roots, slice_shape
from .variation import (
    second_variation_fd,
    second_variation_form,
    stability_spectrum,
    weighted_area,
)
from .verify import run_all


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="warpstab",
        description="Curvature and stability checks on warped-product model geometries.",
    )
    parser.add_argument("--version", action="version", version=f"warpstab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("curvature", "curvature scalars along the model domain"),
        ("slice", "slice shapes and weighted-minimality roots"),
        ("variation", "second-variation form against its FD oracle"),
        ("spectrum", "stability spectrum of a minimal slice"),
        ("flow", "normal flow residual law and area monotonicity"),
        ("cutoff", "logarithmic cutoff energy decay"),
        ("compare", "weighted sphere-area comparison and volume growth"),
        ("conformal", "conformal annulus positivity experiment"),
        ("verify-all", "run the full verification matrix"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", type=str, help="scenario config JSON path")
        p.add_argument("--preset", type=str, help="named preset scenario")
        p.add_argument("--out", type=str, help="report JSON path")
        p.add_argument("--csv-dir", type=str, help="directory for CSV curves")
        p.add_argument("--samples", type=int, default=None, help="sample count")
        p.add_argument("--tol", type=float, default=None, help="quadrature tolerance")
        p.add_argument("--jobs", type=int, default=1, help="worker threads")
    return parser


def _resolve_config(args) -> ScenarioConfig:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        return load_config(args.config)
    if args.preset:
        return preset_config(args.preset)
    raise ConfigError("a scenario is required: pass --config PATH or --preset NAME")


def _write_csv(csv_dir, name: str, header, rows) -> None:
    if not csv_dir:
        return
    path = Path(csv_dir)
    path.mkdir(parents=True, exist_ok=True)
    with open(path / name, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


# -- subcommand handlers (pure dispatch; all numerics live in the modules) --

def cmd_curvature(cfg: ScenarioConfig, args) -> dict:
    space = cfg.space()
    samples = args.samples or 101
    ts = space.grid(samples)
    rows = curvature_rows(space, ts)
    _write_csv(
        args.csv_dir or cfg.output_paths()["csv_dir"],
        "curvature.csv",
        CSV_COLUMNS,
        [[getattr(r, c) for c in CSV_COLUMNS] for r in rows],
    )
    return {
        "t": [r.t for r in rows],
        "ricf11": [r.ricf11 for r in rows],
        "ricf33": [r.ricf33 for r in rows],
        "minEig": min(r.minEig for r in rows),
    }


def cmd_slice(cfg: ScenarioConfig, args) -> dict:
    space = cfg.space()
    t0 = cfg.slice_t0()
    shape = slice_shape(space, t0)
    scan = f_minimal_roots(space, tol=args.tol or 1e-10)
    samples = args.samples or 101
    rows = [slice_shape(space, float(t)) for t in space.grid(samples)]
    _write_csv(
        args.csv_dir or cfg.output_paths()["csv_dir"],
        "slices.csv",
        SLICE_CSV_COLUMNS,
        [[getattr(r, c) for c in SLICE_CSV_COLUMNS] for r in rows],
    )
    return {
        "t0": shape.t0,
        "H": shape.H,
        "fn": shape.fn,
        "residual": shape.residual,
        "totallyGeodesic": shape.totallyGeodesic,
        "roots": [r.t0 for r in scan.roots],
        "identically_minimal": scan.identically_minimal,
    }


def cmd_variation(cfg: ScenarioConfig, args) -> dict:
    space = cfg.space()
    t0 = cfg.slice_t0()
    profile = cfg.profile()
    quad = cfg.quadrature(args.tol)
    q_form = second_variation_form(space, t0, profile, quad)
    q_fd = second_variation_fd(space, t0, profile, quad=quad)
    rel = abs(q_form - q_fd) / max(abs(q_form), abs(q_fd), 1e-30)
    csv_dir = args.csv_dir or cfg.output_paths()["csv_dir"]
    if csv_dir:
        s_values = np.linspace(-0.1, 0.1, args.samples or 41)
        rows = [
            [float(s), weighted_area(space, t0, profile, float(s), quad)]
            for s in s_values
        ]
        _write_csv(csv_dir, "weighted_area.csv", ("s", "A_f"), rows)
    return {"Q": q_form, "Q_fd": q_fd, "rel_err": rel}


def cmd_spectrum(cfg: ScenarioConfig, args) -> dict:
    space = cfg.space()
    t0 = cfg.slice_t0()
    rho_max, grid = cfg.spectrum_params()
    res = stability_spectrum(space, t0, rho_max, grid)
    return {
        "mu1": res.mu1,
        "negCount": res.neg_count,
        "rhoMax": res.rho_max,
        "grid": res.grid_size,
    }


def cmd_flow(cfg: ScenarioConfig, args) -> dict:
    space = cfg.space()
    t0 = cfg.slice_t0()
    t1, steps, rho_max = cfg.flow_params()
    report = monotonicity_report(
        space, t0, t1, rho_max=rho_max, steps=steps, quad=cfg.quadrature(args.tol)
    )
    trace = report.trace
    _write_csv(
        args.csv_dir or cfg.output_paths()["csv_dir"],
        "flow.csv",
        FLOW_CSV_COLUMNS,
        list(zip(trace.ts, trace.htilde_ode, trace.htilde_closed,
                 trace.residual, trace.area_window)),
    )
    return {
        "max_Htilde": report.max_htilde,
        "max_residual": report.max_residual,
        "area_monotone": report.area_monotone,
        "rigidity": report.rigidity,
        "hypothesis_ok": report.hypothesis_ok,
    }


def cmd_cutoff(cfg: ScenarioConfig, args) -> dict:
    vp, a_grid = cfg.cutoff_params()
    quad = cfg.quadrature(args.tol)
    fit = decay_fit(vp, a_grid, quad)
    _write_csv(
        args.csv_dir or cfg.output_paths()["csv_dir"],
        "cutoff.csv",
        ("a", "E", "ElogA"),
        [[a, e, e * np.log(a)] for a, e in zip(a_grid, fit.energies)],
    )
    return {
        "a": list(a_grid),
        "E": list(fit.energies),
        "slope": fit.slope,
        "hypothesis_ok": fit.hypothesis_ok,
    }


def cmd_compare(cfg: ScenarioConfig, args) -> dict:
    model = cfg.measure_model()
    r1, r2, R = cfg.comparison_radii()
    quad = cfg.quadrature(args.tol)
    rep = sphere_area_ratio(model, r1, r2, R)
    growth = polynomial_growth_check(model, model.m, quad)
    csv_dir = args.csv_dir or cfg.output_paths()["csv_dir"]
    if csv_dir:
        radii = np.linspace(model.r_min, model.r_max, args.samples or 101)
        rows = [
            [float(r), float(model.sphere_area(float(r))),
             ball_volume(model, float(r), quad)]
            for r in radii
        ]
        _write_csv(csv_dir, "measure.csv", ("r", "A_f", "V_f"), rows)
    return {
        "ratio": rep.ratio,
        "bound": rep.bound,
        "AR": rep.AR,
        "margin": rep.margin,
        "hypothesis_ok": rep.hypothesis_ok,
        "growth_slope": growth.slope,
        "growth_ok": growth.passed,
    }


def cmd_conformal(cfg: ScenarioConfig, args) -> dict:
    probe, samples = cfg.conformal_probe()
    if args.samples:
        samples = args.samples
    minimum = annulus_min_ricci(probe, samples)
    csv_dir = args.csv_dir or cfg.output_paths()["csv_dir"]
    if csv_dir:
        rows = [
            [float(r),
             conformal_ricci(probe, float(r), "radial"),
             conformal_ricci(probe, float(r), "tangential")]
            for r in probe.annulus_samples(samples)
        ]
        _write_csv(csv_dir, "conformal.csv", ("r", "ric_radial", "ric_tangential"), rows)
    return {
        "min_ricf_t": minimum,
        "annulus": [probe.a * probe.R, probe.R],
        "t": probe.t,
    }


def cmd_verify_all(cfg: ScenarioConfig, args) -> dict:
    results = run_all(jobs=args.jobs)
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status}  {res.name}: {res.detail}")
    payload = {
        "checks": [
            {"name": r.name, "passed": r.passed, "detail": r.detail}
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    if not payload["all_passed"]:
        failed = ", ".join(r.name for r in results if not r.passed)
        raise NumericalContractError(f"verification failed: {failed}", 1.0, 0.0)
    return payload


_HANDLERS = {
    "curvature": cmd_curvature,
    "slice": cmd_slice,
    "variation": cmd_variation,
    "spectrum": cmd_spectrum,
    "flow": cmd_flow,
    "cutoff": cmd_cutoff,
    "compare": cmd_compare,
    "conformal": cmd_conformal,
    "verify-all": cmd_verify_all,
}


def _emit_report(cfg: ScenarioConfig, args, command: str, results: dict, wall_ms: int):
    report = {
        "tool": "warpstab",
        "tool_version": __version__,
        "subcommand": command,
        "config_digest": cfg.digest,
        "results": json.loads(json.dumps(results, default=_fmt)),
        "wall_ms": wall_ms,
    }
    out = args.out or cfg.output_paths()["report"]
    body = json.dumps(report, sort_keys=True, indent=2, default=_fmt)
    if out:
        Path(out).write_text(body + "\n")
    return report


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        started = time.perf_counter()
        payload = _HANDLERS[args.command](cfg, args)
        wall_ms = int(1000 * (time.perf_counter() - started))
        report = _emit_report(cfg, args, args.command, payload, wall_ms)
    except (ConfigError, ExprSyntaxError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericalContractError as exc:
        if args.command == "verify-all":
            print(f"verification failed: {exc}", file=sys.stderr)
        else:
            print(f"numerical contract failure: {exc}", file=sys.stderr)
        return 2
    except WarpstabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    summary = {k: v for k, v in report["results"].items()
               if not isinstance(v, (list, dict))}
    print(f"{args.command}: ok {json.dumps(summary, sort_keys=True, default=_fmt)}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
