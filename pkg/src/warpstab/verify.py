"""End-to-end verification matrix.

Each check bundles one family of identities or inequalities with its
tolerances and returns a CheckResult; the CLI's ``verify-all``
subcommand runs all of them and fails on any regression.  The checks
use public module operations only, with independent oracles (finite
differences of the area functional, the generic tensor pipeline,
closed-form antiderivatives) on one side of every comparison.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import asymptotics, conformal, curvature, expr, flow, variation
from .space import WarpedSpace

__all__ = ["CheckResult", "CHECKS", "run_all", "expression_corpus"]

_SEED = 20260810


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed_s: float


def _result(name, start, ok, detail):
    return CheckResult(name=name, passed=bool(ok), detail=detail,
                       elapsed_s=time.perf_counter() - start)


# -- shared models ----------------------------------------------------------

def model_hyperbolic() -> WarpedSpace:
    """Hyperbolic base, g = 1 - 2t^2, f = -2t^2: nonnegative Ric_f with a
    stable minimal hyperbolic slice at t = 0."""
    return WarpedSpace.from_strings(-1, "1 - 2*t^2", "-2*t^2", -0.45, 0.45)


def model_exp_sphere() -> WarpedSpace:
    """Spherical base with exponential warp and quadratic weight."""
    return WarpedSpace.from_strings(1, "exp(t)", "t^2", -5.0, 5.0)


def model_flat() -> WarpedSpace:
    return WarpedSpace.from_strings(0, "1", "0", -1.0, 1.0)


def model_cylinder() -> WarpedSpace:
    return WarpedSpace.from_strings(1, "1", "0", -1.0, 1.0)


def model_round_sphere() -> WarpedSpace:
    return WarpedSpace.from_strings(1, "sin(t)^2", "0", 0.2, 2.94)


# -- criterion 1 ------------------------------------------------------------

def check_hyperbolic_example() -> CheckResult:
    start = time.perf_counter()
    space = model_hyperbolic()
    ts = np.linspace(-0.45, 0.45, 101)
    err11 = err33 = -1.0
    min11 = min33 = math.inf
    for t in ts:
        rep = curvature.closed_form_curvature(space, float(t))
        expected11 = 1.0 + 8.0 * t * t
        expected33 = 4.0 * ((1.0 - 2.0 * t * t) ** -2 - 1.0)
        err11 = max(err11, abs(rep.ricf11 - expected11))
        err33 = max(err33, abs(rep.ricf33 - expected33))
        min11 = min(min11, rep.ricf11)
        min33 = min(min33, rep.ricf33)
    elapsed = time.perf_counter() - start
    ok = err11 <= 1e-9 and err33 <= 1e-9 and min11 >= 0.0 and min33 >= 0.0 and elapsed < 1.0
    return _result(
        "hyperbolic-example", start, ok,
        f"|ricf11 - (1+8t^2)| <= {err11:.2e}, |ricf33 - closed| <= {err33:.2e}, "
        f"min ricf11 = {min11:.3f}, min ricf33 = {min33:.3f}, {elapsed:.2f}s",
    )


# -- criterion 2 ------------------------------------------------------------

def check_exp_sphere_example() -> CheckResult:
    start = time.perf_counter()
    space = model_exp_sphere()
    ts = np.linspace(-5.0, 5.0, 1001)
    reports = [curvature.closed_form_curvature(space, float(t)) for t in ts]
    err33 = max(abs(r.ricf33 - 1.5) for r in reports)
    min11 = min(r.ricf11 for r in reports)
    target = 1.0 - math.exp(-0.5)
    elapsed = time.perf_counter() - start
    ok = err33 <= 1e-9 and abs(min11 - target) <= 1e-6 and elapsed < 1.0
    return _result(
        "exp-sphere-example", start, ok,
        f"|ricf33 - 3/2| <= {err33:.2e}, min ricf11 = {min11:.9f} "
        f"(target {target:.9f}), {elapsed:.2f}s",
    )


# -- criterion 3 ------------------------------------------------------------

_ORACLE_FIELDS = (
    "R1221", "R1331", "ric11", "ric33", "ricf11", "ricf33",
    "unit11", "unitf11", "S", "lapf", "Sf",
)


def check_oracle_equivalence() -> CheckResult:
    start = time.perf_counter()
    rng = np.random.default_rng(_SEED)
    models = [
        model_hyperbolic(), model_exp_sphere(), model_flat(),
        model_cylinder(), model_round_sphere(),
    ]
    worst_rel = worst_abs = worst_mixed = 0.0
    for space in models:
        span = space.t_max - space.t_min
        for _ in range(20):
            t = float(rng.uniform(space.t_min + 0.02 * span, space.t_max - 0.02 * span))
            rho = float(rng.uniform(0.1, 2.8))
            closed = curvature.closed_form_curvature(space, t)
            fd = curvature.fd_oracle_curvature(space, t, rho=rho)
            for name in _ORACLE_FIELDS:
                want = getattr(closed, name)
                got = getattr(fd, name)
                if abs(want) > 1e-8:
                    worst_rel = max(worst_rel, abs(want - got) / abs(want))
                else:
                    worst_abs = max(worst_abs, abs(want - got))
            ten = curvature.fd_tensors(space, t, rho, curvature.DEFAULT_FD_STEP)
            worst_mixed = max(
                worst_mixed,
                abs(ten.ricci[0, 1]), abs(ten.ricci[0, 2]), abs(ten.ricci[1, 2]),
            )
    elapsed = time.perf_counter() - start
    ok = worst_rel <= 1e-5 and worst_abs <= 1e-8 and worst_mixed <= 1e-6 and elapsed < 10.0
    return _result(
        "curvature-oracle-equivalence", start, ok,
        f"rel <= {worst_rel:.2e}, abs(zeros) <= {worst_abs:.2e}, "
        f"mixed <= {worst_mixed:.2e}, {elapsed:.1f}s over 5 models x 20 points",
    )


# -- criterion 4 ------------------------------------------------------------

def _variation_matrix():
    cases = [
        (model_flat(), 0.0),
        (model_hyperbolic(), 0.0),
        (model_exp_sphere(), 0.5),
    ]
    profiles = [
        variation.RadialProfile.cosine_cap(1.0),
        variation.RadialProfile.cosine_cap(2.0),
        variation.RadialProfile.from_expression("1 - (r/2)^2", 2.0),
    ]
    return cases, profiles


def check_variation_oracle() -> CheckResult:
    start = time.perf_counter()
    cases, profiles = _variation_matrix()
    worst = 0.0
    flat_err = 0.0
    for space, t0 in cases:
        for profile in profiles:
            q_form = variation.second_variation_form(space, t0, profile)
            q_fd = variation.second_variation_fd(space, t0, profile)
            worst = max(worst, abs(q_form - q_fd) / max(abs(q_form), abs(q_fd)))
    # flat-case Dirichlet energy: q = 0, so the form itself is the energy
    flat = model_flat()
    for profile in profiles:
        energy = variation.second_variation_form(flat, 0.0, profile)
        q_fd = variation.second_variation_fd(flat, 0.0, profile)
        flat_err = max(flat_err, abs(q_fd - energy) / abs(energy))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-4 and flat_err <= 1e-6 and elapsed < 30.0
    return _result(
        "second-variation-oracle", start, ok,
        f"form vs FD rel <= {worst:.2e} (3 models x 3 profiles), "
        f"flat Dirichlet rel <= {flat_err:.2e}, {elapsed:.1f}s",
    )


# -- criterion 5 ------------------------------------------------------------

def _fd_first_variation(space, t0, profile, h=1e-3):
    def centered(step):
        return (
            variation.weighted_area(space, t0, profile, step)
            - variation.weighted_area(space, t0, profile, -step)
        ) / (2.0 * step)

    d1, d2 = centered(h), centered(h / 2.0)
    return (4.0 * d2 - d1) / 3.0


def check_first_variation() -> CheckResult:
    start = time.perf_counter()
    profile = variation.RadialProfile.cosine_cap(1.0)
    nonminimal = [
        (model_hyperbolic(), 0.15), (model_hyperbolic(), 0.25),
        (model_hyperbolic(), -0.3), (model_exp_sphere(), 0.0),
        (model_exp_sphere(), 1.5),
    ]
    worst = 0.0
    for space, t0 in nonminimal:
        fv = variation.first_variation(space, t0, profile)
        fd = _fd_first_variation(space, t0, profile)
        worst = max(worst, abs(fv - fd) / max(1e-30, abs(fv)))
    at_roots = max(
        abs(variation.first_variation(model_hyperbolic(), 0.0, profile)),
        abs(variation.first_variation(model_exp_sphere(), 0.5, profile)),
    )
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-5 and at_roots <= 1e-9
    return _result(
        "first-variation", start, ok,
        f"closed vs FD rel <= {worst:.2e} at 5 non-minimal slices, "
        f"|value| <= {at_roots:.2e} at minimal slices, {elapsed:.1f}s",
    )


# -- criterion 6 ------------------------------------------------------------

_DISK_GROUND_STATE = 5.7832  # square of the first Dirichlet-disk constant


def check_spectrum() -> CheckResult:
    start = time.perf_counter()
    flat = model_flat()
    errs = []
    for rho_max in (1.0, 2.0):
        res = variation.stability_spectrum(flat, 0.0, rho_max)
        errs.append(abs(res.mu1 * rho_max ** 2 - _DISK_GROUND_STATE))
    hyp = model_hyperbolic()
    stable = True
    mus = []
    for rho_max in (1.0, 2.0, 4.0):
        res = variation.stability_spectrum(hyp, 0.0, rho_max)
        mus.append(res.mu1)
        stable = stable and res.neg_count == 0 and res.mu1 >= 0.0
    elapsed = time.perf_counter() - start
    ok = max(errs) <= 1e-3 and stable
    return _result(
        "stability-spectrum", start, ok,
        f"flat-disk constant error <= {max(errs):.2e}, stable slice mu1 = "
        f"{', '.join(f'{m:.4f}' for m in mus)} (all nonnegative), {elapsed:.1f}s",
    )


# -- criterion 7 ------------------------------------------------------------

def check_flow() -> CheckResult:
    start = time.perf_counter()
    space = model_hyperbolic()
    report = flow.monotonicity_report(space, 0.0, 0.4, rho_max=2.0, steps=800)
    target = -0.512 / 0.68
    end_err = abs(report.trace.htilde_ode[-1] - target)
    elapsed = time.perf_counter() - start
    ok = (
        report.max_residual <= 1e-8
        and end_err <= 1e-6
        and report.max_htilde <= 1e-10
        and report.area_monotone
        and report.hypothesis_ok
    )
    return _result(
        "normal-flow", start, ok,
        f"residual <= {report.max_residual:.2e}, end-value error {end_err:.2e}, "
        f"max Htilde = {report.max_htilde:.2e}, area monotone = {report.area_monotone}, "
        f"{elapsed:.1f}s",
    )


# -- criterion 8 ------------------------------------------------------------

def check_cutoff_decay() -> CheckResult:
    start = time.perf_counter()
    e100 = asymptotics.cutoff_energy("2*r", 100.0)
    target = 2.0 / math.log(100.0)
    rel = abs(e100 - target) / target
    fit = asymptotics.decay_fit("2*r", [1e2, 1e3, 1e4, 1e5])
    elapsed = time.perf_counter() - start
    ok = rel <= 1e-6 and abs(fit.slope - 1.0) <= 0.05 and fit.hypothesis_ok
    return _result(
        "cutoff-decay", start, ok,
        f"E(100) rel err {rel:.2e}, log-log slope {fit.slope:.4f}, {elapsed:.1f}s",
    )


# -- criterion 9 ------------------------------------------------------------

def check_comparison() -> CheckResult:
    start = time.perf_counter()
    flat = asymptotics.RadialMeasureModel.from_strings(3, "r^2", "0", 0.1, 9.0)
    sphere = asymptotics.RadialMeasureModel.from_strings(3, "sin(r)^2", "0", 0.1, 3.1)
    perturbed = asymptotics.RadialMeasureModel.from_strings(
        3, "sin(r)^2", "0.1*cos(r)", 0.1, 3.1
    )
    flat_rep = asymptotics.sphere_area_ratio(flat, 1.0, 2.0, 2.5)
    sphere_rep = asymptotics.sphere_area_ratio(sphere, 0.5, 1.0, 1.02)
    pert_rep = asymptotics.sphere_area_ratio(perturbed, 0.5, 1.0, 1.02)
    growth_flat = asymptotics.polynomial_growth_check(flat, 3)
    growth_sphere = asymptotics.polynomial_growth_check(sphere, 3)
    oscillating = asymptotics.RadialMeasureModel.from_strings(3, "r^2", "sin(r)", 0.1, 100.0)
    growth_osc = asymptotics.polynomial_growth_check(oscillating, 3)
    elapsed = time.perf_counter() - start
    ok = (
        abs(flat_rep.margin) <= 1e-12
        and flat_rep.hypothesis_ok
        and sphere_rep.margin >= 0.0 and sphere_rep.hypothesis_ok
        and pert_rep.margin >= 0.0 and pert_rep.hypothesis_ok
        and growth_flat.passed and growth_sphere.passed and growth_osc.passed
    )
    return _result(
        "weighted-comparison", start, ok,
        f"flat margin {flat_rep.margin:.1e}, sphere margin {sphere_rep.margin:.3f}, "
        f"perturbed margin {pert_rep.margin:.3f}, growth slopes "
        f"{growth_flat.slope:.3f}/{growth_sphere.slope:.3f}/{growth_osc.slope:.3f}, "
        f"{elapsed:.1f}s",
    )


# -- criterion 10 -----------------------------------------------------------

def check_conformal() -> CheckResult:
    start = time.perf_counter()
    worst_min = math.inf
    for t in (1e-4, 1e-3, 1e-2):
        probe = conformal.ConformalProbe(R=1.0, t=t)
        worst_min = min(worst_min, conformal.annulus_min_ricci(probe, samples=200))
    worst_gamma = 0.0
    for t in (0.0, 1e-3, 1e-2):
        probe = conformal.ConformalProbe(R=1.0, t=t)
        for r in (0.9, 0.95):
            worst_gamma = max(worst_gamma, conformal.conformal_christoffel_check(probe, r))
    weighted = conformal.ConformalProbe(
        R=1.0, t=1e-3, background_weight=expr.parse("sin(r)", "r")
    )
    gap_ok = True
    for r in weighted.annulus_samples(200):
        gap, bound = conformal.conformal_hessian_gap(weighted, float(r))
        gap_ok = gap_ok and gap >= bound - 1e-15
    probe = conformal.ConformalProbe(R=1.0, t=1e-3)
    dist_ok = True
    for r in probe.annulus_samples(200):
        value, bound = conformal.distance_function_bound(probe, float(r))
        dist_ok = dist_ok and value <= bound
    elapsed = time.perf_counter() - start
    ok = worst_min > 0.0 and worst_gamma <= 1e-12 and gap_ok and dist_ok
    return _result(
        "conformal-annulus", start, ok,
        f"min perturbed Ric_f = {worst_min:.3e} > 0, Christoffel discrepancy "
        f"<= {worst_gamma:.1e}, Hessian gap bounded = {gap_ok}, {elapsed:.1f}s",
    )


# -- criterion 11 -----------------------------------------------------------

def expression_corpus(seed: int = _SEED, count: int = 1000, max_depth: int = 6):
    """Deterministic corpus of random expression trees (depth <= max_depth)."""
    rng = np.random.default_rng(seed)
    functions = list(expr.FUNCTIONS)
    exponents = [-3.0, -2.0, -1.0, 0.5, 1.5, 2.0, 3.0, 4.0]

    def build(depth: int) -> expr.Expr:
        if depth <= 0 or rng.random() < 0.18:
            if rng.random() < 0.45:
                return expr.Constant(round(float(rng.uniform(0.1, 3.0)), 2))
            return expr.Variable("x")
        pick = rng.random()
        if pick < 0.5:
            op = rng.choice(["+", "-", "*", "/"])
            return expr.BinaryOp(str(op), build(depth - 1), build(depth - 1))
        if pick < 0.62:
            return expr.BinaryOp(
                "^", build(depth - 1), expr.Constant(float(rng.choice(exponents)))
            )
        if pick < 0.75:
            child = build(depth - 1)
            if isinstance(child, expr.Constant):
                return expr.Constant(-child.value)
            return expr.Negate(child)
        return expr.Call(str(rng.choice(functions)), build(depth - 1))

    return [build(int(rng.integers(1, max_depth + 1))) for _ in range(count)]


def _fd4(e, x, h):
    return (
        -expr.evaluate(e, x + 2 * h) + 8.0 * expr.evaluate(e, x + h)
        - 8.0 * expr.evaluate(e, x - h) + expr.evaluate(e, x - 2 * h)
    ) / (12.0 * h)


def max_intermediate_magnitude(e: expr.Expr, x: float) -> float:
    """Largest |value| attained by any subexpression at x.  Huge
    intermediates (e.g. cosh(exp(c))) quantize downstream arguments at
    the ulp scale, which finite differences cannot see past."""
    worst = abs(expr.evaluate(e, x))
    if isinstance(e, expr.Negate):
        children = (e.arg,)
    elif isinstance(e, expr.BinaryOp):
        children = (e.left, e.right)
    elif isinstance(e, expr.Call):
        children = (e.arg,)
    else:
        children = ()
    for child in children:
        worst = max(worst, max_intermediate_magnitude(child, x))
    return worst


def check_expression_suite() -> CheckResult:
    start = time.perf_counter()
    corpus = expression_corpus()
    rng = np.random.default_rng(_SEED + 1)

    roundtrip_failures = 0
    for e in corpus:
        if expr.parse(expr.render(e), "x") != e:
            roundtrip_failures += 1

    checked = 0
    worst = 0.0
    simplify_exact = True
    for e in corpus:
        try:
            d = expr.differentiate(e)
            s = expr.simplify(e)
        except Exception:
            roundtrip_failures += 1
            continue
        for _ in range(10):
            x = float(rng.uniform(-2.5, 2.5))
            try:
                value = expr.evaluate(e, x)
                sym = expr.evaluate(d, x)
                fd = _fd4(e, x, 1e-4 * (abs(x) + 1.0))
                fd_half = _fd4(e, x, 5e-5 * (abs(x) + 1.0))
                sval = expr.evaluate(s, x)
            except Exception:
                continue
            if not all(map(math.isfinite, (value, sym, fd, fd_half, sval))):
                continue
            if abs(value) > 1e8 or abs(sym) > 1e8:
                continue
            if sval != value:
                simplify_exact = False
            # skip FD-ill-conditioned points: step-dependent noise (poles,
            # cancellation) and systematic argument quantization from huge
            # intermediates
            if abs(fd - fd_half) > 1e-9 * max(1.0, abs(fd)):
                continue
            if max_intermediate_magnitude(e, x) > 1e4:
                continue
            checked += 1
            worst = max(worst, abs(sym - fd) / max(1.0, abs(sym), abs(fd)))
    elapsed = time.perf_counter() - start
    ok = (
        roundtrip_failures == 0
        and worst <= 1e-7
        and checked >= 3000
        and simplify_exact
    )
    return _result(
        "expression-suite", start, ok,
        f"{len(corpus)} trees round-trip ({roundtrip_failures} failures), "
        f"derivative vs FD rel <= {worst:.2e} over {checked} points, "
        f"simplify exact = {simplify_exact}, {elapsed:.1f}s",
    )


CHECKS: tuple[tuple[str, Callable[[], CheckResult]], ...] = (
    ("hyperbolic-example", check_hyperbolic_example),
    ("exp-sphere-example", check_exp_sphere_example),
    ("curvature-oracle-equivalence", check_oracle_equivalence),
    ("second-variation-oracle", check_variation_oracle),
    ("first-variation", check_first_variation),
    ("stability-spectrum", check_spectrum),
    ("normal-flow", check_flow),
    ("cutoff-decay", check_cutoff_decay),
    ("weighted-comparison", check_comparison),
    ("conformal-annulus", check_conformal),
    ("expression-suite", check_expression_suite),
)


def run_all(jobs: int = 1) -> list[CheckResult]:
    """Run every check; ``jobs`` > 1 fans the independent checks out to a
    thread pool (all inputs are immutable)."""
    if jobs <= 1:
        return [fn() for _, fn in CHECKS]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(fn) for _, fn in CHECKS]
        return [f.result() for f in futures]
