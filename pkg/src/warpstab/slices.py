"""Extrinsic geometry of the slices {t = t0} of a warped model.

With the unit normal fixed as N = +d/dt, a slice has principal
curvatures g'/(2g) in both base directions, mean curvature H = g'/g,
squared second fundamental form |A|^2 = g'^2/(2g^2) and intrinsic
Gaussian curvature kappa/g.  A slice is critical for the weighted area
exactly when the residual H - f_n vanishes (f_n = f'(t0)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import closed_form_curvature
from .errors import PreconditionError
from .space import WarpedSpace

__all__ = [
    "SliceShape",
    "RootScan",
    "SLICE_CSV_COLUMNS",
    "slice_shape",
    "minimality_residual",
    "f_minimal_roots",
    "gauss_identity_check",
]

_TOTALLY_GEODESIC_TOL = 1e-10
_SCAN_POINTS = 2001
_FLAT_FAMILY_TOL = 1e-12

SLICE_CSV_COLUMNS = (
    "t0", "principal", "normSqA", "H", "fn", "residual", "totallyGeodesic", "KSlice",
)


@dataclass(frozen=True)
class SliceShape:
    t0: float
    principal: float
    normSqA: float
    H: float
    fn: float
    residual: float
    totallyGeodesic: bool
    KSlice: float


@dataclass(frozen=True)
class RootScan:
    """Weighted-minimality roots; identically_minimal flags degenerate
    families where the residual vanishes across the whole domain."""

    roots: tuple[SliceShape, ...]
    identically_minimal: bool


def slice_shape(space: WarpedSpace, t0: float) -> SliceShape:
    space.require(t0)
    g = space.g_at(t0)
    gp = space.gp_at(t0)
    fp = space.fp_at(t0)
    principal = gp / (2.0 * g)
    norm_sq = gp * gp / (2.0 * g * g)
    H = gp / g
    return SliceShape(
        t0=float(t0),
        principal=principal,
        normSqA=norm_sq,
        H=H,
        fn=fp,
        residual=H - fp,
        totallyGeodesic=bool(np.sqrt(norm_sq) <= _TOTALLY_GEODESIC_TOL),
        KSlice=space.kappa / g,
    )


def minimality_residual(space: WarpedSpace, t):
    """H - f_n as a function of the slice parameter (vectorized)."""
    return space.gp_at(t) / space.g_at(t) - space.fp_at(t)


def f_minimal_roots(space: WarpedSpace, tol: float = 1e-10) -> RootScan:
    """All slices with H = f_n, located by sign-change bisection on a
    dense scan and refined until the residual passes ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    ts = space.grid(_SCAN_POINTS)
    res = minimality_residual(space, ts)
    if np.max(np.abs(res)) <= _FLAT_FAMILY_TOL:
        return RootScan(roots=(), identically_minimal=True)

    found: list[float] = []

    def record(t_root: float):
        for existing in found:
            if abs(existing - t_root) <= 2.0 * (ts[1] - ts[0]):
                return
        found.append(t_root)

    for i in range(len(ts) - 1):
        a, b = float(ts[i]), float(ts[i + 1])
        fa, fb = float(res[i]), float(res[i + 1])
        if fa == 0.0:
            record(a)
            continue
        if fa * fb < 0.0:
            for _ in range(200):
                mid = 0.5 * (a + b)
                fm = float(minimality_residual(space, mid))
                if fm == 0.0 or (b - a) <= 1e-14 * max(1.0, abs(mid)):
                    break
                if fa * fm < 0.0:
                    b, fb = mid, fm
                else:
                    a, fa = mid, fm
            root = 0.5 * (a + b)
            if abs(float(minimality_residual(space, root))) <= tol:
                record(root)
    if float(res[-1]) == 0.0:
        record(float(ts[-1]))
    shapes = tuple(slice_shape(space, t) for t in sorted(found))
    return RootScan(roots=shapes, identically_minimal=False)


def gauss_identity_check(space: WarpedSpace, t0: float) -> float:
    """On a totally geodesic slice, the Gauss equation ties the slice
    curvature to ambient quantities: 2 K = S - 2 Ric(n,n).  Returns the
    absolute discrepancy.  When additionally f'' and Ric(n,n) vanish at
    t0 the weighted form 2 K = S_f - lap_slice f (zero slice Laplacian
    for t-only weights) is checked as well and the worse discrepancy is
    returned."""
    shape = slice_shape(space, t0)
    if not shape.totallyGeodesic:
        raise PreconditionError(
            f"slice t0={t0} is not totally geodesic (|A| = "
            f"{np.sqrt(shape.normSqA):.3e})"
        )
    rep = closed_form_curvature(space, t0)
    two_k = 2.0 * shape.KSlice
    primary = abs(two_k - (rep.S - 2.0 * rep.ric33))
    worst = primary
    if abs(rep.fpp) <= _TOTALLY_GEODESIC_TOL and abs(rep.ric33) <= _TOTALLY_GEODESIC_TOL:
        worst = max(worst, abs(two_k - rep.Sf))
    return worst
