"""Curvature of warped-product models by two independent paths.

Closed forms (frame: e1, e2 base-unit vectors with |e_i|^2 = g, e3 the
unit t-direction; curvature convention R(X,Y,Z,W) =
<nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z, W>, so the round
sphere has R_1221 > 0)::

    R_1221  = kappa*g - g'^2/4
    R_1331  = -g''/2 + g'^2/(4g)
    Ric_11  = kappa - g''/2                     (= Ric_22)
    Ric_33  = -g''/g + g'^2/(2g^2)
    Ricf_11 = Ric_11 + g'f'/2                   (Hess f in the same frame)
    Ricf_33 = (-2g''g + g'^2 + 2g^2 f'')/(2g^2)
    S       = 2*Ric_11/g + Ric_33
    lap f   = f'' + (g'/g) f'

The oracle path never sees these formulas: it builds the coordinate
metric diag(1, g(t), g(t)*s_kappa(rho)^2) in (t, rho, theta) and runs
generic index loops (Christoffel symbols, Riemann, Ricci, Hessian) with
4th-order central finite differences of the metric coefficients, then
normalizes back to the same frame.  Positivity of the Bakry-Emery
tensor Ric_f = Ric + Hess f is decided on the unit-frame diagonal
values (unitf11, ricf33).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalContractError, StepUnderflowError
from .space import WarpedSpace, s_kappa

__all__ = [
    "CurvatureReport",
    "CSV_COLUMNS",
    "closed_form_curvature",
    "curvature_rows",
    "FdTensors",
    "fd_tensors",
    "fd_oracle_curvature",
    "DEFAULT_FD_STEP",
]

# 4th-order stencils price truncation at ~h^4 and roundoff at ~eps/h^2;
# 2e-4 keeps the roundoff floor of second differences near 4e-9, inside
# the 1e-8 absolute band for vanishing components.
DEFAULT_FD_STEP = 2e-4

_OFFDIAG_TOL = 1e-6
_CONSISTENCY_TOL = 1e-3


@dataclass(frozen=True)
class CurvatureReport:
    """All curvature scalars at one parameter value, in the coordinate
    frame of the formulas above plus unit-frame normalizations."""

    t: float
    g: float
    gp: float
    gpp: float
    fp: float
    fpp: float
    R1221: float
    R1331: float
    ric11: float
    ric33: float
    ricf11: float
    ricf33: float
    unit11: float
    unitf11: float
    S: float
    lapf: float
    Sf: float
    minEig: float


CSV_COLUMNS = (
    "t", "g", "gp", "gpp", "fp", "fpp",
    "R1221", "R1331", "ric11", "ric33", "ricf11", "ricf33",
    "unitf11", "S", "lapf", "Sf", "minEig",
)


def _assemble_report(t, g, gp, gpp, fp, fpp, kappa) -> CurvatureReport:
    R1221 = kappa * g - gp * gp / 4.0
    R1331 = -gpp / 2.0 + gp * gp / (4.0 * g)
    ric11 = kappa - gpp / 2.0
    ric33 = -gpp / g + gp * gp / (2.0 * g * g)
    ricf11 = ric11 + fp * gp / 2.0
    ricf33 = (-2.0 * gpp * g + gp * gp + 2.0 * g * g * fpp) / (2.0 * g * g)
    unit11 = ric11 / g
    unitf11 = ricf11 / g
    S = 2.0 * ric11 / g + ric33
    lapf = fpp + (gp / g) * fp
    return CurvatureReport(
        t=t, g=g, gp=gp, gpp=gpp, fp=fp, fpp=fpp,
        R1221=R1221, R1331=R1331, ric11=ric11, ric33=ric33,
        ricf11=ricf11, ricf33=ricf33, unit11=unit11, unitf11=unitf11,
        S=S, lapf=lapf, Sf=S + lapf, minEig=min(unitf11, ricf33),
    )


def closed_form_curvature(space: WarpedSpace, t: float) -> CurvatureReport:
    """Exact curvature report from the symbolic derivatives of g and f."""
    space.require(t)
    return _assemble_report(
        float(t),
        space.g_at(t), space.gp_at(t), space.gpp_at(t),
        space.fp_at(t), space.fpp_at(t),
        float(space.kappa),
    )


def curvature_rows(space: WarpedSpace, ts) -> list[CurvatureReport]:
    return [closed_form_curvature(space, float(t)) for t in np.asarray(ts, dtype=float)]


# --------------------------------------------------------------------------
# finite-difference tensor oracle

def _d1(fn, x, k, h):
    e = np.zeros(3)
    e[k] = 1.0
    return (-fn(x + 2 * h * e) + 8.0 * fn(x + h * e)
            - 8.0 * fn(x - h * e) + fn(x - 2 * h * e)) / (12.0 * h)


def _d2(fn, x, k, h):
    e = np.zeros(3)
    e[k] = 1.0
    return (-fn(x + 2 * h * e) + 16.0 * fn(x + h * e) - 30.0 * fn(x)
            + 16.0 * fn(x - h * e) - fn(x - 2 * h * e)) / (12.0 * h * h)


_D1_WEIGHTS = ((2, -1.0), (1, 8.0), (-1, -8.0), (-2, 1.0))


def _d2_mixed(fn, x, k, l, hk, hl):
    ek = np.zeros(3)
    ek[k] = 1.0
    el = np.zeros(3)
    el[l] = 1.0
    acc = 0.0
    for i, wi in _D1_WEIGHTS:
        for j, wj in _D1_WEIGHTS:
            acc = acc + wi * wj * fn(x + i * hk * ek + j * hl * el)
    return acc / (144.0 * hk * hl)


@dataclass(frozen=True)
class FdTensors:
    """Raw coordinate tensors at a point of (t, rho, theta) space."""

    x: np.ndarray
    metric: np.ndarray
    ricci: np.ndarray
    riemann: np.ndarray
    scalar: float
    hess_f: np.ndarray
    lapf: float


def fd_tensors(space: WarpedSpace, t: float, rho: float, step: float) -> FdTensors:
    """Generic curvature pipeline: 4th-order finite differences of the
    metric coefficients, then index loops for Gamma, Riemann, Ricci and
    the weight Hessian.  Knows nothing about warped-product structure
    beyond the coordinate expression of the metric."""
    kappa = space.kappa

    def metric(x):
        g = space.g_at(x[0])
        sk = s_kappa(kappa, x[1])
        return np.diag([1.0, g, g * sk * sk])

    def weight(x):
        return space.f_at(x[0])

    x0 = np.array([t, rho, 0.3])
    h = np.array([step * (1.0 + abs(x0[k])) for k in range(3)])

    g = metric(x0)
    ginv = np.linalg.inv(g)
    dg = np.zeros((3, 3, 3))
    ddg = np.zeros((3, 3, 3, 3))
    for k in range(3):
        dg[k] = _d1(metric, x0, k, h[k])
        ddg[k, k] = _d2(metric, x0, k, h[k])
        for l in range(k):
            m = _d2_mixed(metric, x0, k, l, h[k], h[l])
            ddg[k, l] = m
            ddg[l, k] = m

    gamma = np.zeros((3, 3, 3))  # gamma[s, i, j]
    for s in range(3):
        for i in range(3):
            for j in range(3):
                gamma[s, i, j] = 0.5 * sum(
                    ginv[s, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
                    for l in range(3)
                )
    dginv = np.zeros((3, 3, 3))
    for k in range(3):
        dginv[k] = -ginv @ dg[k] @ ginv
    dgamma = np.zeros((3, 3, 3, 3))  # dgamma[k, s, i, j] = d_k gamma[s, i, j]
    for k in range(3):
        for s in range(3):
            for i in range(3):
                for j in range(3):
                    acc = 0.0
                    for l in range(3):
                        acc += dginv[k, s, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
                        acc += ginv[s, l] * (ddg[k, i, j, l] + ddg[k, j, i, l] - ddg[k, l, i, j])
                    dgamma[k, s, i, j] = 0.5 * acc

    riem = np.zeros((3, 3, 3, 3))  # riem[i, j, k, l] = <R(d_i, d_j) d_k, d_l>
    for i in range(3):
        for j in range(3):
            for k in range(3):
                for l in range(3):
                    acc = 0.0
                    for m in range(3):
                        term = dgamma[i, m, j, k] - dgamma[j, m, i, k]
                        for p in range(3):
                            term += gamma[p, j, k] * gamma[m, i, p] - gamma[p, i, k] * gamma[m, j, p]
                        acc += g[l, m] * term
                    riem[i, j, k, l] = acc

    ric = np.einsum("kl,kijl->ij", ginv, riem)
    scalar = float(np.einsum("ij,ij->", ginv, ric))

    df = np.array([_d1(weight, x0, k, h[k]) for k in range(3)])
    hess = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            if i == j:
                hess[i, j] = _d2(weight, x0, i, h[i])
            else:
                hess[i, j] = _d2_mixed(weight, x0, i, j, h[i], h[j])
            hess[i, j] -= sum(gamma[k, i, j] * df[k] for k in range(3))
    lapf = float(np.einsum("ij,ij->", ginv, hess))

    return FdTensors(x=x0, metric=g, ricci=ric, riemann=riem,
                     scalar=scalar, hess_f=hess, lapf=lapf)


def _fd_report(space: WarpedSpace, t: float, rho: float, step: float):
    ten = fd_tensors(space, t, rho, step)
    sk = float(s_kappa(space.kappa, rho))
    g = float(ten.metric[1, 1])
    ht = step * (1.0 + abs(t))

    def g_of(x):
        return space.g_at(x[0])

    def f_of(x):
        return space.f_at(x[0])

    x0 = np.array([t, rho, 0.3])
    gp = _d1(g_of, x0, 0, ht)
    gpp = _d2(g_of, x0, 0, ht)
    fp = _d1(f_of, x0, 0, ht)
    fpp = _d2(f_of, x0, 0, ht)

    R1221 = ten.riemann[1, 2, 2, 1] / (sk * sk)
    R1331 = ten.riemann[1, 0, 0, 1]
    ric11 = ten.ricci[1, 1]
    ric33 = ten.ricci[0, 0]
    ricf11 = ric11 + ten.hess_f[1, 1]
    ricf33 = ric33 + ten.hess_f[0, 0]
    unit11 = ric11 / g
    unitf11 = ricf11 / g
    report = CurvatureReport(
        t=t, g=g, gp=gp, gpp=gpp, fp=fp, fpp=fpp,
        R1221=R1221, R1331=R1331, ric11=ric11, ric33=ric33,
        ricf11=ricf11, ricf33=ricf33, unit11=unit11, unitf11=unitf11,
        S=ten.scalar, lapf=ten.lapf, Sf=ten.scalar + ten.lapf,
        minEig=min(unitf11, ricf33),
    )
    return report, ten


_REPORT_FIELDS = (
    "g", "gp", "gpp", "fp", "fpp", "R1221", "R1331",
    "ric11", "ric33", "ricf11", "ricf33", "unit11", "unitf11",
    "S", "lapf", "Sf",
)


def fd_oracle_curvature(
    space: WarpedSpace,
    t: float,
    rho: float = 1.0,
    step: float = DEFAULT_FD_STEP,
) -> CurvatureReport:
    """Curvature report from the generic finite-difference pipeline.

    The base point rho is arbitrary (the result must not depend on it);
    a half-step recomputation guards against cancellation, and mixed
    Ricci/Hessian components are required to vanish.
    """
    space.require(t)
    if not (1e-5 <= step <= 1e-2):
        raise ValueError(f"step must lie in [1e-5, 1e-2], got {step}")
    if rho <= 0.05:
        raise ValueError(f"base radius must exceed 0.05, got {rho}")
    if space.kappa == 1 and rho >= math.pi - 0.1:
        raise ValueError(f"base radius {rho} too close to the polar cut")

    full, ten = _fd_report(space, t, rho, step)
    half, _ = _fd_report(space, t, rho, step / 2.0)
    for name in _REPORT_FIELDS:
        a = getattr(full, name)
        b = getattr(half, name)
        tol = _CONSISTENCY_TOL * max(abs(a), abs(b), 1e-2)
        if abs(a - b) > tol:
            raise StepUnderflowError(
                f"finite-difference cancellation in {name}", abs(a - b), tol
            )

    off = max(
        abs(ten.ricci[0, 1]), abs(ten.ricci[0, 2]), abs(ten.ricci[1, 2]),
        abs(ten.hess_f[0, 1]), abs(ten.hess_f[0, 2]), abs(ten.hess_f[1, 2]),
    )
    if off > _OFFDIAG_TOL:
        raise NumericalContractError(
            "mixed Ricci/Hessian components must vanish", off, _OFFDIAG_TOL
        )
    return full
