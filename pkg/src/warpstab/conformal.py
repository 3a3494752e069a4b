"""Conformal perturbation g_t = e^{2 t lambda} g_0 of a flat 3-ball.

The probe deforms the metric near the boundary of a ball of radius R by
a radial profile lambda(r) = -rho(r)^5 with rho = R - r, supported on
the outer half of the ball, and evaluates the perturbed Bakry-Emery
curvature on the annulus aR < r < R.  First-order perturbation formulas
for a unit vector v (flat background, radial lambda):

    Ric_t(v,v) = -t (m-2) lambda_vv - t lap(lambda)
                 + t^2 (m-2) (v(lambda)^2 - |grad lambda|^2)

with m = 3, lambda_vv = lambda'' for radial v and lambda'/r for
tangential v.  For conformally flat metrics the first-order Christoffel
law

    Gamma^s_ij = t (lambda_j d_is + lambda_i d_js - lambda_s d_ij)

is exact, so its discrepancy against the assembled definition is pure
floating-point noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NumericalContractError
from .expr import Constant, Expr, differentiate, evaluate, parse, simplify

__all__ = [
    "ConformalProbe",
    "HessianGap",
    "conformal_ricci",
    "conformal_hessian_gap",
    "conformal_christoffel_check",
    "distance_function_bound",
    "annulus_min_ricci",
]

_DIM = 3


class HessianGap(NamedTuple):
    gap: float
    bound: float


@dataclass(frozen=True)
class ConformalProbe:
    """Radial conformal deformation of the flat ball of radius R.

    rho defaults to R - r and lam to -rho^5; background_weight is the
    unperturbed weight f(r) (zero unless supplied).
    """

    R: float
    a: float = 0.875
    t: float = 1e-3
    rho: Expr = None
    lam: Expr = None
    background_weight: Expr = None
    rho1: Expr = field(init=False, repr=False, compare=False)
    rho2: Expr = field(init=False, repr=False, compare=False)
    lam1: Expr = field(init=False, repr=False, compare=False)
    lam2: Expr = field(init=False, repr=False, compare=False)
    f1: Expr = field(init=False, repr=False, compare=False)
    f2: Expr = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (0.0 < self.a < 1.0):
            raise ValueError(f"annulus fraction must lie in (0, 1), got {self.a}")
        if self.R <= 0.0:
            raise ValueError(f"ball radius must be positive, got {self.R}")
        if self.t < 0.0:
            raise ValueError(f"perturbation size must be nonnegative, got {self.t}")
        if self.rho is None:
            object.__setattr__(self, "rho", parse(f"{self.R!r} - r", "r"))
        if self.lam is None:
            object.__setattr__(self, "lam", -(self.rho ** 5))
        if self.background_weight is None:
            object.__setattr__(self, "background_weight", Constant(0.0))
        object.__setattr__(self, "rho1", simplify(differentiate(self.rho)))
        object.__setattr__(self, "rho2", simplify(differentiate(self.rho1)))
        object.__setattr__(self, "lam1", simplify(differentiate(self.lam)))
        object.__setattr__(self, "lam2", simplify(differentiate(self.lam1)))
        object.__setattr__(
            self, "f1", simplify(differentiate(self.background_weight))
        )
        object.__setattr__(self, "f2", simplify(differentiate(self.f1)))

    def require_annulus(self, r: float) -> None:
        if not (self.a * self.R < r < self.R):
            raise DomainError(
                f"r={r} outside the annulus ({self.a * self.R}, {self.R})"
            )

    def annulus_samples(self, n: int) -> np.ndarray:
        return np.linspace(self.a * self.R, self.R, n + 2)[1:-1]


def conformal_ricci(probe: ConformalProbe, r: float, direction: str) -> float:
    """Perturbed Ricci Ric_t(v,v) for a background-unit vector v on the
    annulus; direction is 'radial' or 'tangential'."""
    probe.require_annulus(r)
    lp = evaluate(probe.lam1, r)
    lpp = evaluate(probe.lam2, r)
    lap = lpp + 2.0 * lp / r
    if direction == "radial":
        lam_vv, vlam = lpp, lp
    elif direction == "tangential":
        lam_vv, vlam = lp / r, 0.0
    else:
        raise ValueError(f"direction must be 'radial' or 'tangential', got {direction!r}")
    t = probe.t
    return (
        -t * (_DIM - 2) * lam_vv
        - t * lap
        + t * t * (_DIM - 2) * (vlam * vlam - lp * lp)
    )


def conformal_hessian_gap(probe: ConformalProbe, r: float) -> HessianGap:
    """Worst direction of the weight-Hessian change
    f_t(v,v) - f(v,v) = t(<grad f, grad lam> d_ij - lam_i f_j - lam_j f_i) v^i v^j,
    together with the a-priori bound -3 t |grad f| |grad lam|.

    For radial f and lam the direction dependence is
    t f' lam' (1 - 2 cos^2 alpha), so the minimum is -t |f' lam'|.
    """
    probe.require_annulus(r)
    fp = evaluate(probe.f1, r)
    lp = evaluate(probe.lam1, r)
    gap = -probe.t * abs(fp * lp)
    bound = -3.0 * probe.t * abs(fp) * abs(lp)
    if gap < bound - 1e-12 * (1.0 + abs(bound)):
        raise NumericalContractError("Hessian gap fell below its bound", gap, bound)
    return HessianGap(gap=gap, bound=bound)


def conformal_christoffel_check(probe: ConformalProbe, r: float) -> float:
    """Max discrepancy between the first-order Christoffel law and the
    symbols assembled from the metric e^{2 t lambda} delta by the raw
    definition (inverse metric times metric derivatives)."""
    probe.require_annulus(r)
    t = probe.t
    lam = evaluate(probe.lam, r)
    lp = evaluate(probe.lam1, r)
    x = np.array([r, 0.0, 0.0])
    lam_i = lp * x / r

    law = np.zeros((3, 3, 3))
    for s in range(3):
        for i in range(3):
            for j in range(3):
                law[s, i, j] = t * (
                    lam_i[j] * (i == s) + lam_i[i] * (j == s) - lam_i[s] * (i == j)
                )

    conf = math.exp(2.0 * t * lam)
    g = conf * np.eye(3)
    ginv = np.linalg.inv(g)
    # d_k g_ij = 2 t lam_k e^{2 t lam} delta_ij
    dg = np.zeros((3, 3, 3))
    for k in range(3):
        dg[k] = 2.0 * t * lam_i[k] * conf * np.eye(3)
    direct = np.zeros((3, 3, 3))
    for s in range(3):
        for i in range(3):
            for j in range(3):
                direct[s, i, j] = 0.5 * sum(
                    ginv[s, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
                    for l in range(3)
                )
    return float(np.max(np.abs(direct - law)))


def distance_function_bound(probe: ConformalProbe, r: float) -> tuple[float, float]:
    """Flat-case sanity bound for the distance profile rho: the worst of
    |lap rho + (m-2) Hess rho(v,v)| over directions, against
    9(2m-3)/(8 r)."""
    probe.require_annulus(r)
    rp = evaluate(probe.rho1, r)
    rpp = evaluate(probe.rho2, r)
    lap = rpp + 2.0 * rp / r
    radial = abs(lap + (_DIM - 2) * rpp)
    tangential = abs(lap + (_DIM - 2) * rp / r)
    value = max(radial, tangential)
    bound = 9.0 * (2 * _DIM - 3) / (8.0 * r)
    return value, bound


def annulus_min_ricci(probe: ConformalProbe, samples: int = 200) -> float:
    """Minimum of the perturbed Bakry-Emery form Ric_t(v,v) + (f_t)_vv
    over annulus samples and both principal directions.  With a zero
    background weight this is just the perturbed Ricci minimum."""
    best = math.inf
    for r in probe.annulus_samples(samples):
        r = float(r)
        fp = evaluate(probe.f1, r)
        fpp = evaluate(probe.f2, r)
        lp = evaluate(probe.lam1, r)
        shift = probe.t * fp * lp  # change of f_vv: -shift radially, +shift tangentially
        radial = conformal_ricci(probe, r, "radial") + fpp - shift
        tangential = conformal_ricci(probe, r, "tangential") + fp / r + shift
        best = min(best, radial, tangential)
    return best
