"""Logarithmic-cutoff energy decay and weighted sphere-area comparison.

Works on rotationally symmetric measure models dr^2 + g(r) ds^2 on the
round (m-1)-sphere with weight f(r), where the weighted sphere area is

    A_f(r) = omega_{m-1} g(r)^{(m-1)/2} e^{-f(r)}.

The cutoff energy E(a) = int_a^{a^2} V'(r) / (r^2 log^2 a) dr decays
like 1/log a whenever the weighted-volume growth V is at most
quadratic; the comparison bound caps the sphere-area ratio by
e^{4 A(R)} (r2/r1)^{m-1} with A(R) the sup of |f| on the 3R-ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalContractError, PreconditionError
from .expr import Expr, evaluate, parse
from .quadrature import QuadratureSpec, integrate_checked
from .space import WarpedSpace

__all__ = [
    "RadialMeasureModel",
    "ComparisonReport",
    "DecayFit",
    "GrowthCheck",
    "unit_sphere_area",
    "cutoff_energy",
    "decay_fit",
    "sphere_area_ratio",
    "ball_volume",
    "polynomial_growth_check",
]

_SUP_SCAN = 2001
_HYPOTHESIS_SCAN = 1001
_HYPOTHESIS_TOL = 1e-9


def unit_sphere_area(m: int) -> float:
    """Area of the unit (m-1)-sphere."""
    return 2.0 * math.pi ** (m / 2.0) / math.gamma(m / 2.0)


@dataclass(frozen=True)
class RadialMeasureModel:
    """dr^2 + g(r) ds^2_{S^{m-1}} with weight f(r) on [r_min, r_max],
    pole excluded (r_min > 0)."""

    m: int
    warp: Expr
    weight: Expr
    r_min: float
    r_max: float
    sup_weight: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"ambient dimension must be at least 2, got {self.m}")
        if not (0.0 < self.r_min < self.r_max):
            raise ValueError(
                f"need 0 < r_min < r_max, got [{self.r_min}, {self.r_max}]"
            )
        rs = np.linspace(self.r_min, self.r_max, _SUP_SCAN)
        g = evaluate(self.warp, rs)
        if not np.all(np.isfinite(g)) or np.min(g) <= 0.0:
            raise ValueError("warp must be positive on the domain")
        f = evaluate(self.weight, rs)
        if not np.all(np.isfinite(f)):
            raise ValueError("weight must be finite on the domain")
        object.__setattr__(self, "sup_weight", float(np.max(np.abs(f))))

    @classmethod
    def from_strings(cls, m, warp, weight, r_min, r_max, variable="r"):
        return cls(m, parse(warp, variable), parse(weight, variable), r_min, r_max)

    def sphere_area(self, r):
        g = evaluate(self.warp, r)
        f = evaluate(self.weight, r)
        return unit_sphere_area(self.m) * g ** ((self.m - 1) / 2.0) * np.exp(-f)

    def as_warped_space(self) -> WarpedSpace:
        """The m = 3 model is a warped space over the round 2-sphere;
        used to verify the curvature hypothesis with the engine."""
        if self.m != 3:
            raise PreconditionError(
                "curvature hypothesis check is only wired for m = 3"
            )
        return WarpedSpace(1, self.warp, self.weight, self.r_min, self.r_max)


@dataclass(frozen=True)
class DecayFit:
    """slope of log E(a) against log(1/log a); hypothesis_ok records
    whether the energies decayed at all along the grid."""

    slope: float
    energies: tuple[float, ...]
    hypothesis_ok: bool


@dataclass(frozen=True)
class ComparisonReport:
    r1: float
    r2: float
    R: float
    ratio: float
    bound: float
    AR: float
    margin: float
    hypothesis_ok: bool | None  # None: not verifiable (m != 3)


@dataclass(frozen=True)
class GrowthCheck:
    slope: float
    limit: float
    passed: bool
    hypothesis_ok: bool | None


def cutoff_energy(
    growth_derivative: "Expr | str",
    a: float,
    quad: QuadratureSpec | None = None,
) -> float:
    """E(a) = int_a^{a^2} V'(r) / (r^2 log^2 a) dr.

    Integrated in log r (the interval spans decades); for quadratic
    growth V'(r) = 2 C r this gives exactly 2 C / log a.
    """
    vp = parse(growth_derivative, "r") if isinstance(growth_derivative, str) else growth_derivative
    if a <= 1.0:
        raise ValueError(f"cutoff scale must exceed 1, got {a}")
    log_a = math.log(a)
    samples = np.exp(np.linspace(log_a, 2.0 * log_a, 201))
    vals = evaluate(vp, samples)
    if np.min(vals) < -1e-12 * max(1.0, float(np.max(np.abs(vals)))):
        raise PreconditionError("growth derivative must be nonnegative on [a, a^2]")

    def integrand(x):
        r = np.exp(x)
        return evaluate(vp, r) * np.exp(-x) / (log_a * log_a)

    return integrate_checked(integrand, log_a, 2.0 * log_a, quad)


def decay_fit(
    growth_derivative: "Expr | str",
    a_grid,
    quad: QuadratureSpec | None = None,
) -> DecayFit:
    """Least-squares slope of log E(a) against log(1/log a); slope 1
    is the signature of 1/log a decay."""
    a_grid = [float(a) for a in a_grid]
    if len(a_grid) < 4:
        raise ValueError("need at least 4 cutoff scales")
    if any(b <= a for a, b in zip(a_grid, a_grid[1:])):
        raise ValueError("cutoff scales must be increasing")
    if a_grid[0] <= math.e:
        raise ValueError("cutoff scales must exceed e")
    energies = [cutoff_energy(growth_derivative, a, quad) for a in a_grid]
    if any(E <= 0.0 for E in energies):
        raise PreconditionError("cutoff energies must be positive for the fit")
    spread = max(energies) - min(energies)
    if spread <= 1e-15 * max(energies):
        raise PreconditionError("degenerate fit: all cutoff energies equal")
    x = np.log(1.0 / np.log(a_grid))
    y = np.log(energies)
    slope = float(np.polyfit(x, y, 1)[0])
    decaying = bool(np.all(np.diff(energies) < 0.0))
    return DecayFit(slope=slope, energies=tuple(energies), hypothesis_ok=decaying)


def _curvature_hypothesis(model: RadialMeasureModel) -> bool | None:
    """Ric_f >= 0 on the model, checked with the curvature engine where
    the model is expressible as a warped space (m = 3)."""
    if model.m != 3:
        return None
    from .curvature import closed_form_curvature

    space = model.as_warped_space()
    worst = math.inf
    for t in np.linspace(model.r_min, model.r_max, _HYPOTHESIS_SCAN):
        worst = min(worst, closed_form_curvature(space, float(t)).minEig)
    return bool(worst >= -_HYPOTHESIS_TOL)


def sphere_area_ratio(
    model: RadialMeasureModel, r1: float, r2: float, R: float
) -> ComparisonReport:
    """Weighted sphere-area ratio against the comparison bound
    e^{4 A(R)} (r2/r1)^{m-1}, A(R) = sup |f| over [r_min, 3R]."""
    if not (model.r_min <= r1 < r2 < R):
        raise ValueError(f"need r_min <= r1 < r2 < R, got {r1}, {r2}, {R}")
    if R > model.r_max / 3.0:
        raise ValueError(
            f"R={R} too large: the 3R sup window must fit in the domain"
        )
    scan = np.linspace(model.r_min, 3.0 * R, _SUP_SCAN)
    AR = float(np.max(np.abs(evaluate(model.weight, scan))))
    ratio = float(model.sphere_area(r2) / model.sphere_area(r1))
    bound = math.exp(4.0 * AR) * (r2 / r1) ** (model.m - 1)
    return ComparisonReport(
        r1=r1, r2=r2, R=R,
        ratio=ratio, bound=bound, AR=AR, margin=bound - ratio,
        hypothesis_ok=_curvature_hypothesis(model),
    )


def ball_volume(
    model: RadialMeasureModel, r: float, quad: QuadratureSpec | None = None
) -> float:
    """Weighted volume of the ball shell [r_min, r]."""
    if not (model.r_min <= r <= model.r_max):
        raise ValueError(f"radius {r} outside [{model.r_min}, {model.r_max}]")
    if r == model.r_min:
        return 0.0
    return integrate_checked(model.sphere_area, model.r_min, r, quad)


def polynomial_growth_check(
    model: RadialMeasureModel,
    exponent: float,
    quad: QuadratureSpec | None = None,
    fit_points: int = 48,
) -> GrowthCheck:
    """Fit the log-log growth slope of the weighted ball volume on the
    upper half of the domain.  When the curvature hypothesis holds
    (Ric_f >= 0; the weight is bounded by construction) the slope must
    not exceed exponent + 0.05."""
    mid = 0.5 * (model.r_min + model.r_max)
    radii = np.linspace(mid, model.r_max, fit_points)
    vols = np.array([ball_volume(model, float(r), quad) for r in radii])
    if np.min(vols) <= 0.0:
        raise PreconditionError("ball volumes must be positive for the growth fit")
    slope = float(np.polyfit(np.log(radii), np.log(vols), 1)[0])
    limit = exponent + 0.05
    passed = slope <= limit
    hypothesis = _curvature_hypothesis(model)
    if hypothesis and not passed:
        raise NumericalContractError(
            "polynomial growth order exceeded under Ric_f >= 0", slope, limit
        )
    return GrowthCheck(slope=slope, limit=limit, passed=passed, hypothesis_ok=hypothesis)
