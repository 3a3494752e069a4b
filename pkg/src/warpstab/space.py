"""Warped-product model geometry dt^2 + g(t) ds^2 over a constant-curvature base.

The base surface carries the constant-curvature metric of kappa in
{-1, 0, +1}; the warp coefficient g multiplies the base metric directly
(so g is the squared warp factor of the usual convention).  The weight
f(t) turns the Riemannian volume into the measure e^{-f} dvol.  Ambient
dimension is fixed at 3 (surface base).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .expr import Expr, differentiate, evaluate, parse, simplify

__all__ = ["WarpedSpace", "s_kappa", "AMBIENT_DIM"]

AMBIENT_DIM = 3

_POSITIVITY_SAMPLES = 1001


def s_kappa(kappa: int, rho):
    """Polar radial coefficient of the constant-curvature base metric
    d rho^2 + s_kappa(rho)^2 d theta^2 (sinh / identity / sin)."""
    if kappa == -1:
        return np.sinh(rho)
    if kappa == 0:
        return np.asarray(rho, dtype=float) + 0.0
    if kappa == 1:
        return np.sin(rho)
    raise ValueError(f"base curvature must be -1, 0 or +1, got {kappa}")


@dataclass(frozen=True)
class WarpedSpace:
    """Model space dt^2 + g(t) ds^2 with weight f(t) on [t_min, t_max].

    Derivatives of g and f are prepared symbolically at construction, so
    every curvature formula downstream is exact in the coefficients.
    """

    kappa: int
    g: Expr
    f: Expr
    t_min: float
    t_max: float
    g1: Expr = field(init=False, repr=False, compare=False)
    g2: Expr = field(init=False, repr=False, compare=False)
    f1: Expr = field(init=False, repr=False, compare=False)
    f2: Expr = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kappa not in (-1, 0, 1):
            raise ValueError(f"base curvature must be -1, 0 or +1, got {self.kappa}")
        if not (self.t_min < self.t_max):
            raise ValueError(
                f"empty domain: t_min={self.t_min} must be < t_max={self.t_max}"
            )
        ts = np.linspace(self.t_min, self.t_max, _POSITIVITY_SAMPLES)
        gvals = evaluate(self.g, ts)
        if not np.all(np.isfinite(gvals)) or np.min(gvals) <= 0.0:
            raise ValueError(
                "warp must be positive on the domain: min g = "
                f"{float(np.min(gvals)):.6g} on [{self.t_min}, {self.t_max}]"
            )
        object.__setattr__(self, "g1", simplify(differentiate(self.g)))
        object.__setattr__(self, "g2", simplify(differentiate(self.g1)))
        object.__setattr__(self, "f1", simplify(differentiate(self.f)))
        object.__setattr__(self, "f2", simplify(differentiate(self.f1)))

    @classmethod
    def from_strings(
        cls,
        kappa: int,
        g: str,
        f: str,
        t_min: float,
        t_max: float,
        variable: str = "t",
    ) -> "WarpedSpace":
        return cls(kappa, parse(g, variable), parse(f, variable), t_min, t_max)

    # -- evaluation helpers (scalar or ndarray) ---------------------------

    def require(self, t) -> None:
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t_min) or np.any(t > self.t_max):
            raise DomainError(
                f"t outside domain [{self.t_min}, {self.t_max}]"
            )

    def g_at(self, t):
        return evaluate(self.g, t)

    def gp_at(self, t):
        return evaluate(self.g1, t)

    def gpp_at(self, t):
        return evaluate(self.g2, t)

    def f_at(self, t):
        return evaluate(self.f, t)

    def fp_at(self, t):
        return evaluate(self.f1, t)

    def fpp_at(self, t):
        return evaluate(self.f2, t)

    def base_radius(self, rho):
        """s_kappa profile of this space's base."""
        return s_kappa(self.kappa, rho)

    def grid(self, n: int) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, n)
