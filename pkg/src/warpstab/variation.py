"""First and second variation of weighted area, and the stability spectrum.

Everything here is rotationally symmetric on the base, so a normal
variation is a radial profile lambda(rho) supported in a base ball of
radius rho_max.  The deformed hypersurface is the graph
t = t0 + s * lambda(rho), which is the exact normal-exponential image
because vertical lines are geodesics.  Its weighted area is

    A_f(s) = 2 pi  int_0^{rho_max} e^{-f(u)} g(u)
             sqrt(1 + s^2 lambda'(rho)^2 / g(u))  s_kappa(rho) d rho,
    u = t0 + s lambda(rho).

At a critical slice (H = f_n) the second derivative of A_f equals the
quadratic form

    Q(lambda) = int ( |grad lambda|^2
                - lambda^2 (Ric_f(n,n) + |A|^2) ) e^{-f} d sigma,

which this module computes both analytically (closed-form potential
from the curvature engine) and by Richardson-extrapolated second
differences of A_f — the definitional oracle.  The stability spectrum
is the Dirichlet spectrum of the radial reduction of -(lap_f + q),
discretized on a cell-centered grid and solved by bisection on Sturm
sign counts of the symmetric tridiagonal matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .curvature import closed_form_curvature
from .errors import DomainError, NumericalContractError, PreconditionError
from .expr import Expr, differentiate, evaluate, parse, simplify
from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate_checked
from .slices import slice_shape
from .space import WarpedSpace, s_kappa

__all__ = [
    "RadialProfile",
    "SpectralResult",
    "weighted_area",
    "first_variation",
    "second_variation_form",
    "second_variation_fd",
    "stability_spectrum",
    "stability_potential",
]

_END_VALUE_TOL = 1e-12
_POLE_SLOPE_TOL = 1e-10
_MINIMAL_RESIDUAL_TOL = 1e-8
_CONVERGENCE_TOL = 1e-6
_MAX_GRID_DOUBLINGS = 6


class RadialProfile:
    """Radial variation profile on [0, rho_max] with a Dirichlet outer
    end (lambda(rho_max) = 0, standing in for compact support) and pole
    regularity (lambda'(0) = 0)."""

    def __init__(
        self,
        kind: str,
        rho_max: float,
        value_fn: Callable,
        deriv_fn: Callable,
        breakpoints: Sequence[float] = (),
        label: str = "",
    ):
        if rho_max <= 0:
            raise ValueError(f"support radius must be positive, got {rho_max}")
        self.kind = kind
        self.rho_max = float(rho_max)
        self._value = value_fn
        self._deriv = deriv_fn
        self.breakpoints = tuple(breakpoints)
        self.label = label or kind
        end = abs(float(value_fn(np.asarray(rho_max, dtype=float))))
        if end > _END_VALUE_TOL:
            raise ValueError(
                f"profile must vanish at rho_max (got {end:.3e} at {rho_max})"
            )
        slope = abs(float(deriv_fn(np.asarray(0.0, dtype=float))))
        if slope > _POLE_SLOPE_TOL:
            raise ValueError(
                f"profile slope must vanish at the pole (got {slope:.3e})"
            )

    def value(self, rho):
        return self._value(np.asarray(rho, dtype=float))

    def deriv(self, rho):
        return self._deriv(np.asarray(rho, dtype=float))

    def __repr__(self):
        return f"RadialProfile({self.label}, rho_max={self.rho_max})"

    @classmethod
    def cosine_cap(cls, rho_max: float) -> "RadialProfile":
        """lambda(rho) = cos(pi rho / (2 rho_max))."""
        w = math.pi / (2.0 * rho_max)
        return cls(
            "cosine_cap",
            rho_max,
            lambda r: np.cos(w * r),
            lambda r: -w * np.sin(w * r),
            label=f"cosine_cap({rho_max:g})",
        )

    @classmethod
    def log_cutoff(cls, a: float) -> "RadialProfile":
        """1 on [0, a], logarithmic decay to 0 on (a, a^2)."""
        if a <= 1.0:
            raise ValueError(f"log cutoff needs a > 1, got {a}")
        log_a = math.log(a)

        def value(r):
            safe = np.maximum(r, 1e-300)
            outer = (2.0 * log_a - np.log(safe)) / log_a
            return np.where(r <= a, 1.0, np.maximum(outer, 0.0))

        def deriv(r):
            safe = np.maximum(r, 1e-300)
            return np.where(r <= a, 0.0, -1.0 / (safe * log_a))

        return cls(
            "log_cutoff", a * a, value, deriv,
            breakpoints=(a,), label=f"log_cutoff({a:g})",
        )

    @classmethod
    def from_expression(
        cls, source: "Expr | str", rho_max: float, variable: str = "r"
    ) -> "RadialProfile":
        e = parse(source, variable) if isinstance(source, str) else source
        d = simplify(differentiate(e))
        return cls(
            "expression",
            rho_max,
            lambda r: evaluate(e, r),
            lambda r: evaluate(d, r),
            label=f"expression({e})",
        )


# --------------------------------------------------------------------------
# weighted area and its variations

def weighted_area(
    space: WarpedSpace,
    t0: float,
    profile: RadialProfile,
    s: float,
    quad: QuadratureSpec | None = None,
) -> float:
    """Weighted area of the graph t = t0 + s * lambda(rho) over the base
    ball of radius rho_max."""
    space.require(t0)

    def integrand(rho):
        u = t0 + s * profile.value(rho)
        if np.any(u < space.t_min) or np.any(u > space.t_max):
            raise DomainError("variation graph exits the model domain")
        g = space.g_at(u)
        lam_p = profile.deriv(rho)
        dens = np.exp(-space.f_at(u)) * g * np.sqrt(1.0 + (s * lam_p) ** 2 / g)
        return dens * s_kappa(space.kappa, rho)

    return 2.0 * math.pi * integrate_checked(
        integrand, 0.0, profile.rho_max, quad, profile.breakpoints
    )


def first_variation(
    space: WarpedSpace,
    t0: float,
    profile: RadialProfile,
    quad: QuadratureSpec | None = None,
) -> float:
    """d/ds of the weighted area at s = 0:
    integral of (H - f_n) lambda e^{-f} over the slice."""
    shape = slice_shape(space, t0)
    factor = shape.residual * math.exp(-space.f_at(t0)) * space.g_at(t0)
    if factor == 0.0:
        return 0.0
    profile_mass = integrate_checked(
        lambda rho: profile.value(rho) * s_kappa(space.kappa, rho),
        0.0, profile.rho_max, quad, profile.breakpoints,
    )
    return 2.0 * math.pi * factor * profile_mass


def stability_potential(space: WarpedSpace, t0: float) -> float:
    """q = Ric_f(n,n) + |A|^2 at the slice, the zeroth-order coefficient
    of the stability form."""
    rep = closed_form_curvature(space, t0)
    shape = slice_shape(space, t0)
    return rep.ricf33 + shape.normSqA


def _require_minimal(space: WarpedSpace, t0: float) -> None:
    res = slice_shape(space, t0).residual
    if abs(res) > _MINIMAL_RESIDUAL_TOL:
        raise PreconditionError(
            f"slice t0={t0} is not weighted-minimal (H - f_n = {res:.3e}); "
            "the second variation is only variation-independent at critical points"
        )


def second_variation_form(
    space: WarpedSpace,
    t0: float,
    profile: RadialProfile,
    quad: QuadratureSpec | None = None,
) -> float:
    """Q(lambda) with the unit-frame slice gradient
    |grad lambda|^2 = lambda'(rho)^2 / g(t0)."""
    _require_minimal(space, t0)
    g0 = space.g_at(t0)
    q = stability_potential(space, t0)

    def integrand(rho):
        lam = profile.value(rho)
        lam_p = profile.deriv(rho)
        return (lam_p * lam_p / g0 - q * lam * lam) * s_kappa(space.kappa, rho)

    weight = 2.0 * math.pi * math.exp(-space.f_at(t0)) * g0
    return weight * integrate_checked(
        integrand, 0.0, profile.rho_max, quad, profile.breakpoints
    )


def second_variation_fd(
    space: WarpedSpace,
    t0: float,
    profile: RadialProfile,
    steps: Sequence[float] = (1e-2, 5e-3, 2.5e-3),
    quad: QuadratureSpec | None = None,
) -> float:
    """Definitional oracle for the second variation: Richardson-
    extrapolated centered second differences of the weighted area in s.
    ``steps`` must be successive halvings."""
    _require_minimal(space, t0)
    steps = [float(h) for h in steps]
    if len(steps) < 2:
        raise ValueError("need at least two steps for extrapolation")
    for h0, h1 in zip(steps, steps[1:]):
        if not math.isclose(h1, h0 / 2.0, rel_tol=1e-12):
            raise ValueError("steps must be successive halvings")
    spec = quad or DEFAULT_QUAD
    a0 = weighted_area(space, t0, profile, 0.0, spec)
    column = [
        (weighted_area(space, t0, profile, h, spec)
         - 2.0 * a0
         + weighted_area(space, t0, profile, -h, spec)) / (h * h)
        for h in steps
    ]
    # Richardson tableau for an error series in h^2
    prev_best = column[0]
    for level in range(1, len(column)):
        factor = 4.0 ** level
        column = [
            (factor * column[i + 1] - column[i]) / (factor - 1.0)
            for i in range(len(column) - 1)
        ]
        best = column[0]
        # once two extrapolated levels exist, they must agree
        if len(column) == 1 and level >= 2:
            if abs(best - prev_best) > 1e-3 * max(1.0, abs(best)):
                raise NumericalContractError(
                    "second-variation extrapolation did not settle",
                    abs(best - prev_best),
                    1e-3 * max(1.0, abs(best)),
                )
        prev_best = best
    return prev_best


# --------------------------------------------------------------------------
# stability spectrum (radial Sturm-Liouville reduction)

@dataclass(frozen=True)
class SpectralResult:
    rho_max: float
    grid_size: int
    mu1: float
    neg_count: int
    convergence_delta: float


def _assemble_tridiagonal(space, t0, q, rho_max, n):
    """Cell-centered discretization of -(1/w)(w lambda'/g)' - q with
    w = s_kappa, zero flux at the pole (w(0) = 0) and Dirichlet at
    rho_max, symmetrized to a standard tridiagonal eigenproblem."""
    g0 = space.g_at(t0)
    h = rho_max / n
    centers = (np.arange(n) + 0.5) * h
    faces = np.arange(n + 1) * h
    wf = np.asarray(s_kappa(space.kappa, faces), dtype=float)
    wc = np.asarray(s_kappa(space.kappa, centers), dtype=float)
    diag = (wf[:-1] + wf[1:]) / (h * h * g0)
    diag[-1] = (wf[-2] + 2.0 * wf[-1]) / (h * h * g0)
    off = -wf[1:-1] / (h * h * g0)
    d = diag / wc - q
    e = off / np.sqrt(wc[:-1] * wc[1:])
    return d, e


def _sturm_count(d, e, x: float) -> int:
    """Number of eigenvalues of the tridiagonal (d, e) below x, by the
    sign count of the LDL^T pivots.  Near-zero pivots are pushed to
    -pivmin before the sign test so exact hits on Gershgorin/diagonal
    values keep the count monotone."""
    pivmin = 1e-250 * max(1.0, float(np.max(e * e)) if len(e) else 1.0)
    count = 0
    pivot = d[0] - x
    if abs(pivot) <= pivmin:
        pivot = -pivmin
    if pivot < 0.0:
        count += 1
    for i in range(1, len(d)):
        pivot = d[i] - x - e[i - 1] * e[i - 1] / pivot
        if abs(pivot) <= pivmin:
            pivot = -pivmin
        if pivot < 0.0:
            count += 1
    return count


def _smallest_eigenvalue(d, e) -> float:
    pad = np.zeros(len(d))
    pad[:-1] += np.abs(e)
    pad[1:] += np.abs(e)
    lo = float(np.min(d - pad))
    hi = float(np.max(d + pad))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _sturm_count(d, e, mid) >= 1:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-13 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def stability_spectrum(
    space: WarpedSpace,
    t0: float,
    rho_max: float,
    grid_size: int = 64,
    q_shift: float = 0.0,
    convergence_tol: float = _CONVERGENCE_TOL,
) -> SpectralResult:
    """Lowest Dirichlet eigenvalue and negative-eigenvalue count of the
    stability operator on the base ball of radius rho_max, with grid
    doubling until |mu1(N) - mu1(2N)| passes the convergence contract.

    ``q_shift`` adds a constant to the potential (test hook: mu1 must
    drop by exactly the shift)."""
    _require_minimal(space, t0)
    if rho_max <= 0:
        raise ValueError("rho_max must be positive")
    if space.kappa == 1 and rho_max >= math.pi:
        raise DomainError("spectral domain must stay inside the polar cut")
    if grid_size < 64:
        raise ValueError("grid_size must be at least 64")
    q = stability_potential(space, t0) + q_shift

    n = int(grid_size)
    d, e = _assemble_tridiagonal(space, t0, q, rho_max, n)
    mu_prev = _smallest_eigenvalue(d, e)
    for _ in range(_MAX_GRID_DOUBLINGS):
        n *= 2
        d, e = _assemble_tridiagonal(space, t0, q, rho_max, n)
        mu = _smallest_eigenvalue(d, e)
        delta = abs(mu - mu_prev)
        # the stop rule scales with the unshifted operator's eigenvalue
        # (mu + q_shift), so a constant potential shift cannot change the
        # grid ladder and the shift acts exactly on the result
        if delta <= convergence_tol * (1.0 + abs(mu + q_shift)):
            return SpectralResult(
                rho_max=float(rho_max),
                grid_size=n,
                mu1=mu,
                neg_count=_sturm_count(d, e, 0.0),
                convergence_delta=delta,
            )
        mu_prev = mu
    raise NumericalContractError(
        f"spectrum did not converge after {_MAX_GRID_DOUBLINGS} grid doublings",
        delta,
        convergence_tol,
    )
