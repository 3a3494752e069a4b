"""Composite Simpson quadrature with a panel-doubling convergence check."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import QuadratureError

__all__ = ["QuadratureSpec", "simpson", "integrate_checked", "DEFAULT_QUAD"]


@dataclass(frozen=True)
class QuadratureSpec:
    """panels: Simpson panels for the base rule (2*panels + 1 nodes);
    tol: relative agreement required between successive doublings;
    max_doublings: doublings tried before giving up."""

    panels: int = 2000
    tol: float = 1e-8
    max_doublings: int = 6


DEFAULT_QUAD = QuadratureSpec()


def simpson(fn: Callable, a: float, b: float, panels: int) -> float:
    """Composite Simpson rule; ``fn`` must accept an ndarray of nodes."""
    if b <= a:
        return 0.0
    n = 2 * max(int(panels), 1)
    x = np.linspace(a, b, n + 1)
    y = np.asarray(fn(x), dtype=float)
    h = (b - a) / n
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum()))


def _piecewise(fn, a, b, panels, cuts):
    total = 0.0
    pieces = [a, *cuts, b]
    span = b - a
    for left, right in zip(pieces[:-1], pieces[1:]):
        # proportional allocation; the small floor must stay below any
        # doubling level so successive refinements never coincide
        p = max(8, int(round(panels * (right - left) / span)))
        total += simpson(fn, left, right, p)
    return total


def integrate_checked(
    fn: Callable,
    a: float,
    b: float,
    quad: QuadratureSpec | None = None,
    breakpoints: Sequence[float] = (),
) -> float:
    """Integrate fn on [a, b], doubling panels until two successive panel
    counts agree to quad.tol (relative, floored at 1).  Interior
    ``breakpoints`` split the rule so integrand kinks never straddle a
    panel."""
    spec = quad or DEFAULT_QUAD
    cuts = sorted(c for c in breakpoints if a < c < b)
    panels = max(spec.panels, 16 * (len(cuts) + 1))
    coarse = _piecewise(fn, a, b, panels, cuts)
    for _ in range(spec.max_doublings):
        panels *= 2
        fine = _piecewise(fn, a, b, panels, cuts)
        if abs(fine - coarse) <= spec.tol * max(1.0, abs(fine)):
            return fine
        coarse = fine
    raise QuadratureError(
        f"quadrature non-convergence on [{a:.6g}, {b:.6g}]",
        abs(fine - coarse),
        spec.tol * max(1.0, abs(fine)),
    )
