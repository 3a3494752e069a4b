"""Exception hierarchy shared by all warpstab modules.

Two failure families matter to callers: bad inputs (config, domain,
precondition violations) and numerical contract failures (an internal
consistency check that should have held did not).  The CLI maps the
first family to exit code 1 and the second to exit code 2.
"""

from __future__ import annotations


class WarpstabError(Exception):
    """Base class for all package errors."""


class ConfigError(WarpstabError):
    """Malformed or inconsistent scenario configuration."""


class DomainError(WarpstabError):
    """An argument lies outside its declared domain."""


class PreconditionError(WarpstabError):
    """An operation was called in a state its contract excludes."""


class NumericalContractError(WarpstabError):
    """A numerical invariant failed: carries what was observed vs tolerated."""

    def __init__(self, invariant: str, observed: float, tolerated: float):
        self.invariant = invariant
        self.observed = observed
        self.tolerated = tolerated
        super().__init__(
            f"numerical contract failed: {invariant} "
            f"(observed {observed:.6e}, tolerated {tolerated:.6e})"
        )


class QuadratureError(NumericalContractError):
    """Composite quadrature failed to converge at the requested tolerance."""


class StepUnderflowError(NumericalContractError):
    """Finite differencing hit cancellation: step and step/2 disagree."""
