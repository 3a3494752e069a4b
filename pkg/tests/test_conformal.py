import numpy as np
import pytest

from warpstab import (
    ConformalProbe,
    annulus_min_ricci,
    conformal_christoffel_check,
    conformal_hessian_gap,
    conformal_ricci,
    distance_function_bound,
)
from warpstab.errors import DomainError
from warpstab.expr import parse


@pytest.fixture
def probe():
    return ConformalProbe(R=1.0, t=1e-3)


class TestRicci:
    def test_radial_value(self, probe):
        # lambda = -rho^5 with rho = 1 - r: value t*(40 rho^3 - 10 rho^4 / r)
        got = conformal_ricci(probe, 0.9, "radial")
        rho = 0.1
        want = 1e-3 * (40 * rho**3 - 10 * rho**4 / 0.9)
        assert got == pytest.approx(want, rel=1e-12)
        assert got == pytest.approx(3.8889e-5, rel=1e-4)

    def test_tangential_value(self, probe):
        got = conformal_ricci(probe, 0.9, "tangential")
        rho = 0.1
        want = 1e-3 * (20 * rho**3 - 15 * rho**4 / 0.9) - 25e-6 * rho**8
        assert got == pytest.approx(want, rel=1e-12)

    def test_unperturbed_vanishes(self):
        probe = ConformalProbe(R=1.0, t=0.0)
        for r in (0.89, 0.95, 0.99):
            assert conformal_ricci(probe, r, "radial") == 0.0
            assert conformal_ricci(probe, r, "tangential") == 0.0

    def test_outside_annulus_rejected(self, probe):
        with pytest.raises(DomainError):
            conformal_ricci(probe, 0.5, "radial")
        with pytest.raises(DomainError):
            conformal_ricci(probe, 1.01, "radial")

    def test_bad_direction(self, probe):
        with pytest.raises(ValueError):
            conformal_ricci(probe, 0.9, "diagonal")

    @pytest.mark.parametrize("t", [1e-4, 1e-3, 1e-2])
    def test_annulus_positivity(self, t):
        probe = ConformalProbe(R=1.0, t=t)
        assert annulus_min_ricci(probe, samples=200) > 0.0


class TestChristoffel:
    @pytest.mark.parametrize("t,r", [(0.0, 0.9), (1e-3, 0.9), (1e-2, 0.95)])
    def test_law_is_exact(self, t, r):
        probe = ConformalProbe(R=1.0, t=t)
        assert conformal_christoffel_check(probe, r) <= 1e-12

    def test_zero_perturbation(self):
        probe = ConformalProbe(R=1.0, t=0.0)
        assert conformal_christoffel_check(probe, 0.9) == 0.0


class TestHessianGap:
    def test_zero_weight(self, probe):
        gap, bound = conformal_hessian_gap(probe, 0.9)
        assert gap == 0.0 and bound == 0.0

    def test_sine_weight_bound(self):
        probe = ConformalProbe(R=1.0, t=1e-3, background_weight=parse("sin(r)", "r"))
        for r in probe.annulus_samples(200):
            gap, bound = conformal_hessian_gap(probe, float(r))
            assert gap >= bound - 1e-15
        gap, bound = conformal_hessian_gap(probe, 0.9)
        assert bound == pytest.approx(-3e-3 * np.cos(0.9) * 5 * 0.1**4, rel=1e-12)

    def test_gap_linear_in_t(self):
        base = None
        for t in (1e-3, 5e-4, 2.5e-4):
            probe = ConformalProbe(
                R=1.0, t=t, background_weight=parse("sin(r)", "r")
            )
            gap, _ = conformal_hessian_gap(probe, 0.9)
            if base is None:
                base = gap / t
            assert gap / t == pytest.approx(base, rel=1e-12)


class TestDistanceBound:
    def test_flat_annulus_bound(self, probe):
        for r in probe.annulus_samples(50):
            value, bound = distance_function_bound(probe, float(r))
            assert value == pytest.approx(3.0 / r, rel=1e-12)
            assert bound == pytest.approx(27.0 / (8.0 * r), rel=1e-12)
            assert value <= bound


class TestProbeValidation:
    def test_bad_fraction(self):
        with pytest.raises(ValueError):
            ConformalProbe(R=1.0, a=1.5)

    def test_negative_size(self):
        with pytest.raises(ValueError):
            ConformalProbe(R=1.0, t=-1e-3)

    def test_default_profile_wiring(self, probe):
        # lambda = -(1 - r)^5 at r = 0.9 -> -1e-5
        from warpstab.expr import evaluate

        assert evaluate(probe.lam, 0.9) == pytest.approx(-1e-5, rel=1e-12)
