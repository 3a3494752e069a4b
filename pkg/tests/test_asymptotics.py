import math

import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad

from warpstab import (
    RadialMeasureModel,
    ball_volume,
    cutoff_energy,
    decay_fit,
    polynomial_growth_check,
    sphere_area_ratio,
    unit_sphere_area,
)
from warpstab.errors import PreconditionError


@pytest.fixture(scope="module")
def flat_model():
    return RadialMeasureModel.from_strings(3, "r^2", "0", 0.1, 9.0)


@pytest.fixture(scope="module")
def sphere_model():
    return RadialMeasureModel.from_strings(3, "sin(r)^2", "0", 0.1, 3.1)


class TestCutoffEnergy:
    def test_quadratic_growth_closed_form(self):
        # V' = 2r gives exactly 2 / log a
        got = cutoff_energy("2*r", 100.0)
        assert got == pytest.approx(2.0 / math.log(100.0), rel=1e-6)

    @pytest.mark.parametrize("a", [1e2, 1e3, 1e4])
    def test_energy_times_log_constant(self, a):
        assert cutoff_energy("2*r", a) * math.log(a) == pytest.approx(2.0, rel=1e-6)

    def test_zero_growth(self):
        assert cutoff_energy("0", 50.0) == 0.0

    def test_negative_growth_rejected(self):
        with pytest.raises(PreconditionError):
            cutoff_energy("-r", 10.0)

    def test_scale_must_exceed_one(self):
        with pytest.raises(ValueError):
            cutoff_energy("2*r", 0.5)


class TestDecayFit:
    def test_quadratic_slope_one(self):
        fit = decay_fit("2*r", [1e2, 1e3, 1e4, 1e5])
        assert fit.slope == pytest.approx(1.0, abs=1e-3)
        assert fit.hypothesis_ok

    def test_linear_growth_derivative(self):
        fit = decay_fit("r", [1e2, 1e3, 1e4, 1e5])
        assert fit.slope == pytest.approx(1.0, abs=1e-3)

    def test_quartic_growth_flags_violation(self):
        fit = decay_fit("4*r^3", [1e2, 1e3, 1e4, 1e5])
        assert abs(fit.slope - 1.0) > 0.05
        assert not fit.hypothesis_ok

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            decay_fit("2*r", [1e2, 1e3])
        with pytest.raises(ValueError):
            decay_fit("2*r", [1e3, 1e2, 1e4, 1e5])


class TestComparison:
    def test_flat_equality_case(self, flat_model):
        rep = sphere_area_ratio(flat_model, 1.0, 2.0, 2.5)
        assert rep.ratio == pytest.approx(4.0, abs=1e-12)
        assert rep.bound == pytest.approx(4.0, abs=1e-12)
        assert abs(rep.margin) <= 1e-12
        assert rep.AR == 0.0
        assert rep.hypothesis_ok is True

    def test_round_sphere_strict_margin(self, sphere_model):
        rep = sphere_area_ratio(sphere_model, 0.5, 1.0, 1.02)
        want = math.sin(1.0) ** 2 / math.sin(0.5) ** 2
        assert rep.ratio == pytest.approx(want, rel=1e-12)
        assert rep.ratio == pytest.approx(3.0806, abs=1e-4)
        assert rep.bound == pytest.approx(4.0, abs=1e-12)
        assert rep.margin > 0.0
        assert rep.hypothesis_ok is True

    def test_perturbed_sphere(self):
        model = RadialMeasureModel.from_strings(3, "sin(r)^2", "0.1*cos(r)", 0.1, 3.1)
        rep = sphere_area_ratio(model, 0.5, 1.0, 1.02)
        assert rep.hypothesis_ok is True
        assert rep.AR <= 0.1 + 1e-12
        assert rep.ratio <= math.exp(0.4) * 4.0
        assert rep.margin > 0.0

    def test_negative_curvature_marks_inapplicable(self):
        # exponential warp on the sphere base has Ric_f(n,n) < 0
        model = RadialMeasureModel.from_strings(3, "exp(2*r)", "0", 0.1, 9.0)
        rep = sphere_area_ratio(model, 1.0, 2.0, 2.5)
        assert rep.hypothesis_ok is False

    def test_dimension_other_than_three_unverified(self):
        model = RadialMeasureModel.from_strings(4, "r^2", "0", 0.1, 9.0)
        rep = sphere_area_ratio(model, 1.0, 2.0, 2.5)
        assert rep.hypothesis_ok is None
        assert rep.ratio == pytest.approx(8.0, rel=1e-12)  # (r2/r1)^{m-1}

    def test_window_validation(self, flat_model):
        with pytest.raises(ValueError, match="3R"):
            sphere_area_ratio(flat_model, 1.0, 2.0, 4.0)
        with pytest.raises(ValueError):
            sphere_area_ratio(flat_model, 2.0, 1.0, 2.5)


class TestBallVolume:
    def test_flat_closed_form(self, flat_model):
        got = ball_volume(flat_model, 3.0)
        want = (4 * math.pi / 3) * (27 - 0.1**3)
        assert got == pytest.approx(want, rel=1e-12)

    def test_matches_scipy(self, sphere_model):
        got = ball_volume(sphere_model, 2.0)
        want = scipy_quad(lambda s: 4 * math.pi * math.sin(s) ** 2, 0.1, 2.0)[0]
        assert got == pytest.approx(want, rel=1e-9)

    def test_monotone_and_derivative_consistent(self, flat_model):
        rs = np.linspace(1.0, 8.0, 12)
        vols = np.array([ball_volume(flat_model, float(r)) for r in rs])
        assert np.all(np.diff(vols) > 0)
        h = 1e-4
        for r in (2.0, 5.0):
            fd = (ball_volume(flat_model, r + h) - ball_volume(flat_model, r - h)) / (2 * h)
            assert fd == pytest.approx(float(flat_model.sphere_area(r)), rel=1e-6)

    def test_unit_sphere_area_values(self):
        assert unit_sphere_area(3) == pytest.approx(4 * math.pi, rel=1e-15)
        assert unit_sphere_area(2) == pytest.approx(2 * math.pi, rel=1e-15)


class TestGrowth:
    def test_flat_cubic(self, flat_model):
        chk = polynomial_growth_check(flat_model, 3)
        assert chk.slope == pytest.approx(3.0, abs=5e-3)
        assert chk.passed and chk.hypothesis_ok

    def test_sphere_saturates(self, sphere_model):
        chk = polynomial_growth_check(sphere_model, 3)
        assert chk.slope < 3.0
        assert chk.passed

    def test_bounded_oscillating_weight(self):
        model = RadialMeasureModel.from_strings(3, "r^2", "sin(r)", 0.1, 100.0)
        chk = polynomial_growth_check(model, 3)
        assert chk.slope <= 3.05
        assert chk.passed


class TestModelValidation:
    def test_pole_excluded(self):
        with pytest.raises(ValueError):
            RadialMeasureModel.from_strings(3, "r^2", "0", 0.0, 5.0)

    def test_warp_positive(self):
        with pytest.raises(ValueError, match="warp"):
            RadialMeasureModel.from_strings(3, "1 - r", "0", 0.1, 4.0)
