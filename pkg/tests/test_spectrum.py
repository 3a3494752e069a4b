import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad
from scipy.special import jn_zeros

from warpstab import RadialProfile, second_variation_form, stability_spectrum
from warpstab.errors import DomainError


class TestFlatDisk:
    def test_ground_state_constant(self, flat):
        res = stability_spectrum(flat, 0.0, 1.0)
        target = float(jn_zeros(0, 1)[0] ** 2)  # 5.783185962946785
        assert res.mu1 == pytest.approx(target, abs=1e-3)
        assert res.neg_count == 0
        assert res.convergence_delta <= 1e-6 * (1 + abs(res.mu1))

    def test_scaling_law(self, flat):
        # the discretization is scale-exact: mu1 * rho_max^2 is constant
        mu_1 = stability_spectrum(flat, 0.0, 1.0).mu1
        mu_2 = stability_spectrum(flat, 0.0, 2.0).mu1
        assert mu_2 * 4.0 == pytest.approx(mu_1, rel=1e-9)


class TestStableSlice:
    @pytest.mark.parametrize("rho_max", [1.0, 2.0, 4.0])
    def test_no_negative_modes(self, hyperbolic, rho_max):
        res = stability_spectrum(hyperbolic, 0.0, rho_max)
        assert res.neg_count == 0
        assert res.mu1 >= 0.0

    def test_domain_monotonicity(self, hyperbolic, flat):
        for space in (hyperbolic, flat):
            radii = (0.5, 1.0, 2.0, 4.0) if space.kappa != 1 else (0.5, 1.0, 2.0, 3.0)
            mus = [stability_spectrum(space, 0.0, r).mu1 for r in radii]
            assert all(a >= b - 1e-9 for a, b in zip(mus, mus[1:]))


class TestContracts:
    def test_potential_shift(self, flat):
        base = stability_spectrum(flat, 0.0, 1.0)
        shifted = stability_spectrum(flat, 0.0, 1.0, q_shift=3.0)
        assert base.mu1 - shifted.mu1 == pytest.approx(3.0, abs=1e-8)
        deep = stability_spectrum(flat, 0.0, 1.0, q_shift=10.0)
        assert deep.neg_count >= 1
        assert deep.mu1 < 0.0

    def test_rayleigh_never_beats_ground_state(self, hyperbolic, flat, exp_sphere):
        import math

        cases = [(flat, 0.0), (hyperbolic, 0.0), (exp_sphere, 0.5)]
        for space, t0 in cases:
            for rho_max in (1.0, 2.0):
                profile = RadialProfile.cosine_cap(rho_max)
                q_form = second_variation_form(space, t0, profile)
                g0 = space.g_at(t0)
                mass = 2 * math.pi * math.exp(-space.f_at(t0)) * g0 * scipy_quad(
                    lambda r: profile.value(r) ** 2
                    * float(space.base_radius(r)),
                    0.0,
                    rho_max,
                )[0]
                rayleigh = q_form / mass
                mu1 = stability_spectrum(space, t0, rho_max).mu1
                assert rayleigh >= mu1 - 1e-6

    def test_sphere_base_polar_cut(self, cylinder):
        with pytest.raises(DomainError):
            stability_spectrum(cylinder, 0.0, 3.5)

    def test_grid_floor(self, flat):
        with pytest.raises(ValueError):
            stability_spectrum(flat, 0.0, 1.0, grid_size=16)
