import numpy as np
import pytest

from warpstab import f_minimal_roots, gauss_identity_check, slice_shape
from warpstab.errors import PreconditionError
from warpstab.slices import minimality_residual


class TestSliceShape:
    def test_central_slice_is_geodesic(self, hyperbolic):
        s = slice_shape(hyperbolic, 0.0)
        assert s.principal == 0.0
        assert s.H == 0.0 and s.fn == 0.0 and s.residual == 0.0
        assert s.totallyGeodesic

    def test_off_center_values(self, hyperbolic):
        s = slice_shape(hyperbolic, 0.25)
        assert s.H == pytest.approx(-8.0 / 7.0, rel=1e-14)
        assert s.fn == -1.0
        assert s.residual == pytest.approx(-1.0 / 7.0, rel=1e-13)
        assert not s.totallyGeodesic

    def test_h_is_twice_principal(self, hyperbolic, exp_sphere):
        for space in (hyperbolic, exp_sphere):
            for t in np.linspace(space.t_min + 0.01, space.t_max - 0.01, 17):
                s = slice_shape(space, float(t))
                assert abs(s.H - 2.0 * s.principal) <= 1e-14 * max(1.0, abs(s.H))

    def test_flat_all_zero(self, flat):
        s = slice_shape(flat, 0.3)
        assert (s.principal, s.H, s.fn, s.residual, s.KSlice) == (0, 0, 0, 0, 0)

    def test_orientation_flip(self, hyperbolic):
        # the model is even in t: reversing the parameter flips H and fn
        for t in (0.1, 0.25, 0.4):
            fwd = slice_shape(hyperbolic, t)
            rev = slice_shape(hyperbolic, -t)
            assert rev.H == pytest.approx(-fwd.H, rel=1e-14)
            assert rev.fn == pytest.approx(-fwd.fn, rel=1e-14)
            assert rev.residual == pytest.approx(-fwd.residual, rel=1e-13)


class TestMinimalRoots:
    def test_hyperbolic_unique_root(self, hyperbolic):
        scan = f_minimal_roots(hyperbolic)
        assert not scan.identically_minimal
        assert len(scan.roots) == 1
        assert abs(scan.roots[0].t0) <= 1e-9
        assert scan.roots[0].totallyGeodesic

    def test_exp_sphere_root_at_half(self, exp_sphere):
        scan = f_minimal_roots(exp_sphere)
        assert [pytest.approx(0.5, abs=1e-9)] == [r.t0 for r in scan.roots]

    def test_flat_family_degenerate(self, flat):
        scan = f_minimal_roots(flat)
        assert scan.identically_minimal and scan.roots == ()

    def test_residual_closed_form(self, hyperbolic):
        ts = np.linspace(-0.45, 0.45, 101)
        res = minimality_residual(hyperbolic, ts)
        want = -8 * ts**3 / (1 - 2 * ts**2)
        assert np.allclose(res, want, rtol=1e-12, atol=1e-15)

    def test_grid_iff_characterization(self, hyperbolic, exp_sphere, flat):
        # H(t) = f_n(t) on a grid exactly near the found roots
        tol = 1e-10
        for space in (hyperbolic, exp_sphere):
            scan = f_minimal_roots(space, tol=tol)
            roots = np.array([r.t0 for r in scan.roots])
            for t in space.grid(101):
                near_root = np.any(np.abs(roots - t) < 5e-3) if len(roots) else False
                small = abs(float(minimality_residual(space, float(t)))) <= tol
                if small:
                    assert near_root
        assert f_minimal_roots(flat, tol=tol).identically_minimal


class TestGaussIdentity:
    def test_hyperbolic_center(self, hyperbolic):
        # 2K = -2, S = 6, Ric(n,n) = 4 at the geodesic slice
        assert gauss_identity_check(hyperbolic, 0.0) <= 1e-12
        from warpstab import closed_form_curvature

        rep = closed_form_curvature(hyperbolic, 0.0)
        assert (rep.S, rep.ric33) == (6.0, 4.0)
        assert slice_shape(hyperbolic, 0.0).KSlice == -1.0

    def test_cylinder_everywhere(self, cylinder):
        for t in (-0.5, 0.0, 0.8):
            assert gauss_identity_check(cylinder, t) <= 1e-12

    def test_flat(self, flat):
        assert gauss_identity_check(flat, 0.2) == 0.0

    def test_sphere_equator(self, round_sphere):
        # g = sin^2 t has g'(pi/2) = 0; weighted branch must not fire
        assert gauss_identity_check(round_sphere, np.pi / 2) <= 1e-10

    def test_non_geodesic_rejected(self, hyperbolic):
        with pytest.raises(PreconditionError):
            gauss_identity_check(hyperbolic, 0.25)
