import math

import numpy as np
import pytest

from rotsub import subsolution as ss
from rotsub import weakform as wf
from rotsub.geometry import AnnulusGeometry, SubsolutionParams, polar_to_cartesian

GEOM = AnnulusGeometry(rho=1.0, R=2.0, r0=1.5, T=1.0)
PARAMS = SubsolutionParams(lam=0.1, epsilon=0.5)
PARAMS0 = SubsolutionParams(lam=0.1, epsilon=0.0)


def central_diff(func, x, h):
    return (func(x + h) - func(x - h)) / (2.0 * h)


class TestBumpProfile:
    def test_support(self):
        bump = wf.BumpProfile(1.2, 1.8)
        assert bump.value(1.1) == 0.0 and bump.value(1.9) == 0.0
        assert bump.value(1.2) == 0.0 and bump.value(1.8) == 0.0
        assert bump.value(1.5) == 1.0

    def test_derivatives_match_fd(self):
        bump = wf.BumpProfile(1.2, 1.8)
        s = np.linspace(1.25, 1.75, 41)
        fd1 = central_diff(bump.value, s, 1e-6)
        assert np.max(np.abs(bump.deriv(s) - fd1)) < 1e-6 * (1 + np.max(np.abs(fd1)))
        h = 1e-5  # second differences need a larger step to beat roundoff
        fd2 = (bump.value(s + h) - 2 * bump.value(s) + bump.value(s - h)) / h**2
        assert np.max(np.abs(bump.deriv2(s) - fd2)) < 1e-3


class TestFieldDerivatives:
    def field_points(self, n=60, seed=11):
        rng = np.random.default_rng(seed)
        r = rng.uniform(1.3, 1.7, n)
        th = rng.uniform(0, 2 * math.pi, n)
        return polar_to_cartesian(r, th), rng.uniform(0.3, 0.7, n)

    def test_scalar_gradient_vs_fd(self):
        p = wf.ScalarBumpField(
            GEOM, (1.2, 1.8), wf.FourierPoly(((0, 1.0, 0.0), (2, 0.5, 0.3)))
        )
        x, _ = self.field_points()
        h = 1e-6
        grad = p.gradient(x, 0.0)
        for axis in range(2):
            e = np.zeros(2)
            e[axis] = h
            fd = (p.value(x + e, 0.0) - p.value(x - e, 0.0)) / (2 * h)
            scale = 1.0 + np.max(np.abs(fd))
            assert np.max(np.abs(grad[..., axis] - fd)) < 1e-6 * scale

    def test_scalar_hessian_vs_fd(self):
        p = wf.ScalarBumpField(GEOM, (1.2, 1.8), wf.FourierPoly(((1, 0.7, 0.4),)))
        x, _ = self.field_points(30)
        h = 1e-5
        p_xx, p_xy, p_yy = p.hessian(x, 0.0)
        ex, ey = np.array([h, 0.0]), np.array([0.0, h])
        fd_xx = (p.value(x + ex, 0.0) - 2 * p.value(x, 0.0) + p.value(x - ex, 0.0)) / h**2
        fd_yy = (p.value(x + ey, 0.0) - 2 * p.value(x, 0.0) + p.value(x - ey, 0.0)) / h**2
        fd_xy = (
            p.value(x + ex + ey, 0.0) - p.value(x + ex - ey, 0.0)
            - p.value(x - ex + ey, 0.0) + p.value(x - ex - ey, 0.0)
        ) / (4 * h**2)
        assert np.max(np.abs(p_xx - fd_xx)) < 1e-4
        assert np.max(np.abs(p_yy - fd_yy)) < 1e-4
        assert np.max(np.abs(p_xy - fd_xy)) < 1e-4

    def test_vector_field_gradient_and_dt_vs_fd(self):
        phi = wf.VectorBumpField(
            GEOM, (1.2, 1.8),
            wf.FourierPoly(((1, 1.0, 0.0),)),
            wf.FourierPoly(((0, 0.5, 0.0), (2, 0.3, 0.0))),
            (0.1, 0.9),
        )
        x, t = self.field_points()
        h = 1e-6
        grad = phi.gradient(x, t)
        for axis in range(2):
            e = np.zeros(2)
            e[axis] = h
            fd = (phi.value(x + e, t) - phi.value(x - e, t)) / (2 * h)
            assert np.max(np.abs(grad[..., axis] - fd)) < 1e-5
        fd_t = (phi.value(x, t + h) - phi.value(x, t - h)) / (2 * h)
        assert np.max(np.abs(phi.time_deriv(x, t) - fd_t)) < 1e-5

    def test_perp_gradient_divergence_free(self):
        psi = wf.ScalarBumpField(
            GEOM, (1.25, 1.8), wf.FourierPoly(((0, 1.0, 0.0), (1, 0.6, 0.0))),
            t_support=(0.15, 0.85),
        )
        phi = wf.PerpGradientField(psi)
        x, t = self.field_points()
        grad = phi.gradient(x, t)
        divergence = grad[..., 0, 0] + grad[..., 1, 1]
        assert np.max(np.abs(divergence)) < 1e-14

    def test_perp_gradient_vs_fd(self):
        psi = wf.ScalarBumpField(
            GEOM, (1.25, 1.8), wf.FourierPoly(((1, 0.6, 0.2),)), t_support=(0.15, 0.85)
        )
        phi = wf.PerpGradientField(psi)
        x, t = self.field_points(30)
        h = 1e-5
        grad = phi.gradient(x, t)
        for axis in range(2):
            e = np.zeros(2)
            e[axis] = h
            fd = (phi.value(x + e, t) - phi.value(x - e, t)) / (2 * h)
            assert np.max(np.abs(grad[..., axis] - fd)) < 1e-4

    def test_support_violation_rejected(self):
        with pytest.raises(wf.SupportError):
            wf.ScalarBumpField(GEOM, (0.9, 1.5), wf.FourierPoly(((0, 1.0, 0.0),)))
        with pytest.raises(wf.SupportError):
            wf.VectorBumpField(
                GEOM, (1.2, 1.8),
                wf.FourierPoly(((0, 1.0, 0.0),)), wf.FourierPoly(((0, 1.0, 0.0),)),
                (-0.1, 0.5),
            )


class TestLinearSystemResidual:
    def test_zero_field_gives_exact_zero(self):
        phi = wf.VectorBumpField(
            GEOM, (1.2, 1.8),
            wf.FourierPoly(((0, 0.0, 0.0),)), wf.FourierPoly(((0, 0.0, 0.0),)),
            (0.1, 0.9),
        )
        assert wf.weak_residual_linear_system(GEOM, PARAMS, phi) == 0.0

    def test_stationary_branch_small_at_default_order(self):
        fields = wf.default_test_fields(GEOM, PARAMS)
        res = wf.weak_residual_linear_system(GEOM, PARAMS, fields["outer_branch"])
        assert abs(res) < 1e-10
        res = wf.weak_residual_linear_system(GEOM, PARAMS, fields["inner_branch"])
        assert abs(res) < 1e-10

    def test_refinement_convergence_all_fields(self):
        for name, phi in wf.default_test_fields(GEOM, PARAMS).items():
            study = wf.linear_system_refinement(GEOM, PARAMS, phi, levels=3, order=3)
            assert study.converged, (name, study.residuals, study.orders)

    def test_band_crossing_observed_order(self):
        phi = wf.default_test_fields(GEOM, PARAMS)["band_crossing"]
        study = wf.linear_system_refinement(GEOM, PARAMS, phi, levels=3, order=3)
        assert study.orders[0] >= 2.0
        assert abs(study.residuals[-1]) < abs(study.residuals[0])


class TestDivergenceResidual:
    def test_radial_bump_tiny(self):
        p = wf.ScalarBumpField(GEOM, (1.2, 1.8), wf.FourierPoly(((0, 1.0, 0.0),)))
        res = wf.weak_residual_divergence(
            lambda x, t: ss.vbar(x, t, GEOM, PARAMS), p, GEOM, t=0.0
        )
        assert abs(res) < 1e-12

    def test_zero_gradient_exact_zero(self):
        p = wf.ScalarBumpField(GEOM, (1.2, 1.8), wf.FourierPoly(((0, 0.0, 0.0),)))
        res = wf.weak_residual_divergence(
            lambda x, t: ss.vbar(x, t, GEOM, PARAMS), p, GEOM, t=0.5
        )
        assert res == 0.0

    def test_generic_scalar_refinement(self):
        p = wf.ScalarBumpField(
            GEOM, (1.15, 1.85), wf.FourierPoly(((0, 1.0, 0.0), (1, 0.4, 0.0), (3, 0.0, 0.2)))
        )
        study = wf.divergence_refinement(
            lambda x, t: ss.vbar(x, t, GEOM, PARAMS), p, GEOM, t=0.4, levels=3, order=2
        )
        assert study.converged, (study.residuals, study.orders)


class TestRadialSystem:
    def test_fd_ratio_outside_band(self):
        rng = np.random.default_rng(12)
        r = rng.uniform(1.05, 1.35, 50)
        t = rng.uniform(0.3, 0.9, 50)
        res1_c, _ = wf.radial_system_residual(GEOM, PARAMS, r, t, h=1e-3)
        res1_f, _ = wf.radial_system_residual(GEOM, PARAMS, r, t, h=5e-4)
        ratio = np.median(np.abs(res1_c) / np.abs(res1_f))
        assert 3.5 <= ratio <= 4.5

    def test_fd_ratio_inside_band(self):
        rng = np.random.default_rng(13)
        t = rng.uniform(0.5, 0.95, 50)
        r = GEOM.r0 + rng.uniform(-0.8, 0.8, 50) * (PARAMS.lam * t - 5e-3)
        res1_c, res2_c = wf.radial_system_residual(GEOM, PARAMS, r, t, h=1e-3)
        res1_f, res2_f = wf.radial_system_residual(GEOM, PARAMS, r, t, h=5e-4)
        for coarse, fine in ((res1_c, res1_f), (res2_c, res2_f)):
            keep = np.abs(fine) > 1e-13
            assert keep.sum() >= 25
            ratio = np.median(np.abs(coarse[keep]) / np.abs(fine[keep]))
            assert 3.5 <= ratio <= 4.5

    def test_points_near_edges_rejected(self):
        with pytest.raises(ValueError):
            wf.radial_system_residual(GEOM, PARAMS, 1.45, 0.5, h=1e-3)
        with pytest.raises(ValueError):
            wf.radial_system_residual(GEOM, PARAMS, 1.2, 5e-4, h=1e-3)

    def test_analytic_residuals_vanish(self):
        r, t = wf.sample_points_away_from_band(GEOM, PARAMS, 300, 1e-3, np.random.default_rng(14))
        res1, res2 = wf.radial_system_residual_analytic(GEOM, PARAMS, r, t)
        assert np.max(np.abs(res1)) < 1e-12
        assert np.max(np.abs(res2)) < 1e-12


class TestEnergy:
    def test_initial_energy_closed_form(self):
        assert wf.initial_energy(GEOM) == pytest.approx(3.0 * math.pi / 4.0, rel=1e-15)

    def test_quadrature_matches_closed_form(self):
        rng = np.random.default_rng(15)
        for _ in range(3):
            rho = rng.uniform(0.4, 1.2)
            R = rho + rng.uniform(0.5, 1.5)
            geom = AnnulusGeometry(rho=rho, R=R, r0=0.5 * (rho + R), T=1.0)
            p0 = SubsolutionParams(lam=0.0, epsilon=0.0)
            got = wf.energy_total(geom, p0, 0.0)
            assert got == pytest.approx(wf.initial_energy(geom), rel=1e-10)

    def test_conservation_when_epsilon_zero(self):
        times = np.linspace(0.0, 1.0, 10)
        energies = wf.energy_series(GEOM, PARAMS0, times)
        e0 = wf.initial_energy(GEOM)
        assert np.max(np.abs(energies - e0)) < 1e-10 * e0

    def test_strict_decrease_when_epsilon_positive(self):
        energies = wf.energy_series(GEOM, PARAMS, [0.0, 0.25, 0.5, 1.0])
        assert energies[0] == pytest.approx(wf.initial_energy(GEOM), rel=1e-12)
        assert np.all(np.diff(energies) < 0.0)

    def test_admissibility_both_directions(self):
        times = np.linspace(0.1, 1.0, 5)
        e0 = wf.initial_energy(GEOM)
        for eps in (0.0, 0.25, 0.75):
            p = SubsolutionParams(lam=0.1, epsilon=eps)
            energies = wf.energy_series(GEOM, p, times)
            assert np.all(energies <= e0 * (1.0 + 1e-12))
            if eps == 0.0:
                assert np.max(np.abs(energies - e0)) < 1e-10 * e0
            else:
                assert np.all(energies < e0)


class TestInitialDataAttainment:
    def test_decay_orders(self):
        report = wf.initial_data_attainment(GEOM, PARAMS)
        assert report.l2_sq_order >= 0.9
        assert report.pairing_order >= 1.0
        assert np.all(np.diff(report.l2_sq) < 0.0)

    def test_exact_zero_at_t0(self):
        report = wf.initial_data_attainment(GEOM, PARAMS, times=[0.0, 0.25, 0.5])
        assert report.l2_sq[0] == 0.0
        assert report.pairing[0] == 0.0
