"""Acceptance gate: every criterion at its stated tolerance, one line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the PASS/FAIL lines.
"""

import math
import time

import numpy as np

from rotsub import boundary_layer as bl
from rotsub import burgers as bg
from rotsub import subsolution as ss
from rotsub import viscosity as vc
from rotsub import weakform as wf
from rotsub.geometry import AnnulusGeometry, SubsolutionParams, polar_to_cartesian

GEOM = AnnulusGeometry(rho=1.0, R=2.0, r0=1.5, T=1.0)
PARAMS = SubsolutionParams(lam=0.1, epsilon=0.5)
PARAMS0 = SubsolutionParams(lam=0.1, epsilon=0.0)


def report(number, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[acceptance {number}] {name}: {status}{suffix}")
    assert ok, f"acceptance criterion {number} failed: {name}{suffix}"


def test_01_generalized_energy_eigenvalue_oracle():
    started = time.perf_counter()
    rng = np.random.default_rng(101)
    n = 10_000
    r = rng.uniform(GEOM.rho, GEOM.R, n)
    theta = rng.uniform(0.0, 2.0 * math.pi, n)
    t = rng.uniform(0.0, GEOM.T, n)
    x = polar_to_cartesian(r, theta)
    closed = ss.egen(r, t, GEOM, PARAMS)
    oracle = ss.egen_from_state(ss.vbar(x, t, GEOM, PARAMS), ss.ubar(x, t, GEOM, PARAMS))
    diff = float(np.max(np.abs(closed - oracle)))
    elapsed = time.perf_counter() - started
    report(
        1, "generalized energy vs eigenvalue oracle",
        diff < 1e-12 and elapsed < 1.0,
        f"max diff {diff:.2e}, {elapsed:.2f}s",
    )


def test_02_constraint_dichotomy():
    started = time.perf_counter()
    check = ss.check_constraint_structure(
        GEOM, PARAMS, n_r=100, n_theta=64, n_t=10, eq_tol=1e-13
    )
    elapsed = time.perf_counter() - started
    ok = (
        check.ok
        and check.n_in_band > 0
        and check.min_gap_in_band > 0.0
        and check.max_gap_formula_dev < 1e-13
        and check.max_eq_dev_outside < 1e-13
        and elapsed < 5.0
    )
    report(
        2, "strict gap inside the band, equality outside",
        ok,
        f"{check.n_in_band} band samples, min gap {check.min_gap_in_band:.2e}, "
        f"formula dev {check.max_gap_formula_dev:.1e}, outside dev {check.max_eq_dev_outside:.1e}, "
        f"{elapsed:.2f}s",
    )


def test_03_energy_anchors():
    e0 = wf.initial_energy(GEOM)
    anchor_ok = abs(e0 - 3.0 * math.pi / 4.0) < 1e-14
    quad_ok = abs(wf.energy_total(GEOM, PARAMS0, 0.7) - e0) < 1e-10 * e0

    times = np.linspace(0.0, GEOM.T, 10)
    conserved = wf.energy_series(GEOM, PARAMS0, times)
    conservation_ok = bool(np.max(np.abs(conserved - e0)) < 1e-10 * e0)

    dissipated = wf.energy_series(GEOM, PARAMS, times)
    decreasing_ok = bool(np.all(np.diff(dissipated) < 0.0))

    report(
        3, "energy anchors: E0 closed form, conservation, strict decay",
        anchor_ok and quad_ok and conservation_ok and decreasing_ok,
        f"E0={e0:.7f}, conservation dev {np.max(np.abs(conserved - e0)):.1e}",
    )


def test_04_weak_form_residuals():
    started = time.perf_counter()
    fields = wf.default_test_fields(GEOM, PARAMS)
    assert len(fields) == 5
    converged = {}
    for name, phi in fields.items():
        study = wf.linear_system_refinement(GEOM, PARAMS, phi, levels=3, order=3)
        converged[name] = study.converged

    scalar_fields = [
        wf.ScalarBumpField(GEOM, (1.2, 1.8), wf.FourierPoly(((0, 1.0, 0.0),))),
        wf.ScalarBumpField(GEOM, (1.1, 1.9), wf.FourierPoly(((1, 0.5, 0.0), (2, 0.0, 0.3)))),
        wf.ScalarBumpField(GEOM, (1.3, 1.7), wf.FourierPoly(((0, 0.6, 0.0), (3, 0.0, 0.4)))),
    ]
    div_residuals = [
        abs(wf.weak_residual_divergence(lambda x, t: ss.vbar(x, t, GEOM, PARAMS), p, GEOM, t=tv))
        for p, tv in zip(scalar_fields, (0.0, 0.4, 0.9))
    ]
    div_ok = max(div_residuals) < 1e-10
    elapsed = time.perf_counter() - started
    report(
        4, "weak-form residual refinement and divergence tests",
        all(converged.values()) and div_ok and elapsed < 30.0,
        f"converged {sorted(k for k, v in converged.items() if v)}, "
        f"max div residual {max(div_residuals):.1e}, {elapsed:.1f}s",
    )


def test_05_radial_system_fd_convergence():
    h = 1e-3
    rng = np.random.default_rng(105)
    r, t = wf.sample_points_away_from_band(GEOM, PARAMS, 200, h, rng)
    assert r.size == 200
    coarse = wf.radial_system_residual(GEOM, PARAMS, r, t, h=h)
    fine = wf.radial_system_residual(GEOM, PARAMS, r, t, h=h / 2)
    ratios = []
    for res_c, res_f in zip(coarse, fine):
        keep = np.abs(res_f) > 1e-13
        ratios.append(float(np.median(np.abs(res_c[keep]) / np.abs(res_f[keep]))))
    ok = all(3.5 <= ratio <= 4.5 for ratio in ratios)
    report(
        5, "radial system centered-difference order two",
        ok,
        f"median ratios per equation {ratios[0]:.3f}, {ratios[1]:.3f}",
    )


def test_06_godunov_oracle_convergence():
    meshes = (2000, 4000, 8000, 16000)
    errors = []
    bounded = True
    for n in meshes:
        l1, _ = bg.compare_exact_vs_fv(GEOM, PARAMS, 0.5, n)
        errors.append(l1)
        profile = bg.godunov_solve(
            lambda r: np.sign(r - GEOM.r0), GEOM, PARAMS.lam, 0.5, n
        )
        bounded = bounded and bool(np.all(np.abs(profile.values) <= 1.0 + 1e-12))
    ratios = [errors[i] / errors[i + 1] for i in range(3)]
    ok = bounded and all(1.7 <= ratio <= 2.3 for ratio in ratios)
    report(
        6, "finite-volume oracle first-order convergence and bounds",
        ok,
        "ratios " + ", ".join(f"{r:.3f}" for r in ratios),
    )


def test_07_viscosity_limit_and_mms():
    started = time.perf_counter()
    sweep = vc.vanishing_viscosity_study(GEOM, [1e-2, 1e-3, 1e-4], 1.0, n=1600, dt=2.5e-3)

    nu = 0.05
    k = math.pi / GEOM.width

    def exact(r, t):
        return math.exp(-t) * np.sin(k * (r - GEOM.rho))

    def source(r, t):
        s = np.sin(k * (r - GEOM.rho))
        c = np.cos(k * (r - GEOM.rho))
        operator = -(k**2) * s + k * c / r - s / r**2
        return math.exp(-t) * (-s - nu * operator)

    def error(n, dt):
        problem = vc.ParabolicProblem(geom=GEOM, nu=nu, n=n, dt=dt, source=source)
        record = vc.solve_parabolic(problem, [0.5], initial=lambda r: exact(r, 0.0))
        snap = record.snapshots[-1]
        return vc.l2_rdr_norm(snap.grid, snap.values - exact(snap.grid, snap.t))

    space_errors = [error(n, 2e-4) for n in (16, 32, 64)]
    space_orders = [math.log2(space_errors[i] / space_errors[i + 1]) for i in range(2)]
    time_errors = [error(1024, dt) for dt in (0.05, 0.025, 0.0125)]
    time_orders = [math.log2(time_errors[i] / time_errors[i + 1]) for i in range(2)]
    elapsed = time.perf_counter() - started
    ok = (
        sweep.monotone
        and all(order >= 1.8 for order in space_orders)
        and all(order >= 1.8 for order in time_orders)
        and elapsed < 60.0
    )
    report(
        7, "vanishing-viscosity sweep and manufactured-solution orders",
        ok,
        f"distances {np.round(sweep.distances, 4).tolist()}, "
        f"space orders {[f'{o:.2f}' for o in space_orders]}, "
        f"time orders {[f'{o:.2f}' for o in time_orders]}, {elapsed:.1f}s",
    )


def test_08_boundary_layer_scaling():
    chi = bl.build_chi()
    psi = bl.SineStreamField(GEOM)
    v = bl.HolderVelocity(GEOM, 0.5)
    study = bl.scaling_study(v, psi, chi, [0.04, 0.02, 0.01, 0.005], GEOM)
    bounds = (1.85, 0.35, 1.35, 0.85)
    slopes_ok = all(
        vac or slope >= bound
        for slope, bound, vac in zip(study.slopes, bounds, study.vacuous)
    )
    consistency_ok = bool(np.max(study.consistency) < 1e-8)
    report(
        8, "collar integral decay slopes and decomposition consistency",
        slopes_ok and consistency_ok,
        "slopes " + ", ".join("vacuous" if s is None else f"{s:.3f}" for s in study.slopes)
        + f"; max inconsistency {np.max(study.consistency):.1e}",
    )


def test_09_cutoff_strong_approximation():
    chi = bl.build_chi()
    psi = bl.SineStreamField(GEOM)
    v = bl.HolderVelocity(GEOM, 0.5)
    study = bl.scaling_study(v, psi, chi, [0.04, 0.02, 0.01, 0.005], GEOM)
    decreasing = bool(np.all(np.diff(study.l2_distances) < 0.0))
    report(
        9, "cutoff field converges in L2 at half order",
        decreasing and study.l2_slope >= 0.5,
        f"fitted order {study.l2_slope:.4f}",
    )
