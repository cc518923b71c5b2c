"""Boundary-collar cutoff fields and the decay of the four advection integrals.

A tangential field w = perp-grad(psi) (with psi = 0 on both boundary circles)
is truncated near the boundary by

    w_eps = perp-grad( chi(d/eps) * psi ),    d = dist(., boundary),

with chi a smooth ramp that is 0 on [0, 1] and 1 on [2, inf).  Then w_eps = 0
on the inner collar {d < eps} and w_eps = w outside {d < 2 eps}.  Against a
velocity whose normal component decays like d^a near the boundary, the
advection error splits into four collar integrals

    I1 = int v_nu  dnu(w_eps - w)_nu  v_nu      ~ eps^(2a+1)
    I2 = int v_nu  dnu(w_eps - w)_tau v_tau     ~ eps^a
    I3 = int v_tau dtau(w_eps - w)_nu  v_nu     ~ eps^(a+1)
    I4 = int v_tau dtau(w_eps - w)_tau v_tau    ~ eps^1

whose measured decay rates are checked against those exponents (as lower
bounds; the integrals may decay faster).

Conventions used throughout: perp-grad(g) = (g_y, -g_x); nu is the inner unit
normal of the nearest boundary circle, tau = (-nu_y, nu_x); sign = +1 on the
inner collar and -1 on the outer one, so that nu = sign * e_r and
tau = sign * e_theta.  The derivative factors are exact directional
derivatives of the frame components of w_eps - w (including the terms coming
from the rotating frame), so the four-term split reproduces the direct
quadrature of (v . grad(w_eps - w)) . v identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import AnnulusGeometry, boundary_distance, cartesian_to_polar
from .quadrature import panel_rule

TWO_PI = 2.0 * math.pi


class SmoothstepCutoff:
    """Quintic smoothstep ramp: 0 on [0, 1], 6u^5 - 15u^4 + 10u^3 on [1, 2], 1 after.

    Twice continuously differentiable with flat endpoints; value and the first
    two derivatives come in closed form.
    """

    lower = 1.0
    upper = 2.0

    def value(self, s):
        u = np.clip(np.asarray(s, dtype=float) - 1.0, 0.0, 1.0)
        return u**3 * (10.0 + u * (-15.0 + 6.0 * u))

    def deriv(self, s):
        s = np.asarray(s, dtype=float)
        u = s - 1.0
        ramp = (s > 1.0) & (s < 2.0)
        return np.where(ramp, 30.0 * u**2 * (u - 1.0) ** 2, 0.0)

    def deriv2(self, s):
        s = np.asarray(s, dtype=float)
        u = s - 1.0
        ramp = (s > 1.0) & (s < 2.0)
        return np.where(ramp, 60.0 * u * (2.0 * u - 1.0) * (u - 1.0), 0.0)


def build_chi() -> SmoothstepCutoff:
    return SmoothstepCutoff()


class SineStreamField:
    """Stream function S(r) * (1 + amp * cos theta) vanishing on both circles.

    The radial profile is S = sin(pi u) (1 + boost * sin(pi u)) with
    u = (r - rho)/(R - rho).  The boost term (still vanishing linearly at both
    ends, so |psi| <= C d holds) gives |S'| a strict interior increase away
    from either boundary; with a plain sine the L^2 cutoff error fits
    fractionally below its asymptotic half-order rate on coarse grids.
    Partial derivatives up to second order are analytic.  Time enters only
    through an optional amplitude factor (constant one by default), so the
    linear bound holds with one constant for all times.
    """

    def __init__(self, geom: AnnulusGeometry, theta_amp: float = 0.5,
                 radial_boost: float = 0.25, amplitude: float = 1.0, time_factor=None):
        self.geom = geom
        self.theta_amp = float(theta_amp)
        self.radial_boost = float(radial_boost)
        self.amplitude = float(amplitude)
        self._k = math.pi / geom.width
        self._time_factor = time_factor

    def _m(self, t):
        if self._time_factor is None:
            return self.amplitude * np.ones_like(np.asarray(t, dtype=float))
        return self.amplitude * np.asarray(self._time_factor(t), dtype=float)

    def _angular(self, th):
        th = np.asarray(th, dtype=float)
        a = self.theta_amp
        return 1.0 + a * np.cos(th), -a * np.sin(th), -a * np.cos(th)

    def partials(self, r, th, t=0.0):
        """(psi, psi_r, psi_th, psi_rr, psi_rth, psi_thth) at (r, theta, t)."""
        r = np.asarray(r, dtype=float)
        k = self._k
        c = self.radial_boost
        u = k * (r - self.geom.rho)
        s_r, c_r = np.sin(u), np.cos(u)
        S = s_r * (1.0 + c * s_r)
        S1 = k * c_r * (1.0 + 2.0 * c * s_r)
        S2 = -(k**2) * s_r + 2.0 * c * k**2 * (c_r**2 - s_r**2)
        f, f1, f2 = self._angular(th)
        m = self._m(t)
        return (S * f * m, S1 * f * m, S * f1 * m, S2 * f * m, S1 * f1 * m, S * f2 * m)

    def w_polar(self, r, th, t=0.0):
        """Polar components (w_r, w_theta) of perp-grad(psi)."""
        _, p_r, p_th, _, _, _ = self.partials(r, th, t)
        return p_th / np.asarray(r, dtype=float), -p_r

    def w_vector(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        r, th = cartesian_to_polar(x)
        w_r, w_th = self.w_polar(r, th, t)
        c, s = np.cos(th), np.sin(th)
        return np.stack([w_r * c - w_th * s, w_r * s + w_th * c], axis=-1)


class HolderVelocity:
    """Synthetic collar velocity: v_nu = d^a * g(theta), v_tau bounded.

    Only the frame components matter for the collar integrals; ``vector``
    assembles the Cartesian field from the local frame when needed.  The
    normal bound |v_nu| <= C d^a holds with C = sup|g|.
    """

    def __init__(self, geom: AnnulusGeometry, holder_alpha: float,
                 normal_amp: float = 0.5, normal_scale: float = 1.0,
                 tangential_amps=(0.5, -0.3), delta: float | None = None):
        if not 0.0 < holder_alpha <= 1.0:
            raise ValueError(f"Holder exponent must lie in (0, 1], got {holder_alpha}")
        self.geom = geom
        self.holder_alpha = float(holder_alpha)
        self.normal_amp = float(normal_amp)
        self.normal_scale = float(normal_scale)
        self.tangential_amps = tuple(map(float, tangential_amps))
        self.delta = float(delta) if delta is not None else 0.25 * geom.width

    @property
    def normal_bound_constant(self) -> float:
        return abs(self.normal_scale) * (1.0 + abs(self.normal_amp))

    def normal_component(self, d, th):
        d = np.asarray(d, dtype=float)
        return self.normal_scale * d**self.holder_alpha * (1.0 + self.normal_amp * np.sin(th))

    def tangential_component(self, d, th):
        th = np.asarray(th, dtype=float)
        a_sin, a_cos = self.tangential_amps
        return np.ones_like(np.asarray(d, dtype=float)) * (
            1.0 + a_sin * np.sin(th) + a_cos * np.cos(th)
        )

    def vector(self, x):
        x = np.asarray(x, dtype=float)
        frame = boundary_distance(x, self.geom)
        _, th = cartesian_to_polar(x)
        v_nu = self.normal_component(frame.distance, th)
        v_tau = self.tangential_component(frame.distance, th)
        return v_nu[..., None] * frame.normal + v_tau[..., None] * frame.tangent


class CutoffField:
    """The truncated field w_eps = perp-grad(chi(d/eps) psi) and its distance to w."""

    def __init__(self, psi: SineStreamField, chi: SmoothstepCutoff, eps: float,
                 geom: AnnulusGeometry):
        if not eps > 0:
            raise ValueError(f"cutoff width must be positive, got {eps}")
        if 2.0 * eps >= 0.5 * geom.width:
            raise ValueError(
                f"cutoff width eps={eps} too large: the two collars of width 2*eps must stay disjoint"
            )
        self.psi = psi
        self.chi = chi
        self.eps = float(eps)
        self.geom = geom

    def _polar_components(self, r, th, sign, d, t):
        """(W_r, W_theta) of w_eps - w from the product rule."""
        p, p_r, p_th, _, _, _ = self.psi.partials(r, th, t)
        s = d / self.eps
        chi_m1 = self.chi.value(s) - 1.0
        chi_p = self.chi.deriv(s) / self.eps
        return chi_m1 * p_th / r, -chi_m1 * p_r - sign * chi_p * p

    def value(self, x, t=0.0):
        """w_eps as a Cartesian field on the whole annulus."""
        x = np.asarray(x, dtype=float)
        r, th = cartesian_to_polar(x)
        frame = boundary_distance(x, self.geom)
        w_r, w_th = self.psi.w_polar(r, th, t)
        diff_r, diff_th = self._polar_components(r, th, frame.sign, frame.distance, t)
        tot_r = w_r + diff_r
        tot_th = w_th + diff_th
        c, s = np.cos(th), np.sin(th)
        return np.stack([tot_r * c - tot_th * s, tot_r * s + tot_th * c], axis=-1)

    def diff_value(self, x, t=0.0):
        """w_eps - w as a Cartesian field (zero outside the 2*eps collars)."""
        x = np.asarray(x, dtype=float)
        r, th = cartesian_to_polar(x)
        frame = boundary_distance(x, self.geom)
        diff_r, diff_th = self._polar_components(r, th, frame.sign, frame.distance, t)
        c, s = np.cos(th), np.sin(th)
        return np.stack([diff_r * c - diff_th * s, diff_r * s + diff_th * c], axis=-1)

    def diff_frame(self, d, th, sign, t=0.0):
        """Frame components (A, B) = ((w_eps - w)_nu, (w_eps - w)_tau).

        A = (chi - 1) w_nu and B = (chi - 1) w_tau - (chi'/eps) psi; these are
        the scalar fields whose directional derivatives drive the estimates.
        """
        r = self._radius(d, sign)
        diff_r, diff_th = self._polar_components(r, th, sign, np.asarray(d, dtype=float), t)
        return sign * diff_r, sign * diff_th

    def _radius(self, d, sign):
        d = np.asarray(d, dtype=float)
        return np.where(np.asarray(sign) > 0, self.geom.rho + d, self.geom.R - d)

    def frame_tensor(self, d, th, sign, t=0.0):
        """Exact directional derivatives (T_nn, T_nt, T_tn, T_tt).

        T_ab = ((a . grad)(w_eps - w)) . b for a, b in {nu, tau}; closed forms
        in the stream function's partials.  These are sign-independent in
        polar data because nu = sign e_r and tau = sign e_theta flip together.
        """
        d = np.asarray(d, dtype=float)
        r = self._radius(d, sign)
        p, p_r, p_th, p_rr, p_rth, p_thth = self.psi.partials(r, th, t)
        s = d / self.eps
        chi_m1 = self.chi.value(s) - 1.0
        chi_p = self.chi.deriv(s) / self.eps
        chi_pp = self.chi.deriv2(s) / self.eps**2
        w_r = p_th / r
        w_th = -p_r
        diff_r = chi_m1 * w_r
        diff_th = chi_m1 * w_th - sign * chi_p * p

        d_r_diff_r = sign * chi_p * w_r + chi_m1 * (p_rth / r - p_th / r**2)
        d_r_diff_th = -chi_m1 * p_rr - chi_pp * p - 2.0 * sign * chi_p * p_r
        d_th_diff_r = chi_m1 * p_thth / r
        d_th_diff_th = -chi_m1 * p_rth - sign * chi_p * p_th

        t_nn = d_r_diff_r
        t_nt = d_r_diff_th
        t_tn = d_th_diff_r / r - diff_th / r
        t_tt = d_th_diff_th / r + diff_r / r
        return t_nn, t_nt, t_tn, t_tt


def build_w_eps(psi: SineStreamField, chi: SmoothstepCutoff, eps: float,
                geom: AnnulusGeometry) -> CutoffField:
    return CutoffField(psi, chi, eps, geom)


def _collar_nodes(geom: AnnulusGeometry, eps: float, sign: float,
                  order: int = 12, theta_panels: int = 8):
    """Quadrature on one collar {0 < d < 2 eps}: weights include the Jacobian r.

    The radial panels are graded toward d = 0 (the synthetic velocity has a
    d^a factor there) and pinned to d = eps where the ramp switches on.
    """
    d_edges = eps * np.array([0.0, 1.0 / 16.0, 0.25, 0.5, 1.0, 1.5, 2.0])
    dn, dw = panel_rule(d_edges, order)
    th_edges = np.linspace(0.0, TWO_PI, theta_panels + 1)
    thn, thw = panel_rule(th_edges, order)
    D, TH = np.meshgrid(dn, thn, indexing="ij")
    r = geom.rho + D if sign > 0 else geom.R - D
    W = np.outer(dw, thw) * r
    return D, TH, r, W


def _collar_report(v: HolderVelocity, field: CutoffField, t: float = 0.0,
                   order: int = 12, theta_panels: int = 8):
    geom = field.geom
    totals = {"I1": 0.0, "I2": 0.0, "I3": 0.0, "I4": 0.0, "direct": 0.0, "l2_sq": 0.0}
    for sign in (1.0, -1.0):
        D, TH, r, W = _collar_nodes(geom, field.eps, sign, order, theta_panels)
        v_nu = v.normal_component(D, TH)
        v_tau = v.tangential_component(D, TH)
        t_nn, t_nt, t_tn, t_tt = field.frame_tensor(D, TH, sign, t)
        totals["I1"] += float(np.sum(W * v_nu * t_nn * v_nu))
        totals["I2"] += float(np.sum(W * v_nu * t_nt * v_tau))
        totals["I3"] += float(np.sum(W * v_tau * t_tn * v_nu))
        totals["I4"] += float(np.sum(W * v_tau * t_tt * v_tau))

        # independent route for the direct quadrature: assemble the Cartesian
        # gradient of (w_eps - w) and contract with the Cartesian velocity
        p, p_r, p_th, p_rr, p_rth, p_thth = field.psi.partials(r, TH, t)
        s = D / field.eps
        chi_m1 = field.chi.value(s) - 1.0
        chi_p = field.chi.deriv(s) / field.eps
        chi_pp = field.chi.deriv2(s) / field.eps**2
        diff_r = chi_m1 * p_th / r
        diff_th = -chi_m1 * p_r - sign * chi_p * p
        d_r_diff_r = sign * chi_p * p_th / r + chi_m1 * (p_rth / r - p_th / r**2)
        d_r_diff_th = -chi_m1 * p_rr - chi_pp * p - 2.0 * sign * chi_p * p_r
        d_th_diff_r = chi_m1 * p_thth / r
        d_th_diff_th = -chi_m1 * p_rth - sign * chi_p * p_th

        c, sn = np.cos(TH), np.sin(TH)
        e_r = np.stack([c, sn], axis=-1)
        e_th = np.stack([-sn, c], axis=-1)
        c_rr = d_r_diff_r
        c_rt = d_th_diff_r / r - diff_th / r
        c_tr = d_r_diff_th
        c_tt = d_th_diff_th / r + diff_r / r
        grad = (
            c_rr[..., None, None] * e_r[..., :, None] * e_r[..., None, :]
            + c_rt[..., None, None] * e_r[..., :, None] * e_th[..., None, :]
            + c_tr[..., None, None] * e_th[..., :, None] * e_r[..., None, :]
            + c_tt[..., None, None] * e_th[..., :, None] * e_th[..., None, :]
        )
        v_cart = sign * (v_nu[..., None] * e_r + v_tau[..., None] * e_th)
        contraction = np.einsum("...i,...ij,...j->...", v_cart, grad, v_cart)
        totals["direct"] += float(np.sum(W * contraction))
        totals["l2_sq"] += float(np.sum(W * (diff_r**2 + diff_th**2)))
    return totals


def compute_I_terms(v: HolderVelocity, psi: SineStreamField, chi: SmoothstepCutoff,
                    eps: float, geom: AnnulusGeometry, t: float = 0.0,
                    order: int = 12, theta_panels: int = 8):
    """The four collar integrals (I1, I2, I3, I4) at one cutoff width."""
    field = CutoffField(psi, chi, eps, geom)
    totals = _collar_report(v, field, t, order, theta_panels)
    return totals["I1"], totals["I2"], totals["I3"], totals["I4"]


def decomposition_error(v: HolderVelocity, psi: SineStreamField, chi: SmoothstepCutoff,
                        eps: float, geom: AnnulusGeometry, t: float = 0.0) -> float:
    """|I1 + I2 + I3 + I4 - direct quadrature of (v . grad(w_eps - w)) . v|."""
    field = CutoffField(psi, chi, eps, geom)
    totals = _collar_report(v, field, t)
    return abs(totals["I1"] + totals["I2"] + totals["I3"] + totals["I4"] - totals["direct"])


def w_eps_l2_distance(psi: SineStreamField, chi: SmoothstepCutoff, eps: float,
                      geom: AnnulusGeometry, t: float = 0.0) -> float:
    """|| w_eps - w ||_{L^2(Omega)} (the difference vanishes outside the collars)."""
    field = CutoffField(psi, chi, eps, geom)
    dummy = HolderVelocity(geom, 0.5)
    totals = _collar_report(dummy, field, t)
    return math.sqrt(totals["l2_sq"])


@dataclass(frozen=True)
class ScalingReport:
    """Measured decay of the collar integrals against the predicted exponents."""

    holder_alpha: float
    eps: np.ndarray
    I_values: np.ndarray  # shape (n_eps, 4)
    slopes: tuple  # fitted log-log slopes, None where the integral is identically ~0
    predicted: tuple  # (2a+1, a, a+1, 1)
    vacuous: tuple  # True where |I_k| < zero_floor on the whole grid
    consistency: np.ndarray  # |sum I_k - direct| per eps
    l2_distances: np.ndarray
    l2_slope: float
    zero_floor: float = 1e-14

    def slopes_meet_bounds(self, tolerance: float = 0.15) -> bool:
        for slope, target, vac in zip(self.slopes, self.predicted, self.vacuous):
            if vac:
                continue
            if slope < target - tolerance:
                return False
        return True


def scaling_study(v: HolderVelocity, psi: SineStreamField, chi: SmoothstepCutoff,
                  eps_grid, geom: AnnulusGeometry, t: float = 0.0,
                  zero_floor: float = 1e-14) -> ScalingReport:
    """Fit the decay rate of each collar integral over a decreasing eps grid.

    Needs at least four cutoff widths, strictly decreasing, all small enough
    for the two collars to stay disjoint.  Integrals below ``zero_floor``
    everywhere are flagged vacuous (their upper bound holds trivially).
    """
    eps_arr = np.asarray(eps_grid, dtype=float)
    if eps_arr.size < 4 or np.any(np.diff(eps_arr) >= 0) or np.any(eps_arr <= 0):
        raise ValueError("need >= 4 strictly decreasing positive cutoff widths")
    values = np.empty((eps_arr.size, 4))
    consistency = np.empty(eps_arr.size)
    l2 = np.empty(eps_arr.size)
    for i, eps in enumerate(eps_arr):
        field = CutoffField(psi, chi, float(eps), geom)
        totals = _collar_report(v, field, t)
        values[i] = (totals["I1"], totals["I2"], totals["I3"], totals["I4"])
        consistency[i] = abs(values[i].sum() - totals["direct"])
        l2[i] = math.sqrt(totals["l2_sq"])

    log_eps = np.log(eps_arr)
    slopes = []
    vacuous = []
    for k in range(4):
        magnitudes = np.abs(values[:, k])
        usable = magnitudes > zero_floor
        if np.count_nonzero(usable) < 2:
            slopes.append(None)
            vacuous.append(True)
        else:
            slopes.append(float(np.polyfit(log_eps[usable], np.log(magnitudes[usable]), 1)[0]))
            vacuous.append(False)
    a = v.holder_alpha
    l2_slope = float(np.polyfit(log_eps, np.log(l2), 1)[0])
    return ScalingReport(
        holder_alpha=a,
        eps=eps_arr,
        I_values=values,
        slopes=tuple(slopes),
        predicted=(2.0 * a + 1.0, a, a + 1.0, 1.0),
        vacuous=tuple(vacuous),
        consistency=consistency,
        l2_distances=l2,
        l2_slope=l2_slope,
        zero_floor=zero_floor,
    )
