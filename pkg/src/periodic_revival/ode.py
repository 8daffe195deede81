"""Integration of ``-u'' + V u = lam u`` across piecewise-smooth potentials.

Constant segments are crossed with the exact 2x2 transfer matrix; other
segments are stepped with DOP853 at a per-step tolerance of 1e-12.  Steps
never straddle a break.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import ode, solve_ivp

from .core import TWO_PI, Potential

RTOL = 1e-12
ATOL = 1e-12


class IntegrationError(RuntimeError):
    def __init__(self, message: str, x: float):
        super().__init__(f"{message} at x={x:.17g}")
        self.x = x


class PhaseDomainError(ValueError):
    """The modified Prufer phase needs ``lam > max V``."""


def step_cap(lam: float) -> float:
    return 0.1 * TWO_PI / max(1.0, math.sqrt(abs(lam)))


def _fundamental_rhs(coeffs, lo, lam, reuse):
    """``y = (phi1, phi1', phi2, phi2')`` right-hand side on one polynomial segment.

    V is evaluated from the segment's own polynomial, so the right-limit
    convention at breaks never picks the neighbour.  ``reuse`` returns one
    shared buffer, which the Fortran path copies but solve_ivp would not.
    """
    c0, c1, c2, c3 = (float(v) for v in coeffs)
    out = np.empty(4)

    def rhs(x, y):
        s = x - lo
        q = c0 + s * (c1 + s * (c2 + s * c3)) - lam
        buf = out if reuse else np.empty(4)
        buf[0] = y[1]
        buf[1] = q * y[0]
        buf[2] = y[3]
        buf[3] = q * y[2]
        return buf

    return rhs


def _march(rhs, lo, hi, y0, atol, max_step, dense):
    """DOP853 from ``lo`` to ``hi``; returns ``(y(hi), interpolant or None)``.

    Endpoint-only calls go through the Fortran DOP853 (same method and
    tolerances, far less per-step overhead); dense ones through solve_ivp.
    """
    if dense:
        sol = solve_ivp(rhs, (lo, hi), y0, method="DOP853", rtol=RTOL, atol=atol,
                        max_step=max_step, dense_output=True)
        if not sol.success or not np.all(np.isfinite(sol.y[:, -1])):
            bad = sol.t[-1] if sol.t.size else lo
            raise IntegrationError(sol.message or "non-finite state", float(bad))
        return sol.y[:, -1], sol.sol
    r = ode(rhs).set_integrator("dop853", rtol=RTOL, atol=atol, max_step=max_step,
                                nsteps=10**7)
    r.set_initial_value(y0, lo)
    y = r.integrate(hi)
    if not r.successful() or not np.all(np.isfinite(y)):
        raise IntegrationError(f"dop853 stopped with code {r.get_return_code()}", float(r.t))
    return np.asarray(y, dtype=float), None


def transfer_entries(k2, h):
    """Entries ``(m11, m12, m21, m22)`` of the propagator of ``u'' + k2 u = 0``.

    ``h`` may be an array.  Handles oscillatory (k2 > 0), linear (k2 = 0)
    and hyperbolic (k2 < 0) regimes without cancellation near k2 = 0.
    """
    h = np.asarray(h, dtype=float)
    if k2 > 0.0:
        k = math.sqrt(k2)
        c, s = np.cos(k * h), np.sin(k * h)
        return c, h * np.sinc(k * h / math.pi), -k * s, c
    if k2 < 0.0:
        kap = math.sqrt(-k2)
        z = kap * h
        c = np.cosh(z)
        with np.errstate(invalid="ignore", divide="ignore"):
            shc = np.where(z == 0.0, 1.0, np.sinh(z) / np.where(z == 0.0, 1.0, z))
        return c, h * shc, kap * np.sinh(z), c
    one = np.ones_like(h)
    return one, h.copy(), np.zeros_like(h), one


def transfer_matrix(k2: float, h: float) -> np.ndarray:
    m11, m12, m21, m22 = transfer_entries(k2, h)
    return np.array([[float(m11), float(m12)], [float(m21), float(m22)]])


@dataclass(frozen=True)
class FundamentalPair:
    """``phi1, phi2`` and derivatives at ``x`` with ``phi1(0)=1, phi2'(0)=1``."""

    phi1: float
    dphi1: float
    phi2: float
    dphi2: float
    x: float
    lam: float

    @property
    def wronskian(self) -> float:
        return self.phi1 * self.dphi2 - self.dphi1 * self.phi2

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.phi1, self.phi2], [self.dphi1, self.dphi2]])


class Propagator:
    """Fundamental matrix ``Y(x) = [[phi1, phi2], [phi1', phi2']]`` for fixed ``lam``.

    Built once per ``(V, lam)``; afterwards ``Y`` is available at any
    ``x`` in ``[0, 2*pi]``.  With ``dense=False`` only the values at the
    breaks (and the monodromy) are kept.
    """

    def __init__(self, V: Potential, lam: float, dense: bool = True):
        self.V = V
        self.lam = float(lam)
        n = V.n_segments
        self._start = np.empty((n + 1, 2, 2))
        self._start[0] = np.eye(2)
        self._dense: list = [None] * n
        self.dense = dense
        cap = step_cap(self.lam)
        for i in range(n):
            lo, hi = V.breaks[i], V.breaks[i + 1]
            Y0 = self._start[i]
            if V.segment_is_constant(i):
                T = transfer_matrix(self.lam - V.coeffs[i, 0], hi - lo)
                Y1 = T @ Y0
            else:
                rhs = _fundamental_rhs(V.coeffs[i], lo, self.lam, reuse=not dense)
                y0 = np.array([Y0[0, 0], Y0[1, 0], Y0[0, 1], Y0[1, 1]])
                scale = max(1.0, math.sqrt(abs(self.lam)))
                y1, self._dense[i] = _march(rhs, lo, hi, y0, ATOL * scale, min(cap, hi - lo), dense)
                Y1 = np.array([[y1[0], y1[2]], [y1[1], y1[3]]])
            if not np.all(np.isfinite(Y1)):
                raise IntegrationError("non-finite state", float(hi))
            self._start[i + 1] = Y1

    @property
    def monodromy(self) -> np.ndarray:
        return self._start[-1]

    def at(self, x) -> np.ndarray:
        """``Y(x)`` with shape ``x.shape + (2, 2)``; ``x`` in ``[0, 2*pi]``."""
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        V = self.V
        idx = np.clip(np.searchsorted(V.breaks, flat, side="right") - 1, 0, V.n_segments - 1)
        out = np.empty((flat.size, 2, 2))
        for i in np.unique(idx):
            sel = idx == i
            xs = flat[sel]
            if self._dense[i] is None:
                if not V.segment_is_constant(i):
                    raise ValueError("built with dense=False; only the monodromy is available")
                m11, m12, m21, m22 = transfer_entries(self.lam - V.coeffs[i, 0], xs - V.breaks[i])
                T = np.stack([np.stack([m11, m12], -1), np.stack([m21, m22], -1)], -2)
                out[sel] = T @ self._start[i]
            else:
                y = self._dense[i](xs)
                out[sel] = np.stack([np.stack([y[0], y[2]], -1), np.stack([y[1], y[3]], -1)], -2)
        return out.reshape(x.shape + (2, 2))

    def pair(self, x: float) -> FundamentalPair:
        Y = self.at(x)
        return FundamentalPair(float(Y[0, 0]), float(Y[1, 0]), float(Y[0, 1]), float(Y[1, 1]),
                              float(x), self.lam)


def integrate_fundamental(V: Potential, lam: float, x_end: float = TWO_PI, dense: bool = False):
    """Propagate both fundamental solutions from 0 to ``x_end``.

    Returns a :class:`FundamentalPair`; with ``dense=True`` also returns
    ``(xs, Y)`` with at least 32 samples per local wavelength and every
    break included.
    """
    if not 0.0 < x_end <= TWO_PI:
        raise ValueError("x_end must lie in (0, 2*pi]")
    prop = Propagator(V, lam)
    pair = prop.pair(x_end)
    if not dense:
        return pair
    vmin, _ = V.extrema()
    k = math.sqrt(max(lam - vmin, 1.0))
    n = max(64, math.ceil(32 * k * x_end / TWO_PI) + 1)
    xs = np.union1d(np.linspace(0.0, x_end, n), V.breaks[V.breaks <= x_end])
    return pair, (xs, prop.at(xs))


# Prufer phase ---------------------------------------------------------------


def _rescale_phase(theta, ratio):
    """Map a lifted phase with ``tan(theta) = A`` to one with ``tan = ratio * A``.

    Quarter-turn multiples are fixed points, so the lift (root count) is
    preserved and the change stays within (-pi/2, pi/2).
    """
    n = np.floor(theta / math.pi + 0.5)
    rem = theta - n * math.pi
    return n * math.pi + np.arctan(ratio * np.tan(rem))


def _nearest_lift(angle, reference):
    return reference + (angle - reference + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True, eq=False)
class PruferState:
    """Phase ``theta`` (continuous lift) and amplitude ``rho`` at ``x``.

    ``scaled`` records which transform was used: ``True`` for
    ``R u = rho sin(theta)`` with ``R = sqrt(lam - V)``, ``False`` for
    ``u = rho sin(theta)``.  In both, ``u' = rho cos(theta)``.
    """

    theta: float
    rho: float
    x: float
    lam: float
    scaled: bool = True
    trajectory: Callable | None = None


class _PhaseTrajectory:
    """Piecewise description of ``theta(x)`` for one ``(V, lam, theta0)``."""

    def __init__(self, V: Potential, lam: float, theta0: float, scaled: bool, dense: bool = True,
                 scale: float = 1.0):
        self.V, self.lam, self.scaled, self.R = V, float(lam), scaled, float(scale)
        R = self.R
        n = V.n_segments
        self.theta_start = np.empty(n + 1)
        self.theta_end_left = np.empty(n)
        self.dense: list = [None] * n
        theta = float(theta0)
        cap = step_cap(lam)
        for i in range(n):
            lo, hi = V.breaks[i], V.breaks[i + 1]
            if i > 0 and scaled:
                # restore C^1 continuity of u across a jump in V by re-deriving
                # theta from (u, u'); only the ratio of scales matters
                r_left = math.sqrt(lam - V.left_limit(lo))
                r_right = math.sqrt(lam - V(lo))
                theta = float(_rescale_phase(theta, r_right / r_left))
            self.theta_start[i] = theta
            c0, c1, c2, c3 = (float(v) for v in V.coeffs[i])
            if V.segment_is_constant(i):
                theta = float(self._advance_constant(theta, lam - c0, hi - lo))
            else:
                def rhs(x, y, c0=c0, c1=c1, c2=c2, c3=c3, lo=lo):
                    s = x - lo
                    q = lam - (c0 + s * (c1 + s * (c2 + s * c3)))
                    t = y[0]
                    if scaled:
                        dv = c1 + s * (2 * c2 + 3 * s * c3)
                        return [math.sqrt(q) - dv * math.sin(2 * t) / (4.0 * q)]
                    sn, cs = math.sin(t), math.cos(t)
                    return [R * cs * cs + q / R * sn * sn]

                y1, self.dense[i] = _march(rhs, lo, hi, [theta], ATOL, min(cap, hi - lo), dense)
                theta = float(y1[0])
            self.theta_end_left[i] = theta
        self.theta_start[n] = theta

    def _advance_constant(self, theta, k2, h):
        if self.scaled:
            return theta + math.sqrt(k2) * np.asarray(h)
        R = self.R
        if k2 > 0.0:
            k = math.sqrt(k2)
            return _rescale_phase(_rescale_phase(theta, k / R) + k * np.asarray(h), R / k)
        m11, m12, m21, m22 = transfer_entries(k2, h)
        s, c = math.sin(theta) / R, math.cos(theta)
        # (R u, u') ~ (sin, cos); the phase moves by less than pi here
        u, du = m11 * s + m12 * c, m21 * s + m22 * c
        return _nearest_lift(np.arctan2(R * u, du), theta)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        V = self.V
        idx = np.clip(np.searchsorted(V.breaks, flat, side="right") - 1, 0, V.n_segments - 1)
        out = np.empty(flat.size)
        for i in np.unique(idx):
            sel = idx == i
            xs = flat[sel]
            if self.dense[i] is None:
                if not V.segment_is_constant(i):
                    raise ValueError("built with dense=False; only the final phase is available")
                out[sel] = self._advance_constant(self.theta_start[i], self.lam - V.coeffs[i, 0],
                                                  xs - V.breaks[i])
            else:
                out[sel] = self.dense[i](xs)[0]
        out = out.reshape(x.shape)
        return float(out) if out.ndim == 0 else out

    @property
    def final(self) -> float:
        return float(self.theta_start[-1])


def prufer_phase(V: Potential, lam: float, theta0: float = 0.0, x_end: float = TWO_PI,
                 scaled: bool = True, dense: bool = False) -> PruferState:
    """Integrate the Prufer phase of the solution with ``theta(0) = theta0``.

    With ``scaled=True`` (the default) the transform uses
    ``R = sqrt(lam - V)`` and so needs ``lam > max V``; the phase then obeys
    ``theta' = sqrt(lam - V) - V' sin(2 theta) / (4 (lam - V))`` inside
    segments.  ``scaled=False`` uses ``R = 1`` and works for every ``lam``.
    The returned phase is a continuous lift, never reduced mod pi.
    """
    if not 0.0 < x_end <= TWO_PI:
        raise ValueError("x_end must lie in (0, 2*pi]")
    if scaled:
        vmax = V.extrema()[1]
        if not lam > vmax:
            raise PhaseDomainError(f"lam={lam} must exceed max V={vmax}")
    traj = _PhaseTrajectory(V, lam, theta0, scaled, dense=dense or x_end != TWO_PI)
    theta = traj.final if x_end == TWO_PI else traj(x_end)
    # amplitude from the solution with the matching initial data
    r0 = math.sqrt(lam - V(0.0)) if scaled else 1.0
    u0 = np.array([math.sin(theta0) / r0, math.cos(theta0)])
    Y = Propagator(V, lam).at(x_end)
    u, du = Y @ u0
    r = math.sqrt(lam - V.left_limit(x_end)) if scaled else 1.0
    rho = math.hypot(r * u, du)
    return PruferState(float(theta), rho, float(x_end), float(lam), scaled, traj if dense else None)


def phase_at_end(V: Potential, lam: float, theta0: float = 0.0, scaled: bool = False,
                 scale: float = 1.0) -> float:
    """``theta(2*pi)`` only; the cheap path used inside root finders.

    For the unscaled phase, ``scale`` is a constant ``R`` in
    ``R u = rho sin(theta)``.  Multiples of pi (the roots of u) do not depend
    on it, but ``R ~ sqrt(lam)`` makes ``theta'`` nearly uniform, which
    costs the integrator far fewer steps than ``R = 1``.
    """
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    return _PhaseTrajectory(V, lam, theta0, scaled, dense=False, scale=scale).final


def phase_from_trajectory(xs: np.ndarray, u: np.ndarray, du: np.ndarray, V: Potential, lam: float,
                          theta0: float) -> np.ndarray:
    """Lift ``atan2(R u, u')`` along densely sampled ``(u, u')``.

    Independent reconstruction of the modified Prufer phase: samples must be
    close enough that consecutive phases differ by less than pi.
    """
    # at x = 2*pi the phase belongs to the last segment, not to V(0)
    Vx = np.where(xs >= TWO_PI, V.left_limit(TWO_PI), V(xs))
    R = np.sqrt(lam - Vx)
    ang = np.arctan2(R * u, du)
    out = np.empty_like(ang)
    prev = theta0
    for j, a in enumerate(ang):
        prev = float(_nearest_lift(a, prev))
        out[j] = prev
    return out
