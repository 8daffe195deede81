"""Large-eigenvalue behaviour: residuals, one-iteration formulas, coefficient fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import TWO_PI, Grid, InitialDatum, Potential, cumulative_integral, panel_nodes
from .ode import _PhaseTrajectory, PhaseDomainError
from .spectrum import Eigenpair, SpectrumTable, oscillation_rule


class FitDegenerateError(ValueError):
    pass


def mean_and_A1(V: Potential) -> tuple[float, float]:
    """Mean of V and the first asymptotic coefficient ``(1/4pi) int V = mean/2``."""
    total = V.integral()
    return total / TWO_PI, total / (4.0 * math.pi)


@dataclass(frozen=True, eq=False)
class AsymptoticReport:
    """Residuals of ``sqrt(lam) - (m + A1/m)`` for the pairs ``(lam_{2m-1}, lam_{2m})``."""

    m: np.ndarray
    lam_lo: np.ndarray
    lam_hi: np.ndarray
    model: np.ndarray
    resid_lo: np.ndarray
    resid_hi: np.ndarray
    A1: float

    @property
    def scaled_lo(self) -> np.ndarray:
        return self.resid_lo * self.m**3

    @property
    def scaled_hi(self) -> np.ndarray:
        return self.resid_hi * self.m**3

    @property
    def worst(self) -> np.ndarray:
        return np.maximum(np.abs(self.resid_lo), np.abs(self.resid_hi))

    def _window(self, lo, hi):
        return (self.m >= lo) & (self.m <= hi)

    def max_scaled(self, lo: int = 10, hi: int = 100) -> float:
        w = self._window(lo, hi)
        return float(np.max(self.worst[w] * self.m[w] ** 3))

    def loglog_slope(self, lo: int = 10, hi: int = 100) -> float:
        """Least-squares slope of ``log|r|`` against ``log m``; NaN when all residuals vanish."""
        w = self._window(lo, hi) & (self.worst > 0)
        if w.sum() < 2:
            return float("nan")
        return float(np.polyfit(np.log(self.m[w]), np.log(self.worst[w]), 1)[0])


def asymptotic_residuals(table: SpectrumTable, A1: float) -> AsymptoticReport:
    """Compare each periodic pair with ``m + A1/m``.

    Pairs are indexed so that ``(lam_{2m-1}, lam_{2m})`` belongs to
    frequency ``m``; the ground state is left out.
    """
    if table.bc != "periodic":
        raise ValueError("asymptotic residuals are defined for the periodic spectrum")
    lam = np.asarray(table.values)
    npairs = (len(lam) - 1) // 2
    m = np.arange(1, npairs + 1)
    lo, hi = lam[2 * m - 1], lam[2 * m]
    if np.any(lo < 0) or np.any(hi < 0):
        raise ValueError("negative eigenvalue under the square root")
    model = m + A1 / m
    return AsymptoticReport(m.astype(float), lo, hi, model, np.sqrt(lo) - model,
                            np.sqrt(hi) - model, A1)


def fundamental_asymptotic(V: Potential, m: int, which: str, x) -> np.ndarray:
    """One-iteration approximations to ``phi1`` or ``phi2`` at frequency ``m``.

    ``phi1 ~ cos(mx) + (1/m) int_0^x sin(m(x-y)) cos(my) V(y) dy`` and
    ``phi2 ~ sin(mx)/m + (1/m^2) int_0^x sin(m(x-y)) sin(my) V(y) dy``.
    ``x`` is a :class:`Grid` or a sorted array in [0, 2*pi].  ``V`` should
    have mean zero.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    xs = x.nodes if isinstance(x, Grid) else np.asarray(x, dtype=float)
    # sin(m(x-y)) = sin(mx)cos(my) - cos(mx)sin(my) turns the integral into two
    # cumulative integrals
    forced = V.interior_breaks
    pts = _refine(xs, m)
    if which == "phi1":
        A = cumulative_integral(lambda y: np.cos(m * y) ** 2 * V(y), pts, forced)
        B = cumulative_integral(lambda y: np.sin(m * y) * np.cos(m * y) * V(y), pts, forced)
        lead, scale = np.cos(m * pts), 1.0 / m
    elif which == "phi2":
        A = cumulative_integral(lambda y: np.cos(m * y) * np.sin(m * y) * V(y), pts, forced)
        B = cumulative_integral(lambda y: np.sin(m * y) ** 2 * V(y), pts, forced)
        lead, scale = np.sin(m * pts) / m, 1.0 / m**2
    else:
        raise ValueError("which must be 'phi1' or 'phi2'")
    out = lead + scale * (np.sin(m * pts) * A - np.cos(m * pts) * B)
    return out[np.searchsorted(pts, xs)]


def _refine(xs, m):
    """Add points so no cumulative panel spans more than a quarter wavelength."""
    width = min(0.25, math.pi / (2 * m))
    n = int(math.ceil(TWO_PI / width))
    return np.union1d(xs, np.linspace(0.0, TWO_PI, n + 1))


@dataclass(frozen=True)
class CoefficientFit:
    """Projections of ``(psi_{2m-1}, psi_{2m})`` onto ``a_m = cos(mx)/sqrt(pi)``, ``b_m = sin(mx)/sqrt(pi)``."""

    m: int
    alpha: tuple[float, float]
    beta: tuple[float, float]
    y_m: float
    residual_norm: tuple[float, float]

    @property
    def norm_defect(self) -> tuple[float, float]:
        return tuple(abs(a * a + b * b - 1.0) for a, b in zip(self.alpha, self.beta))

    @property
    def angle_offset(self) -> float:
        """Distance of the pair's angle difference from pi/2, modulo pi."""
        y_hat = math.atan2(self.beta[1], self.alpha[1])
        d = (y_hat - self.y_m - math.pi / 2) % math.pi
        return min(d, math.pi - d)


def fit_coefficients(pair: tuple[Eigenpair, Eigenpair], m: int) -> CoefficientFit:
    lo, hi = pair
    V = lo.potential
    x, w = oscillation_rule(V, max(lo.lam, hi.lam))
    a = np.cos(m * x) / math.sqrt(math.pi)
    b = np.sin(m * x) / math.sqrt(math.pi)
    alphas, betas, resid = [], [], []
    for ep in (lo, hi):
        v = ep(x)
        al, be = float(np.sum(v * a * w)), float(np.sum(v * b * w))
        if max(abs(al), abs(be)) < 1e-3:
            raise FitDegenerateError(f"eigenfunction {ep.index} has no frequency-{m} content")
        alphas.append(al)
        betas.append(be)
        resid.append(math.sqrt(float(np.sum((v - al * a - be * b) ** 2 * w))))
    y_m = math.atan2(betas[0], alphas[0])
    return CoefficientFit(m, tuple(alphas), tuple(betas), y_m, tuple(resid))


def oscillatory_integral(V: Potential, f: InitialDatum, c: float, lam: float, kind: str = "sin") -> float:
    """``int_0^{2pi} f(x) sin(c * theta(x, lam)) dx`` along the modified Prufer phase (theta(0) = 0)."""
    vmax = V.extrema()[1]
    if not lam > vmax:
        raise PhaseDomainError(f"lam={lam} must exceed max V={vmax}")
    theta = _PhaseTrajectory(V, lam, 0.0, scaled=True)
    trig = np.sin if kind == "sin" else np.cos
    k = math.sqrt(lam - V.extrema()[0]) * max(1.0, abs(c))
    forced = sorted(set(V.interior_breaks) | set(f.interior_breaks))
    x, w = panel_nodes(0.0, TWO_PI, forced, 16, max_width=min(0.5, math.pi / k))
    return float(np.sum(f(x) * trig(c * theta(x)) * w))


def projector_identity_gap(f, m: int, y: float) -> float:
    """Max difference between the standard and rotated frequency-``m`` projections of ``f``."""
    x, w = panel_nodes(0.0, TWO_PI, getattr(f, "interior_breaks", ()), 16,
                       max_width=min(0.5, math.pi / max(m, 1)))
    a = np.cos(m * x) / math.sqrt(math.pi)
    b = np.sin(m * x) / math.sqrt(math.pi)
    fx = f(x)
    fa, fb = float(np.sum(fx * a * w)), float(np.sum(fx * b * w))
    std = fa * a + fb * b
    e1 = math.cos(y) * a + math.sin(y) * b
    e2 = math.sin(y) * a - math.cos(y) * b
    rot = (math.cos(y) * fa + math.sin(y) * fb) * e1 + (math.sin(y) * fa - math.cos(y) * fb) * e2
    return float(np.max(np.abs(std - rot)))
