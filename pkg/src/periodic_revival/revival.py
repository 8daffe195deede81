"""Rational-time revival function and continuity diagnostics for the remainder."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import TWO_PI, Grid, InitialDatum, RationalTime, WaveField

DELTA_CELLS = 20   # Gibbs exclusion half-width, in grid cells
WINDOW_CELLS = 40  # fit window length beyond the exclusion core


def gauss_weights(t: RationalTime) -> np.ndarray:
    """``G_k = (1/r) sum_m exp(2 pi i (mk - m^2 q)/r)`` for k = 0..r-1."""
    q, r = t.q, t.r
    m = np.arange(r)
    # reduce exponents mod r in integers so large r keeps full accuracy
    expo = (np.outer(np.arange(r), m) - (m * m * q)[None, :]) % r
    return np.exp(2j * np.pi * expo / r).sum(axis=1) / r


def free_translate_solution(f: InitialDatum, t: RationalTime, grid: Grid) -> WaveField:
    """Free evolution at ``t = 2 pi q/r`` as a weighted sum of ``r`` translates of ``f*``."""
    x = grid.nodes
    G = gauss_weights(t)
    u = np.zeros(x.size, dtype=complex)
    for k in range(t.r):
        if G[k] != 0:
            u += G[k] * f(x - TWO_PI * k / t.r)
    return WaveField(grid, u, t.value)


def revival_component(f: InitialDatum, t: RationalTime, meanV: float, grid: Grid) -> WaveField:
    """``psi(2 pi q/r, x) = exp(-2 pi i <V> q/r) * free_translate_solution``."""
    free = free_translate_solution(f, t, grid)
    return WaveField(grid, free.samples * np.exp(-2j * np.pi * meanV * t.q / t.r), t.value)


def candidate_points(sources, t: RationalTime, grid: Grid) -> np.ndarray:
    """All ``d + 2 pi k/r`` mod 2 pi, merged when closer than two grid cells."""
    pts = np.array(sorted({(float(d) + TWO_PI * k / t.r) % TWO_PI
                           for d in sources for k in range(t.r)}))
    if pts.size == 0:
        return pts
    tol = 2.0 * grid.spacing
    keep = [pts[0]]
    for p in pts[1:]:
        if p - keep[-1] > tol:
            keep.append(p)
    if len(keep) > 1 and keep[0] + TWO_PI - keep[-1] <= tol:
        keep.pop()
    return np.array(keep)


@dataclass(frozen=True)
class JumpEstimate:
    """One-sided linear fits on ``[x - delta - h, x - delta]`` and ``[x + delta, x + delta + h]``."""

    location: float
    half_width: float
    delta: float
    left: complex
    right: complex

    @property
    def jump(self) -> complex:
        return self.right - self.left


def estimate_jump(field_: WaveField, x0: float, delta: float, h: float) -> JumpEstimate:
    if not delta < delta + h or h <= 0:
        raise ValueError("window must extend beyond the exclusion core")
    x = field_.x
    s = (x - x0 + math.pi) % TWO_PI - math.pi   # periodic offset in [-pi, pi)
    sides = []
    for sign in (-1.0, 1.0):
        sel = (sign * s >= delta) & (sign * s <= delta + h)
        if sel.sum() < 8:
            raise ValueError("fewer than 8 samples in a fit window")
        A = np.vstack([np.ones(sel.sum()), s[sel]]).T
        coef, *_ = np.linalg.lstsq(A, field_.samples[sel], rcond=None)
        sides.append(complex(coef[0]))
    return JumpEstimate(float(x0), float(delta + h), float(delta), sides[0], sides[1])


@dataclass(frozen=True, eq=False)
class RevivalDecomposition:
    time: RationalTime
    u: WaveField
    psi_rev: WaveField
    w: WaveField
    candidate_jumps: np.ndarray
    jump_table: list[tuple[complex, complex, complex]] = field(repr=False)
    delta: float = 0.0
    window: float = 0.0

    @property
    def max_jump_u(self) -> float:
        return max((abs(j[0]) for j in self.jump_table), default=0.0)

    @property
    def max_jump_w(self) -> float:
        return max((abs(j[2]) for j in self.jump_table), default=0.0)

    @property
    def ratio(self) -> float:
        """``max|jump(w)| / max|jump(u)|``; NaN when u has no measurable jump."""
        ju = self.max_jump_u
        return self.max_jump_w / ju if ju > 0 else float("nan")

    def passes(self, threshold: float = 0.05) -> bool:
        return bool(self.max_jump_w <= threshold * self.max_jump_u)


def decompose_and_diagnose(u: WaveField, psi_rev: WaveField, f_jumps, t: RationalTime,
                           potential_breaks=(), delta_cells: int = DELTA_CELLS,
                           window_cells: int = WINDOW_CELLS) -> RevivalDecomposition:
    """Split ``u = w + psi_rev`` and estimate jumps of all three at every candidate point.

    Candidates are the translates ``d + 2 pi k/r`` of the jump locations of
    ``f`` and of the breakpoints of V.
    """
    if u.grid.n_points != psi_rev.grid.n_points:
        raise ValueError("u and psi_rev live on different grids")
    w = WaveField(u.grid, u.samples - psi_rev.samples, u.time)
    dx = u.grid.spacing
    delta, h = delta_cells * dx, window_cells * dx
    cands = candidate_points(list(f_jumps) + list(potential_breaks), t, u.grid)
    table = []
    for c in cands:
        table.append(tuple(estimate_jump(fld, c, delta, h).jump for fld in (u, psi_rev, w)))
    return RevivalDecomposition(t, u, psi_rev, w, cands, table, delta, delta + h)
