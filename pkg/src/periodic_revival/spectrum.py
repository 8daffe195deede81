"""Eigenvalues and eigenfunctions for periodic, semi-periodic and Dirichlet conditions.

The Dirichlet ladder ``Lambda_0 < Lambda_1 < ...`` comes from the
monotone Prufer phase.  Each ``Lambda_j`` sits in the j-th spectral gap of
the periodic operator, so the interval ``[Lambda_{j-1}, Lambda_{j+1}]``
isolates exactly one gap: gap j is bounded by two periodic eigenvalues
when j is odd and by two semi-periodic ones when j is even.  Inside it the
discriminant has a single extremum, which also separates the two edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .core import TWO_PI, Grid, PiecewisePolynomial, Potential, panel_nodes
from .ode import Propagator, phase_at_end

BCS = ("periodic", "semiperiodic", "dirichlet")

DOUBLE_TOL = 1e-7     # extremum of s*Delta - 2 below this => multiplicity 2
NOISE_TOL = 1e-11     # below this the gap is treated as exactly closed
PHASE_TOL = 1e-10
OPEN_TOL = 1e-4       # h(Lambda_j) above this => gap open, edges bracketed by Lambda_j
NULL_TOL = 1e-6


class SpectrumError(RuntimeError):
    def __init__(self, message, index=None):
        super().__init__(message if index is None else f"{message} (index {index})")
        self.index = index


class InconsistentEigenvalueError(SpectrumError):
    pass


class RootCountError(SpectrumError):
    pass


class OrderingError(ValueError):
    pass


def _check_bc(bc):
    if bc not in BCS:
        raise ValueError(f"bc must be one of {BCS}, got {bc!r}")


def discriminant(V: Potential, lam: float) -> float:
    """Floquet discriminant ``phi1(2*pi) + phi2'(2*pi)``."""
    M = Propagator(V, lam, dense=False).monodromy
    return float(M[0, 0] + M[1, 1])


@dataclass(frozen=True, eq=False)
class SpectrumTable:
    """Ascending eigenvalues for one boundary condition.

    ``multiplicity`` is 2 for both members of a (near-)double pair;
    ``degenerate`` marks pairs that were resolved as two distinct values
    closer than the double threshold.  ``gap_peak`` holds the extremum of
    ``s*Delta - 2`` of the gap each value bounds (NaN for Dirichlet and
    the periodic ground state).
    """

    bc: str
    values: np.ndarray
    multiplicity: np.ndarray
    degenerate: np.ndarray
    gap_peak: np.ndarray
    potential: Potential | None = field(default=None, repr=False)

    @property
    def count(self) -> int:
        return len(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def truncated(self, n: int) -> "SpectrumTable":
        return SpectrumTable(self.bc, self.values[:n], self.multiplicity[:n], self.degenerate[:n],
                             self.gap_peak[:n], self.potential)


# Dirichlet ------------------------------------------------------------------


def dirichlet_eigenvalue(V: Potential, n: int) -> float:
    """``Lambda_n``: solve ``theta(2*pi, lam) = (n + 1) * pi`` with ``theta(0) = 0``.

    The bracket comes from comparison with the constant potentials
    ``min V`` and ``max V``, for which ``Lambda_n = ((n+1)/2)^2 + const``.
    """
    vmin, vmax = V.extrema()
    base = ((n + 1) / 2.0) ** 2
    target = (n + 1) * math.pi
    lo, hi = base + vmin, base + vmax
    pad = 1e-6 * max(1.0, abs(lo), abs(hi)) + 1e-3

    R = max(1.0, (n + 1) / 2.0)

    def F(lam):
        return phase_at_end(V, lam, 0.0, scaled=False, scale=R) - target

    lo -= pad
    hi += pad
    flo, fhi = F(lo), F(hi)
    for _ in range(60):
        if flo < 0.0 < fhi:
            break
        if flo >= 0.0:
            lo -= 2 * (hi - lo)
            flo = F(lo)
        if fhi <= 0.0:
            hi += 2 * (hi - lo)
            fhi = F(hi)
    else:
        raise SpectrumError("Dirichlet bracket exhausted", n)
    lam = brentq(F, lo, hi, xtol=1e-15 * max(1.0, abs(hi)), rtol=1e-15, maxiter=200)
    if abs(F(lam)) > PHASE_TOL:
        lam = _polish_dirichlet(V, lam, n)
    return float(lam)


def _polish_dirichlet(V, lam, n):
    # phi2(2*pi, .) changes sign at Lambda_n; bisect it in a tiny bracket
    def g(x):
        return Propagator(V, x, dense=False).monodromy[0, 1]

    h = 1e-9 * max(1.0, abs(lam))
    for _ in range(20):
        if g(lam - h) * g(lam + h) < 0:
            return brentq(g, lam - h, lam + h, xtol=1e-16 * max(1.0, abs(lam)), rtol=1e-15)
        h *= 4
    raise SpectrumError("Dirichlet phase tolerance not reached", n)


def dirichlet_ladder(V: Potential, count: int) -> np.ndarray:
    return np.array([dirichlet_eigenvalue(V, n) for n in range(count)])


# gap edges ------------------------------------------------------------------


@dataclass(frozen=True)
class GapEdges:
    index: int
    lower: float
    upper: float
    peak: float
    closed: bool
    near_double: bool


def _ground_state(V: Potential, lam_d0: float) -> float:
    vmin, _ = V.extrema()
    lo = vmin - 1.0
    f = lambda lam: discriminant(V, lam) - 2.0
    while f(lo) <= 0.0:
        lo -= 2.0 * (lam_d0 - lo)
    return float(brentq(f, lo, lam_d0, xtol=1e-15 * max(1.0, abs(lam_d0)), rtol=1e-15))


def _gap(V: Potential, j: int, left: float, dj: float, right: float) -> GapEdges:
    """Edges of gap ``j`` given anchors with ``s*Delta <= -2`` on both sides."""
    s = -1.0 if j % 2 == 0 else 1.0
    h = lambda lam: s * discriminant(V, lam) - 2.0
    scale = max(1.0, abs(dj))
    xtol = 1e-15 * scale

    hd = h(dj)
    if hd + 1.0 <= 0.0:
        raise SpectrumError("Dirichlet eigenvalue outside its gap", j)
    if hd > OPEN_TOL:
        # Lambda_j sits strictly inside an open gap: it splits the two edges,
        # and the peak only needs locating roughly (it is reported, not used)
        lower = brentq(h, left, dj, xtol=xtol, rtol=1e-15)
        upper = brentq(h, dj, right, xtol=xtol, rtol=1e-15)
        res = minimize_scalar(lambda x: -h(x), bounds=(lower, upper), method="bounded",
                              options={"xatol": 1e-4 * (upper - lower), "maxiter": 100})
        return GapEdges(j, float(lower), float(upper), max(hd, float(-res.fun)), False, False)
    xl = brentq(lambda x: h(x) + 1.0, left, dj, xtol=xtol, rtol=1e-15)
    xr = brentq(lambda x: h(x) + 1.0, dj, right, xtol=xtol, rtol=1e-15)
    res = minimize_scalar(lambda x: -h(x), bounds=(xl, xr), method="bounded",
                          options={"xatol": 1e-14 * scale, "maxiter": 500})
    peak_at, peak = float(res.x), float(-res.fun)
    if hd > peak:
        peak_at, peak = dj, hd

    if peak < NOISE_TOL:
        # closed gap: every solution satisfies the condition, including the
        # Dirichlet one, so the double eigenvalue is Lambda_j itself
        return GapEdges(j, dj, dj, peak, True, True)
    lower = brentq(h, xl, peak_at, xtol=xtol, rtol=1e-15)
    upper = brentq(h, peak_at, xr, xtol=xtol, rtol=1e-15)
    return GapEdges(j, float(lower), float(upper), peak, False, peak < DOUBLE_TOL)


def eigenvalues(V: Potential, bc: str, N: int, dirichlet: np.ndarray | None = None) -> SpectrumTable:
    """The first ``N`` eigenvalues (with multiplicity) for boundary condition ``bc``."""
    _check_bc(bc)
    if N < 1:
        raise ValueError("N must be >= 1")
    need = N if bc == "dirichlet" else N + 1
    if dirichlet is None or len(dirichlet) < need:
        dirichlet = dirichlet_ladder(V, need)
    if bc == "dirichlet":
        vals = np.asarray(dirichlet[:N], dtype=float)
        return SpectrumTable(bc, vals, np.ones(N, int), np.zeros(N, bool), np.full(N, np.nan), V)

    vals, mult, degen, peaks = [], [], [], []
    if bc == "periodic":
        lam0 = _ground_state(V, dirichlet[0])
        vals.append(lam0); mult.append(1); degen.append(False); peaks.append(np.nan)
        gaps = range(1, N, 2)
        left_of = lambda j: dirichlet[j - 1]
    else:
        gaps = range(0, N, 2)
        lam0 = None
        left_of = lambda j: dirichlet[j - 1] if j > 0 else lam0

    for j in gaps:
        if j == 0:
            lam0 = _ground_state(V, dirichlet[0])
        g = _gap(V, j, left_of(j), dirichlet[j], dirichlet[j + 1])
        m = 2 if g.near_double else 1
        flag = g.near_double and not g.closed
        vals += [g.lower, g.upper]
        mult += [m, m]
        degen += [flag, flag]
        peaks += [g.peak, g.peak]
    return SpectrumTable(bc, np.array(vals[:N]), np.array(mult[:N]), np.array(degen[:N]),
                         np.array(peaks[:N]), V)


def all_spectra(V: Potential, N: int) -> dict[str, SpectrumTable]:
    """Periodic, semi-periodic and Dirichlet tables sharing one Dirichlet ladder."""
    ladder = dirichlet_ladder(V, N + 1)
    return {bc: eigenvalues(V, bc, N, ladder) for bc in BCS}


# eigenfunctions --------------------------------------------------------------


def _wavenumber(V: Potential, lam: float) -> float:
    vmin, _ = V.extrema()
    return math.sqrt(max(lam - vmin, 1.0))


def oscillation_rule(V: Potential, lam: float, *others, order: int = 16):
    """Gauss rule on [0, 2*pi] resolving oscillations at ``lam``, breaks forced."""
    forced = set(float(b) for b in V.interior_breaks)
    for o in others:
        forced.update(float(b) for b in getattr(o, "interior_breaks", ()))
    k = _wavenumber(V, lam)
    return panel_nodes(0.0, TWO_PI, sorted(forced), order, max_width=min(0.5, math.pi / k))


@dataclass(frozen=True, eq=False)
class Eigenpair:
    """A normalised eigenfunction ``psi = c1*phi1 + c2*phi2`` with its eigenvalue.

    ``samples`` are values on ``grid``; calling the object evaluates
    ``psi`` anywhere (periodic or anti-periodic extension outside
    [0, 2*pi)).  ``norm`` is the L2 norm before normalisation.
    """

    index: int
    lam: float
    bc: str
    coeffs: np.ndarray
    norm: float
    grid: Grid
    samples: np.ndarray = field(repr=False)
    propagator: Propagator = field(repr=False)

    @property
    def potential(self) -> Potential:
        return self.propagator.V

    @property
    def interior_breaks(self):
        return self.potential.interior_breaks

    def _state(self, x):
        x = np.asarray(x, dtype=float)
        turns = np.floor(x / TWO_PI)
        xr = x - turns * TWO_PI
        Y = self.propagator.at(xr)
        u = Y @ self.coeffs
        if self.bc == "semiperiodic":
            u = u * np.where(turns % 2 == 0, 1.0, -1.0)[..., None]
        return u

    def __call__(self, x):
        out = self._state(x)[..., 0]
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, x):
        out = self._state(x)[..., 1]
        return float(out) if np.ndim(out) == 0 else out

    @property
    def endpoints(self) -> tuple[float, float, float, float]:
        """``psi(0), psi'(0), psi(2pi), psi'(2pi)`` from the fundamental matrix."""
        a = self.coeffs
        b = self.propagator.monodromy @ a
        return float(a[0]), float(a[1]), float(b[0]), float(b[1])

    def boundary_residual(self) -> float:
        p0, d0, p1, d1 = self.endpoints
        k = _wavenumber(self.potential, self.lam)
        if self.bc == "periodic":
            return max(abs(p1 - p0), abs(d1 - d0) / k)
        if self.bc == "semiperiodic":
            return max(abs(p1 + p0), abs(d1 + d0) / k)
        return max(abs(p0), abs(p1))

    def wavenumber(self) -> float:
        return _wavenumber(self.potential, self.lam)


def _null_space(M: np.ndarray, bc: str, k: float, dim: int) -> np.ndarray:
    """Initial data ``(u(0), u'(0))`` spanning the solutions meeting ``bc``."""
    if bc == "dirichlet":
        return np.array([[0.0, 1.0]]).T
    S = np.diag([1.0, 1.0 / k])
    Sinv = np.diag([1.0, k])
    sign = -1.0 if bc == "periodic" else 1.0
    B = S @ M @ Sinv + sign * np.eye(2)
    _, sv, vt = np.linalg.svd(B)
    if sv[-1] > NULL_TOL * max(1.0, np.abs(S @ M @ Sinv).max()):
        raise InconsistentEigenvalueError(
            f"boundary matrix has no null vector (smallest singular value {sv[-1]:.3e})")
    if dim == 2:
        return Sinv @ np.eye(2)
    return (Sinv @ vt[-1])[:, None]


def _apply_sign(c, samples, x=None):
    tol = 1e-8 * np.max(np.abs(samples))
    nz = np.flatnonzero(np.abs(samples) > tol)
    if nz.size and samples[nz[0]] < 0:
        return -c, -samples
    return c, samples


def _orthonormal(V, lam, bc, cols: np.ndarray, k: float):
    """Orthonormalise the solutions with initial data ``cols`` (Gram-Schmidt).

    The Gram matrix is formed from sampled values of each candidate rather
    than from ``phi1, phi2``: where the fundamental solutions grow
    exponentially the combination cancels heavily and ``c^T G c`` would
    lose most of its digits.
    """
    prop = Propagator(V, lam)
    x, w = oscillation_rule(V, lam)
    vals = prop.at(x)[:, 0, :] @ cols
    G = vals.T @ (vals * w[:, None])
    out = []
    norms = []
    for i in range(cols.shape[1]):
        v = np.zeros(cols.shape[1])
        v[i] = 1.0
        for prev in out:
            v = v - (prev @ G @ v) * prev
        nrm = math.sqrt(float(v @ G @ v))
        norms.append(nrm)
        out.append(v / nrm)
    return prop, [cols @ v for v in out], norms


def eigenfunctions(V: Potential, table: SpectrumTable, grid: Grid, count: int | None = None) -> list[Eigenpair]:
    """Normalised eigenfunctions for the first ``count`` entries of ``table``.

    Exactly closed gaps contribute the orthonormalised pair built from
    ``phi1, phi2``; near-degenerate pairs are orthonormalised together.
    """
    n = len(table) if count is None else min(count, len(table))
    out: list[Eigenpair] = []
    i = 0
    xg = grid.nodes
    while i < n:
        lam = float(table.values[i])
        paired = (table.multiplicity[i] == 2 and i + 1 < len(table)
                  and table.multiplicity[i + 1] == 2)
        if paired:
            lam2 = float(table.values[i + 1])
            out.extend(_pair(V, table.bc, lam, lam2, i, grid))
            i += 2
            continue
        out.append(eigenfunction(V, lam, table.bc, grid, index=i))
        i += 1
    return out[:n]


def _finish(V, lam, bc, c, prop, nrm, grid, index):
    c = c / nrm
    samples = prop.at(grid.nodes)[:, 0, :] @ c
    c, samples = _apply_sign(c, samples)
    return Eigenpair(index, float(lam), bc, c, float(nrm), grid, samples, prop)


def eigenfunction(V: Potential, lam: float, bc: str, grid: Grid, index: int = -1,
                  double: bool = False):
    """Eigenfunction(s) for an eigenvalue from :func:`eigenvalues`.

    With ``double=True`` returns the two orthonormal functions spanning a
    closed gap's eigenspace.
    """
    _check_bc(bc)
    prop = Propagator(V, lam)
    k = _wavenumber(V, lam)
    if bc == "dirichlet":
        residual = abs(prop.monodromy[0, 1]) * k
        if residual > NULL_TOL * max(1.0, abs(prop.monodromy).max()):
            raise InconsistentEigenvalueError(f"phi2(2pi) = {prop.monodromy[0, 1]:.3e}", index)
    cols = _null_space(prop.monodromy, bc, k, 2 if double else 1)
    prop, vecs, norms = _orthonormal(V, lam, bc, cols, k)
    made = [_finish(V, lam, bc, v * nrm, prop, nrm, grid, index + j)
            for j, (v, nrm) in enumerate(zip(vecs, norms))]
    return made if double else made[0]


def _pair(V, bc, lam1, lam2, index, grid):
    if lam1 == lam2:
        return eigenfunction(V, lam1, bc, grid, index=index, double=True)
    a = eigenfunction(V, lam1, bc, grid, index=index)
    b = eigenfunction(V, lam2, bc, grid, index=index + 1)
    # restore exact orthogonality lost to the ill-conditioned null vectors
    x, w = oscillation_rule(V, max(lam1, lam2))
    ua, ub = a(x), b(x)
    proj = float(np.sum(ua * ub * w))
    if abs(proj) > 1e-12:
        c = b.coeffs - proj * a.coeffs
        nrm = math.sqrt(float(np.sum((ub - proj * ua) ** 2 * w)))
        b = _finish(V, lam2, bc, c, b.propagator, nrm, grid, index + 1)
    return [a, b]


def gram_matrix(eigs: list[Eigenpair]) -> np.ndarray:
    V = eigs[0].potential
    x, w = oscillation_rule(V, max(e.lam for e in eigs))
    vals = np.array([e(x) for e in eigs])
    return (vals * w) @ vals.T


# roots ------------------------------------------------------------------------


def sign_change_roots(ep: Eigenpair, points_per_wave: int = 32) -> int:
    """Roots counted by sign changes on a dense uniform sampling.

    [0, 2*pi) circularly for periodic/semi-periodic, (0, 2*pi) for
    Dirichlet.  Sign changes closer than two sample spacings are merged.
    """
    k = ep.wavenumber()
    n = max(512, int(points_per_wave * k) + 1)
    x = np.linspace(0.0, TWO_PI, n + 1)
    dx = x[1]
    if ep.bc == "dirichlet":
        xs = x[1:-1]
        vals = ep(xs)
        wrap = None
    else:
        xs = x[:-1]
        vals = ep(xs)
        wrap = 1.0 if ep.bc == "periodic" else -1.0
    tol = 1e-12 * np.max(np.abs(vals))
    keep = np.abs(vals) > tol
    pos = xs[keep]
    sg = np.sign(vals[keep])
    change = np.flatnonzero(sg[1:] != sg[:-1])
    locs = list(0.5 * (pos[change] + pos[change + 1]))
    if wrap is not None and sg.size and sg[-1] != wrap * sg[0]:
        locs.append(0.5 * (pos[-1] + pos[0] + TWO_PI))
    locs.sort()
    merged = []
    for loc in locs:
        if merged and loc - merged[-1] < 2 * dx:
            continue
        merged.append(loc)
    if wrap is not None and len(merged) > 1 and merged[0] + TWO_PI - merged[-1] < 2 * dx:
        merged.pop()
    return len(merged)


def phase_roots(ep: Eigenpair) -> int:
    """Roots from the (unscaled) Prufer phase of ``ep`` over one period."""
    p0, d0, _, _ = ep.endpoints
    R = math.sqrt(max(ep.lam - ep.potential.extrema()[0], 1.0))
    if ep.bc == "dirichlet":
        theta = phase_at_end(ep.potential, ep.lam, 0.0, scaled=False, scale=R)
        return int(round(theta / math.pi)) - 1
    theta0 = math.atan2(R * p0, d0)
    theta = phase_at_end(ep.potential, ep.lam, theta0, scaled=False, scale=R)
    return int(round((theta - theta0) / math.pi))


def count_roots(ep: Eigenpair, check: bool = True) -> int:
    """Number of roots on [0, 2*pi) (periodic, semi-periodic) or (0, 2*pi) (Dirichlet)."""
    n = sign_change_roots(ep)
    if check:
        p = phase_roots(ep)
        if p != n:
            raise RootCountError(f"sign changes give {n} roots but the phase gives {p}", ep.index)
    return n


# interlacing --------------------------------------------------------------------


@dataclass(frozen=True)
class InequalityCheck:
    family: str
    left: str
    right: str
    strict: bool
    residual: float
    passed: bool


@dataclass(frozen=True)
class InterlacingReport:
    checks: tuple[InequalityCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[InequalityCheck]:
        return [c for c in self.checks if not c.passed]

    def by_family(self, family: str) -> list[InequalityCheck]:
        return [c for c in self.checks if c.family == family]


def _chain(family, items, tol):
    """Checks for a chain ``[(name, value), rel, (name, value), rel, ...]``."""
    out = []
    for i in range(0, len(items) - 2, 2):
        (ln, lv), rel, (rn, rv) = items[i], items[i + 1], items[i + 2]
        strict = rel == "<"
        residual = rv - lv
        passed = residual > tol if strict else residual >= -tol
        out.append(InequalityCheck(family, ln, rn, strict, float(residual), bool(passed)))
    return out


def verify_interlacing(periodic: SpectrumTable, semiperiodic: SpectrumTable,
                       dirichlet: SpectrumTable, tol: float = 1e-7) -> InterlacingReport:
    """Check the periodic/semi-periodic/Dirichlet orderings term by term.

    Families: ``"periodic-semiperiodic"`` (lam_0 < mu_0 <= mu_1 < lam_1 <= ...),
    ``"periodic-dirichlet"`` (lam_{2m+1} <= Lam_{2m+1} <= lam_{2m+2}),
    ``"semiperiodic-dirichlet"`` (mu_{2m} <= Lam_{2m} <= mu_{2m+1}) and
    ``"combined"`` (lam_0 < Lam_0 < lam_1 <= Lam_1 <= lam_2 < Lam_2 < ...).
    Non-strict relations pass with slack ``tol``; strict ones need a margin
    of ``tol``.
    """
    lam, mu, Lam = periodic.values, semiperiodic.values, dirichlet.values
    checks: list[InequalityCheck] = []

    # periodic vs semi-periodic: pattern lam0 < mu0 <= mu1 < lam1 <= lam2 < mu2 <= ...
    seq = [("lambda_0", lam[0])] if len(lam) else []
    i = 0
    while True:
        a, b = 2 * i, 2 * i + 1
        la, lb = 2 * i + 1, 2 * i + 2
        if b >= len(mu):
            if a < len(mu):
                seq += ["<", (f"mu_{a}", mu[a])]
            break
        seq += ["<", (f"mu_{a}", mu[a]), "<=", (f"mu_{b}", mu[b])]
        if la >= len(lam):
            break
        seq += ["<", (f"lambda_{la}", lam[la])]
        if lb >= len(lam):
            break
        seq += ["<=", (f"lambda_{lb}", lam[lb])]
        i += 1
    checks += _chain("periodic-semiperiodic", seq, tol)

    m = 0
    while 2 * m + 2 < len(lam) and 2 * m + 1 < len(Lam):
        checks += _chain("periodic-dirichlet", [
            (f"lambda_{2*m+1}", lam[2 * m + 1]), "<=", (f"Lambda_{2*m+1}", Lam[2 * m + 1]),
            "<=", (f"lambda_{2*m+2}", lam[2 * m + 2])], tol)
        m += 1
    m = 0
    while 2 * m + 1 < len(mu) and 2 * m < len(Lam):
        checks += _chain("semiperiodic-dirichlet", [
            (f"mu_{2*m}", mu[2 * m]), "<=", (f"Lambda_{2*m}", Lam[2 * m]),
            "<=", (f"mu_{2*m+1}", mu[2 * m + 1])], tol)
        m += 1

    seq = []
    for n in range(min(len(lam), len(Lam) + 1)):
        if seq:
            # Lambda_{n-1} rel lambda_n: strict when n-1 even
            seq += ["<" if (n - 1) % 2 == 0 else "<=", (f"lambda_{n}", lam[n])]
        else:
            seq = [(f"lambda_{n}", lam[n])]
        if n < len(Lam):
            seq += ["<" if n % 2 == 0 else "<=", (f"Lambda_{n}", Lam[n])]
    checks += _chain("combined", seq, tol)
    return InterlacingReport(tuple(checks))


# Dirichlet form -------------------------------------------------------------------


def _has_jumps(f) -> bool:
    return isinstance(f, PiecewisePolynomial) and bool(f.jumps())


def dirichlet_form(V: Potential, f, g) -> float:
    """``J(f, g) = int f' g' + V f g`` over one period.

    ``f`` and ``g`` are piecewise polynomials or eigenpairs.  A datum with a
    jump lies outside the form domain: ``J(f, f)`` is then ``+inf`` and the
    mixed form is undefined.
    """
    if _has_jumps(f) or _has_jumps(g):
        if f is g:
            return math.inf
        raise ValueError("J(f, g) is undefined for discontinuous data")
    lam = max([getattr(h, "lam", 0.0) for h in (f, g)])
    x, w = oscillation_rule(V, lam, f, g)
    vals = f.derivative(x) * g.derivative(x) + V(x) * f(x) * g(x)
    return float(np.sum(vals * w))


@dataclass(frozen=True)
class ComparisonReport:
    base: np.ndarray
    raised: np.ndarray
    tol: float

    @property
    def differences(self) -> np.ndarray:
        return self.raised - self.base

    @property
    def passed(self) -> bool:
        return bool(np.all(self.differences >= -self.tol))


def compare_spectra(V: Potential, V1: Potential, N: int, tol: float = 1e-8) -> ComparisonReport:
    """Periodic spectra of ``V <= V1``; the raised potential never lowers an eigenvalue."""
    x = np.linspace(0.0, TWO_PI, 4097)[:-1]
    breaks = np.union1d(V.breaks, V1.breaks)[:-1]
    diff = np.concatenate([V1(x) - V(x), V1(breaks) - V(breaks),
                           np.asarray(V1.left_limit(breaks)) - np.asarray(V.left_limit(breaks))])
    if np.min(diff) < -1e-12:
        raise OrderingError(f"V1 < V somewhere (by {-np.min(diff):.3e})")
    a = eigenvalues(V, "periodic", N).values
    b = eigenvalues(V1, "periodic", N).values
    return ComparisonReport(a, b, tol)
