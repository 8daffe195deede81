"""Eigenfunction expansion of initial data and diagonal time propagation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (TWO_PI, Grid, InitialDatum, Potential, SpectralCoefficients, WaveField,
                   l2_inner)
from .spectrum import Eigenpair, SpectrumTable, eigenfunctions, eigenvalues, oscillation_rule

GRAM_TOL = 1e-6
_CHUNK = 128


class GramCheckError(RuntimeError):
    """The eigenfunctions handed to the expansion are not orthonormal enough to trust."""


@dataclass(frozen=True, eq=False)
class EvolutionSetup:
    """Everything needed to evaluate ``u_N(t, x) = sum c_n exp(-i lam_n t) psi_n(x)``.

    ``potential`` is the operator actually diagonalised.  When
    ``mean_removed`` is set, ``mean`` holds the subtracted constant and
    :func:`solution` applies the gauge factor.
    """

    potential: Potential
    mean: float
    mean_removed: bool
    table: SpectrumTable
    eigs: list[Eigenpair] = field(repr=False)
    coeffs: SpectralCoefficients = field(repr=False)
    grid: Grid = field(repr=False)
    gram: np.ndarray = field(repr=False)
    samples: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return len(self.eigs) - 1

    @property
    def lam(self) -> np.ndarray:
        return np.array([e.lam for e in self.eigs])

    def l2_norm(self, t: float = 0.0) -> float:
        """Norm of ``u_N(t)`` from the quadrature Gram matrix (independent of the grid)."""
        a = self.coeffs.values * np.exp(-1j * self.lam * t)
        return math.sqrt(max(float(np.real(np.conj(a) @ self.gram @ a)), 0.0))


def _rule_values(eigs, x):
    return np.vstack([np.vstack([e(x) for e in eigs[i:i + _CHUNK]])
                      for i in range(0, len(eigs), _CHUNK)])


def expand_initial(f: InitialDatum, eigs: list[Eigenpair], grid: Grid | None = None,
                   f_imag: InitialDatum | None = None, gram_tol: float = GRAM_TOL):
    """``c_n = <f, psi_n>`` by Gauss quadrature with breaks of f and V forced.

    Complex data are passed as real and imaginary parts.  Returns the
    coefficients and the quadrature Gram matrix; raises
    :class:`GramCheckError` when that matrix is further than ``gram_tol``
    from the identity.
    """
    if not eigs:
        raise ValueError("no eigenfunctions to expand in")
    V = eigs[0].potential
    extra = [f] + ([f_imag] if f_imag is not None else [])
    x, w = oscillation_rule(V, max(e.lam for e in eigs), *extra)
    vals = _rule_values(eigs, x)
    gram = (vals * w) @ vals.T
    defect = float(np.max(np.abs(gram - np.eye(len(eigs)))))
    if defect > gram_tol:
        raise GramCheckError(f"Gram matrix deviates from identity by {defect:.3e}")
    c = vals @ (f(x) * w)
    norm_sq = l2_inner(f, f)
    if f_imag is not None:
        c = c + 1j * (vals @ (f_imag(x) * w))
        norm_sq += l2_inner(f_imag, f_imag)
    return SpectralCoefficients(c, basis="eigen", norm_sq=norm_sq), gram


def build_setup(V: Potential, f: InitialDatum, N: int, grid: Grid, remove_mean: bool = True,
                f_imag: InitialDatum | None = None, gram_tol: float = GRAM_TOL) -> EvolutionSetup:
    """Periodic spectrum, eigenfunctions ``psi_0..psi_N`` and coefficients of ``f``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    mean = V.mean()
    W = V.mean_removed() if remove_mean else V
    table = eigenvalues(W, "periodic", N + 1)
    eigs = eigenfunctions(W, table, grid)
    coeffs, gram = expand_initial(f, eigs, grid, f_imag, gram_tol)
    samples = np.vstack([e.samples for e in eigs])
    return EvolutionSetup(W, mean if remove_mean else 0.0, remove_mean, table, eigs, coeffs,
                          grid, gram, samples)


def _propagate(setup: EvolutionSetup, t: float, basis: np.ndarray) -> np.ndarray:
    a = setup.coeffs.values * np.exp(-1j * setup.lam * t)
    return a.real @ basis + 1j * (a.imag @ basis)


def evolve(setup: EvolutionSetup, t: float) -> WaveField:
    """``u_N(t)`` for the diagonalised (possibly mean-removed) operator."""
    return WaveField(setup.grid, _propagate(setup, t, setup.samples), t)


def evolve_at(setup: EvolutionSetup, t: float, x) -> np.ndarray:
    """``u_N(t, x)`` at arbitrary points."""
    x = np.asarray(x, dtype=float)
    return _propagate(setup, t, _rule_values(setup.eigs, x))


def gauge_transform(u_star: WaveField, meanV: float, t: float) -> WaveField:
    """``u = exp(-i <V> t) u*``."""
    return WaveField(u_star.grid, u_star.samples * np.exp(-1j * meanV * t), t)


def solution(setup: EvolutionSetup, t: float) -> WaveField:
    """The truncated solution for the original potential."""
    return gauge_transform(evolve(setup, t), setup.mean, t)


def reconstruction_error(setup: EvolutionSetup, f: InitialDatum) -> float:
    """``||sum c_n psi_n - f||`` via ``||f||^2 - 2 Re<f, Pf> + ||Pf||^2``; exact for orthonormal psi."""
    c = setup.coeffs.values
    proj = float(np.real(np.conj(c) @ setup.gram @ c))
    err_sq = setup.coeffs.norm_sq - 2.0 * float(np.sum(np.abs(c) ** 2)) + proj
    return math.sqrt(max(err_sq, 0.0))
