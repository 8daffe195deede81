"""Spectral solver and revival analyser for the periodic Schrodinger equation."""

__version__ = "0.1.0"

from .core import (Grid, InitialDatum, Potential, RationalTime, SpectralCoefficients, WaveField,
                   quadrature, section5_potential, section5_sawtooth)
from .ode import FundamentalPair, PruferState, integrate_fundamental, prufer_phase
from .spectrum import (Eigenpair, SpectrumTable, compare_spectra, count_roots, dirichlet_form,
                       discriminant, eigenfunction, eigenfunctions, eigenvalues,
                       verify_interlacing)
from .asymptotics import (AsymptoticReport, CoefficientFit, asymptotic_residuals,
                          fit_coefficients, fundamental_asymptotic, mean_and_A1,
                          oscillatory_integral)
from .evolution import EvolutionSetup, build_setup, evolve, expand_initial, gauge_transform
from .revival import (JumpEstimate, RevivalDecomposition, decompose_and_diagnose,
                      free_translate_solution, revival_component)

__all__ = [
    "Grid", "InitialDatum", "Potential", "RationalTime", "SpectralCoefficients", "WaveField",
    "quadrature", "section5_potential", "section5_sawtooth",
    "FundamentalPair", "PruferState", "integrate_fundamental", "prufer_phase",
    "Eigenpair", "SpectrumTable", "compare_spectra", "count_roots", "dirichlet_form",
    "discriminant", "eigenfunction", "eigenfunctions", "eigenvalues", "verify_interlacing",
    "AsymptoticReport", "CoefficientFit", "asymptotic_residuals", "fit_coefficients",
    "fundamental_asymptotic", "mean_and_A1", "oscillatory_integral",
    "EvolutionSetup", "build_setup", "evolve", "expand_initial", "gauge_transform",
    "JumpEstimate", "RevivalDecomposition", "decompose_and_diagnose",
    "free_translate_solution", "revival_component",
]
