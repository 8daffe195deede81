import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from periodic_revival.core import Grid, InitialDatum, Potential, section5_potential, section5_sawtooth
from periodic_revival.spectrum import all_spectra, eigenfunctions


@pytest.fixture(scope="session")
def V5():
    return section5_potential()


@pytest.fixture(scope="session")
def saw():
    return section5_sawtooth()


@pytest.fixture(scope="session")
def zero():
    return Potential.builtin("zero")


@pytest.fixture(scope="session")
def grid():
    return Grid(4000)


@pytest.fixture(scope="session")
def spectra5(V5):
    return all_spectra(V5, 31)


@pytest.fixture(scope="session")
def eigs5(V5, spectra5, grid):
    return eigenfunctions(V5, spectra5["periodic"], grid)


@pytest.fixture(scope="session")
def sin_datum():
    return InitialDatum.hermite(np.sin, np.cos, 512)


@pytest.fixture(scope="session")
def cos_datum():
    return InitialDatum.hermite(np.cos, lambda x: -np.sin(x), 512)


@pytest.fixture(scope="session")
def tent():
    """Continuous piecewise-linear datum (in the form domain)."""
    return InitialDatum.from_segments([(0.0, math.pi, [0.0, 1.0]), (math.pi, 2 * math.pi, [math.pi, -1.0])])


@pytest.fixture(scope="session")
def galerkin5(V5):
    from oracles import galerkin_eigenvalues

    return galerkin_eigenvalues(V5, kmax=2048, count=20)
