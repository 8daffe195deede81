import math

import numpy as np
import pytest

from periodic_revival.core import TWO_PI, Grid, InitialDatum, Potential, WaveField
from periodic_revival.evolution import (GramCheckError, build_setup, evolve, evolve_at,
                                        expand_initial, gauge_transform, reconstruction_error,
                                        solution)
from periodic_revival.spectrum import eigenfunctions, eigenvalues


@pytest.fixture(scope="module")
def setup5(V5, saw, grid):
    return build_setup(V5, saw, 200, grid)


def test_free_sine_has_single_coefficient(zero, sin_datum, grid):
    S = build_setup(zero, sin_datum, 20, grid)
    c = S.coeffs.values
    k = int(np.argmax(np.abs(c)))
    assert abs(c[k]) == pytest.approx(math.sqrt(math.pi), abs=1e-10)
    assert np.max(np.abs(np.delete(c, k))) <= 1e-10
    # the basis element carrying it is sin(x)/sqrt(pi)
    np.testing.assert_allclose(S.eigs[k].samples * np.sign(c[k]).real,
                               np.sin(grid.nodes) / math.sqrt(math.pi), atol=1e-12)


def test_bessel(setup5):
    assert setup5.coeffs.bessel_gap() >= -1e-8
    assert setup5.coeffs.n_terms == 201


def test_reconstruction_error_matches_jump_estimate(setup5, saw):
    # ||f - P_K f||^2 ~ 1/(pi K) for a unit jump, K = N/2 frequencies
    err = reconstruction_error(setup5, saw)
    assert err == pytest.approx(1 / math.sqrt(math.pi * 100), rel=0.05)


def test_reconstruction_decays_like_inverse_sqrt(V5, saw, grid):
    errs = [reconstruction_error(build_setup(V5, saw, n, grid), saw) for n in (100, 400)]
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.1)


def test_t0_reconstructs_within_truncation(setup5, saw):
    u = evolve(setup5, 0.0)
    err = np.sqrt(np.sum(np.abs(u.samples - saw(u.x)) ** 2) * u.grid.spacing)
    assert err <= 1.05 * reconstruction_error(setup5, saw)


def test_single_mode_complex_datum(zero, sin_datum, cos_datum, grid):
    S = build_setup(zero, cos_datum, 10, grid, f_imag=sin_datum)
    for t in (0.3, 1.0, 2.5):
        u = evolve(S, t)
        np.testing.assert_allclose(u.samples, np.exp(-1j * t) * np.exp(1j * grid.nodes), atol=1e-9)


@pytest.mark.parametrize("t", [0.1, 1.0, math.pi])
def test_unitarity(setup5, t):
    assert abs(setup5.l2_norm(t) - setup5.l2_norm(0.0)) <= 1e-9


def test_unitarity_by_independent_quadrature(setup5):
    from periodic_revival.spectrum import oscillation_rule

    x, w = oscillation_rule(setup5.potential, setup5.lam.max(), setup5.eigs[0])
    n0 = np.sum(np.abs(evolve_at(setup5, 0.0, x)) ** 2 * w)
    n1 = np.sum(np.abs(evolve_at(setup5, 1.7, x)) ** 2 * w)
    assert abs(n1 - n0) <= 1e-9


def test_semigroup(setup5):
    t1, t2 = 0.37, 1.21
    a = setup5.coeffs.values * np.exp(-1j * setup5.lam * t1)
    direct = evolve(setup5, t1 + t2).samples
    composed = (a * np.exp(-1j * setup5.lam * t2)) @ setup5.samples
    assert np.max(np.abs(direct - composed)) <= 1e-10


def test_gauge_identities(grid):
    u = WaveField(grid, np.exp(1j * grid.nodes), 0.4)
    np.testing.assert_array_equal(gauge_transform(u, 0.0, 0.4).samples, u.samples)
    np.testing.assert_array_equal(gauge_transform(u, 3.0, 0.0).samples, u.samples)


@pytest.fixture(scope="module")
def direct5(V5, saw, grid):
    return build_setup(V5, saw, 200, grid, remove_mean=False)


@pytest.mark.parametrize("t", [math.pi / 5, 0.731, 2 * math.pi / 7, 1.9, 4.4, 0.05])
def test_gauge_equivalence(grid, setup5, direct5, t):
    a, b = solution(setup5, t), solution(direct5, t)
    assert np.sqrt(np.sum(np.abs(a.samples - b.samples) ** 2) * grid.spacing) <= 1e-6


def test_gram_failure_refused(V5, saw, grid):
    table = eigenvalues(V5, "periodic", 5)
    eigs = eigenfunctions(V5, table, grid)
    with pytest.raises(GramCheckError):
        expand_initial(saw, eigs + [eigs[1]])


def test_build_setup_validates_N(V5, saw, grid):
    with pytest.raises(ValueError):
        build_setup(V5, saw, 0, grid)
