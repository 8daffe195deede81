import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from periodic_revival.asymptotics import (FitDegenerateError, asymptotic_residuals,
                                          fit_coefficients, fundamental_asymptotic, mean_and_A1,
                                          oscillatory_integral, projector_identity_gap)
from periodic_revival.core import TWO_PI, Grid, InitialDatum, Potential
from periodic_revival.ode import PhaseDomainError, Propagator
from periodic_revival.spectrum import eigenfunction, eigenfunctions, eigenvalues


@pytest.fixture(scope="module")
def V5m(V5):
    return V5.mean_removed()


@pytest.fixture(scope="module")
def table5m(V5m):
    return eigenvalues(V5m, "periodic", 83)


@pytest.mark.parametrize("V, expected", [
    (Potential.builtin("zero"), (0.0, 0.0)),
    (Potential.constant(2.5), (2.5, 1.25)),
    (Potential.builtin("section5_potential"), (6.75, 3.375)),
])
def test_mean_and_A1(V, expected):
    assert mean_and_A1(V) == pytest.approx(expected, rel=1e-14, abs=1e-15)


@settings(max_examples=20, deadline=None)
@given(st.floats(-20, 20))
def test_A1_linear_in_constant_shift(c):
    V = Potential.builtin("section5_potential")
    assert mean_and_A1(V.shifted(c))[1] == pytest.approx(mean_and_A1(V)[1] + c / 2, abs=1e-12)


def test_free_residuals_vanish(zero):
    rep = asymptotic_residuals(eigenvalues(zero, "periodic", 41), 0.0)
    assert np.max(np.abs(rep.resid_lo)) < 1e-9 and np.max(np.abs(rep.resid_hi)) < 1e-9
    assert list(rep.m[:3]) == [1, 2, 3]


def test_constant_potential_residual_is_binomial_tail():
    c = 3.0
    rep = asymptotic_residuals(eigenvalues(Potential.constant(c), "periodic", 61), c / 2)
    m = rep.m
    exact = np.sqrt(m**2 + c) - m - c / (2 * m)
    np.testing.assert_allclose(rep.resid_lo, exact, atol=1e-10)
    assert np.all(np.abs(rep.scaled_lo[m >= 10]) <= c**2 / 8 + 1.0 / m[m >= 10])
    assert rep.loglog_slope(10, 30) == pytest.approx(-3.0, abs=0.05)


def test_residuals_reject_other_boundary_conditions(zero):
    with pytest.raises(ValueError):
        asymptotic_residuals(eigenvalues(zero, "dirichlet", 5), 0.0)


def test_negative_eigenvalue_is_domain_error():
    table = eigenvalues(Potential.constant(-4.0), "periodic", 5)
    with pytest.raises(ValueError):
        asymptotic_residuals(table, -2.0)


@pytest.mark.parametrize("m", [1, 4, 9])
def test_free_fundamental_asymptotics_exact(zero, m):
    g = Grid(512)
    x = g.nodes
    np.testing.assert_allclose(fundamental_asymptotic(zero, m, "phi1", g), np.cos(m * x), atol=1e-14)
    np.testing.assert_allclose(fundamental_asymptotic(zero, m, "phi2", g), np.sin(m * x) / m, atol=1e-14)


def test_fundamental_asymptotic_argument_checks(zero):
    with pytest.raises(ValueError):
        fundamental_asymptotic(zero, 0, "phi1", Grid(16))
    with pytest.raises(ValueError):
        fundamental_asymptotic(zero, 3, "phi3", Grid(16))


def _gap(V, table, m, which, grid):
    lam = table.values[2 * m]
    Y = Propagator(V, lam).at(grid.nodes)
    exact = Y[:, 0, 0] if which == "phi1" else Y[:, 0, 1]
    return np.max(np.abs(exact - fundamental_asymptotic(V, m, which, grid)))


@pytest.mark.parametrize("which, power", [("phi1", 2), ("phi2", 3)])
def test_fundamental_asymptotic_order(V5m, table5m, grid, which, power):
    gaps = {m: _gap(V5m, table5m, m, which, grid) for m in (10, 20, 40)}
    C = gaps[10] * 10**power
    # the scaled gap settles onto its limit from below (13.7, 14.0, 14.0 for phi1)
    for m in (20, 40):
        assert gaps[m] <= 1.05 * C / m**power
    ratio = 3.0 if which == "phi1" else 6.0
    assert gaps[10] / gaps[20] >= ratio and gaps[20] / gaps[40] >= ratio


def test_fit_free_cosine(zero, grid):
    a, b = eigenfunction(zero, 9.0, "periodic", grid, double=True)
    fit = fit_coefficients((a, b), 3)
    assert fit.norm_defect == pytest.approx((0.0, 0.0), abs=1e-12)
    assert fit.angle_offset == pytest.approx(0.0, abs=1e-12)


def test_fit_recovers_pure_cosine_angle(zero, grid):
    a, b = eigenfunction(zero, 9.0, "periodic", grid, double=True)
    # a is built from phi1 = cos(3x)
    fit = fit_coefficients((a, b), 3)
    assert fit.alpha[0] == pytest.approx(1.0, abs=1e-12)
    assert fit.beta[0] == pytest.approx(0.0, abs=1e-12)
    assert fit.y_m == pytest.approx(0.0, abs=1e-12)


def test_fit_degenerate(zero, grid):
    a, b = eigenfunction(zero, 9.0, "periodic", grid, double=True)
    with pytest.raises(FitDegenerateError):
        fit_coefficients((a, b), 5)


@pytest.mark.parametrize("m", [10, 15, 25, 40])
def test_stepped_coefficient_fits(V5m, table5m, grid, m):
    eigs = eigenfunctions(V5m, table5m, grid, count=2 * m + 1)
    fit = fit_coefficients((eigs[2 * m - 1], eigs[2 * m]), m)
    assert max(fit.norm_defect) <= 5 / m
    assert fit.angle_offset <= 5 / m
    assert all(0 < a * a + b * b < 2 for a, b in zip(fit.alpha, fit.beta))


@pytest.mark.parametrize("lam, expected", [(9.0, 0.0), (6.25, 0.8)])
def test_oscillatory_integral_free(zero, lam, expected):
    one = InitialDatum.constant(1.0)
    assert oscillatory_integral(zero, one, 1.0, lam) == pytest.approx(expected, abs=1e-12)


def test_oscillatory_integral_domain(V5, saw):
    with pytest.raises(PhaseDomainError):
        oscillatory_integral(V5, saw, 2.0, 5.0)


def test_oscillatory_integral_stepped_values(V5, saw):
    # frozen; agree with an atan2 reconstruction of the phase to 1e-15
    assert oscillatory_integral(V5, saw, 2.0, 100.0) == pytest.approx(0.005458899919405, abs=1e-12)
    assert oscillatory_integral(V5, saw, 2.0, 1e4) == pytest.approx(0.004953401219573, abs=1e-12)


def test_oscillatory_integral_envelope_decays(V5, saw):
    def envelope(lam0):
        k0 = math.sqrt(lam0)
        lams = (k0 + np.linspace(0.0, 1.0, 41)) ** 2
        return max(abs(oscillatory_integral(V5, saw, 2.0, lam)) for lam in lams)

    assert envelope(1e4) <= 0.2 * envelope(1e2)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=8, max_size=8), st.integers(1, 20),
       st.floats(0, 2 * math.pi))
def test_basis_switch_identity(c, m, y):
    f = InitialDatum.from_segments([(0.0, 2.0, c[:4]), (2.0, TWO_PI, c[4:])])
    assert projector_identity_gap(f, m, y) <= 1e-10
