import itertools
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cone_harmonics import (
    RhoVectors,
    gamma_quotient,
    gindikin_gamma,
    harish_chandra_c,
    inverse_c_squared,
    log_gamma,
    log_gindikin_gamma,
    plancherel_density,
)
from cone_harmonics.errors import PoleError


def test_log_gamma_examples():
    assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-15)
    assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-14)
    lam = 1.0
    assert np.exp(2 * np.real(log_gamma(1j * lam))) == pytest.approx(
        math.pi / (lam * math.sinh(math.pi * lam)), rel=1e-10
    )
    with pytest.raises(PoleError) as info:
        log_gamma(-2.0)
    assert info.value.location == -2


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 30), st.floats(-30, 30))
def test_log_gamma_against_mpmath(x, y):
    z = complex(x, y)
    ref = complex(mp.loggamma(mp.mpc(x, y)))
    assert abs(log_gamma(z) - ref) <= 1e-12 * max(1.0, abs(ref))


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 20), st.floats(-10, 10))
def test_rank_one_gindikin_is_gamma(x, y):
    z = complex(x, y)
    assert gindikin_gamma([z], 1) == pytest.approx(complex(mp.gamma(z)), rel=1e-12)
    assert gindikin_gamma([z], 2) == pytest.approx(complex(mp.gamma(z)), rel=1e-12)


def test_gindikin_examples():
    assert gindikin_gamma([1.0], 1) == pytest.approx(1.0)
    assert gindikin_gamma([1.0, 1.0], 1) == pytest.approx(math.pi * math.sqrt(2), rel=1e-14)


@pytest.mark.parametrize("d,l", [(1, 2), (1, 3), (2, 2), (2, 3)])
def test_gindikin_shift_property(d, l):
    nu = np.array([3.1 + 0.4j, 2.6, 2.9 - 1j][:l])
    ratio = gindikin_gamma(nu + 1, d) / gindikin_gamma(nu, d)
    expected = np.prod(nu - np.arange(l) * d / 2.0)
    assert ratio == pytest.approx(expected, rel=1e-12)


def test_gindikin_pole_reports_factor():
    with pytest.raises(PoleError) as info:
        gindikin_gamma([2.0, 0.5], 1)
    assert info.value.factor == 2
    assert info.value.location == 0


def test_gamma_quotient_examples():
    assert gamma_quotient([0.0], 2, 1, 1) == pytest.approx(1.0)
    assert gamma_quotient([0.0, 0.0], 3, 2, 2) == pytest.approx(1.0)
    assert gamma_quotient([0.5], 2, 1, 1) == pytest.approx(2 / math.pi, rel=1e-14)
    nu = [1.3 + 0.2j, 0.4, -0.1 + 2j]
    assert gamma_quotient(nu, 3, 3, 1) == pytest.approx(1.0)


def test_gamma_quotient_batch():
    nus = np.array([[0.5], [1.0 + 1j]])
    out = gamma_quotient(nus, 2, 1, 1)
    assert out.shape == (2,)
    assert out[0] == pytest.approx(2 / math.pi)


def test_c_function_normalisation_and_rank_one():
    assert harish_chandra_c([0.7], 1, 1) == 1
    for d in (1, 2):
        rho = RhoVectors(2, d, 2).rho_sup_l
        assert harish_chandra_c(-1j * rho, 2, d) == pytest.approx(1.0, rel=1e-12)


def test_c_function_against_mpmath():
    # |c(lam)|^2 at lam = (1, 0) for d = 1
    z = mp.mpc(0, -1)
    c = mp.gamma(z) / mp.gamma(z + 0.5) * mp.gamma(1) / mp.gamma(0.5)
    assert abs(harish_chandra_c([1.0, 0.0], 2, 1)) ** 2 == pytest.approx(float(abs(c) ** 2), rel=1e-12)
    # |Gamma(1/2 + i)|^2 = pi / cosh(pi) and |Gamma(i)|^2 = pi / sinh(pi) give pi tanh(pi)
    assert 1 / abs(harish_chandra_c([1.0, 0.0], 2, 1)) ** 2 == pytest.approx(math.pi * math.tanh(math.pi), rel=1e-12)


@pytest.mark.parametrize("d,l", [(1, 2), (2, 2), (1, 3)])
def test_inverse_c_squared_matches_and_is_weyl_invariant(d, l, rng):
    lam = rng.normal(size=(40, l))
    inv = inverse_c_squared(lam, l, d)
    np.testing.assert_allclose(inv, 1 / np.abs(harish_chandra_c(lam, l, d)) ** 2, rtol=1e-12)
    for perm in itertools.permutations(range(l)):
        np.testing.assert_allclose(inverse_c_squared(lam[:, perm], l, d), inv, rtol=1e-12)


def test_density_rank_two_closed_form():
    lam = np.linspace(-6, 6, 241)[:, None]
    c0 = 1 / (2 * math.pi)
    dens = plancherel_density(lam, 2, 1, 1, c0=c0)
    expected = c0 * math.pi * lam[:, 0] * np.tanh(math.pi * lam[:, 0])
    np.testing.assert_allclose(dens, expected, rtol=1e-12, atol=1e-15)


def test_density_nonnegative_and_symmetric():
    grid = np.linspace(-10, 10, 100)
    pairs = np.stack(np.meshgrid(grid, grid), -1).reshape(-1, 2)
    dens = plancherel_density(pairs, 3, 2, 1, c0=1.0)
    assert dens.shape == (10**4,)
    assert np.all(dens >= 0)
    np.testing.assert_allclose(plancherel_density(pairs[:, ::-1], 3, 2, 1, c0=1.0), dens, rtol=1e-12)


@pytest.mark.parametrize("r", range(1, 7))
@pytest.mark.parametrize("d", [1, 2, 4, 8])
def test_rho_shift_identity(r, d):
    for l in range(1, r + 1):
        rv = RhoVectors(r, d, l)
        assert np.all(rv.shift_identity_residual() == 0)
        assert np.sum(rv.rho_l_prime).real == pytest.approx(r * l * d / 4.0)


def test_eta_vanishes_for_rank_two_face():
    np.testing.assert_array_equal(RhoVectors(2, 1, 1).eta_l, [0, 0])


def test_log_gindikin_batch_shape():
    nus = np.ones((4, 3, 2)) * 3.0
    assert log_gindikin_gamma(nus, 1).shape == (4, 3)
