import math

import mpmath as mp
import numpy as np
import pytest

from cone_harmonics import (
    GroupElement,
    QuadratureSpec,
    RadialFunction,
    adaptive_grid,
    algebra,
    analytic_c0,
    haar_sample,
    intertwine_closed_form,
    intertwine_direct,
    invert,
    lambda_grid,
    plancherel_check,
    plancherel_constant,
    spherical_ft,
    tilde_transform,
)
from cone_harmonics.errors import ConvergenceError, PreconditionError

LOG_GAUSS1 = RadialFunction(1, lambda t: np.exp(-np.log(t[..., 0]) ** 2), "log-gauss")
EXP1 = RadialFunction(1, lambda t: np.exp(-t[..., 0]), "exp")
TEXP1 = RadialFunction(1, lambda t: t[..., 0] * np.exp(-t[..., 0]), "t exp")
LOG_GAUSS2 = RadialFunction(2, lambda t: np.exp(-0.7 * np.sum(np.log(t) ** 2, axis=-1)), "log-gauss")


@pytest.mark.parametrize(
    ("nu", "rel"),
    # Re nu = -0.2 leaves a t^0.2 tail at the origin, truncated near 1e-8
    [(-0.5, 1e-8), (-1.7 + 2j, 1e-8), (-0.2 - 3j, 5e-8)],
)
def test_mellin_of_exponential(nu, rel):
    assert spherical_ft(EXP1, [nu], 1) == pytest.approx(complex(mp.gamma(-nu)), rel=rel)


def test_mellin_of_log_gaussian():
    # int exp(-s^2) e^{-nu s} ds = sqrt(pi) exp(nu^2 / 4)
    nu = np.array([[0.3 + 1.5j], [-2.0j], [1.0]])
    np.testing.assert_allclose(spherical_ft(LOG_GAUSS1, nu, 2), math.sqrt(math.pi) * np.exp(nu[:, 0] ** 2 / 4), rtol=1e-9)


def test_narrow_bump_sees_phi_at_e():
    w = 0.01
    bump = RadialFunction(2, lambda t: np.exp(-np.sum(np.log(t) ** 2, axis=-1) / (2 * w * w)), "bump")
    mass = spherical_ft(bump, [0.0, 0.0], 1)
    val = spherical_ft(bump, [0.4 + 0.3j, -0.2], 1)
    assert abs(val / mass - 1) < 0.02


@pytest.mark.parametrize("f", [LOG_GAUSS1, LOG_GAUSS2], ids=["l1", "l2"])
def test_transform_is_holomorphic(f):
    l = f.l
    z0 = np.array([0.3 + 0.2j, -0.1 + 0.5j][:l])
    h = 1e-4
    e0 = np.eye(l)[0]
    dx = (spherical_ft(f, z0 + h * e0, 1) - spherical_ft(f, z0 - h * e0, 1)) / (2 * h)
    dy = (spherical_ft(f, z0 + 1j * h * e0, 1) - spherical_ft(f, z0 - 1j * h * e0, 1)) / (2 * h)
    assert abs(dx - dy / 1j) < 1e-6 * max(1.0, abs(dx))


def test_tilde_routes_agree():
    lam = np.array([-1.3, 0.4, 2.2])
    a = tilde_transform(TEXP1, lam[:, None], 2, 1, route="shift")
    b = tilde_transform(TEXP1, lam[:, None], 2, 1, route="weighted")
    np.testing.assert_allclose(a, b, rtol=1e-8)
    lam2 = np.array([[0.7, -0.3], [1.9, 0.2]])
    np.testing.assert_allclose(
        tilde_transform(LOG_GAUSS2, lam2, 3, 1), tilde_transform(LOG_GAUSS2, lam2, 3, 1, route="weighted"), rtol=1e-7
    )


def test_tilde_reality_symmetry():
    lam = np.array([0.3, 1.1, 2.5])[:, None]
    plus = tilde_transform(TEXP1, lam, 2, 1)
    minus = tilde_transform(TEXP1, -lam, 2, 1)
    np.testing.assert_allclose(minus, np.conj(plus), rtol=1e-10)


@pytest.mark.parametrize("lam", [0.6, -1.4, 3.0])
def test_tilde_scalar_formula(lam):
    # f(t) = t e^{-t}, r = 2, l = 1, d = 1: f^(i lam - 1/2) = Gamma(3/2 - i lam),
    # gamma_{-(i lam + 1/2)} = Gamma(-i lam) / (sqrt(pi) Gamma(1/2 - i lam))
    z = mp.mpc(0, -lam)
    ref = mp.gamma(1.5 + z) * mp.gamma(z) / (mp.sqrt(mp.pi) * mp.gamma(0.5 + z))
    assert tilde_transform(TEXP1, [lam], 2, 1) == pytest.approx(complex(ref), rel=1e-7)


def test_calibrated_constants():
    assert plancherel_constant(1, 1) == pytest.approx(1 / (2 * math.pi), rel=1e-6)
    assert plancherel_constant(1, 2) == pytest.approx(1 / (2 * math.pi), rel=1e-6)
    assert plancherel_constant(2, 1) == pytest.approx(math.sqrt(2) / (16 * math.pi**3), rel=1e-6)
    assert analytic_c0(2, 2) is None


def test_lambda_grid_avoids_walls():
    grid = lambda_grid(2, 6.0, 12, 16)
    lam = grid.nodes
    assert np.min(np.abs(lam)) > 1e-6
    assert np.min(np.abs(lam[:, 0] - lam[:, 1])) > 1e-6
    assert np.all(lam[:, 0] > lam[:, 1])
    assert grid.weyl_order == 2


def test_inversion_round_trip_rank_one():
    grid, _, _ = adaptive_grid(LOG_GAUSS1, 2, 1)
    tv = tilde_transform(LOG_GAUSS1, grid.nodes, 2, 1)
    for t in (0.3, 1.0, 2.5):
        got = invert(tv, grid, [t], 2, 1).value
        assert abs(got - math.exp(-math.log(t) ** 2)) <= 1e-3 * math.exp(-math.log(t) ** 2)


def test_inversion_at_face_unit_rank_two():
    grid, _, _ = adaptive_grid(LOG_GAUSS2, 3, 1)
    tv = tilde_transform(LOG_GAUSS2, grid.nodes, 3, 1)
    res = invert(tv, grid, algebra("sym", 2).identity, 3, 1)
    assert abs(res.value - 1.0) <= 1e-2


def test_inversion_of_zero():
    grid = lambda_grid(1)
    assert invert(np.zeros(grid.nodes.shape[0]), grid, [1.0], 2, 1).value == 0


def test_closed_form_properties(rng):
    s2 = algebra("sym", 2)
    nu = [0.4 + 1.1j]
    base = intertwine_closed_form(LOG_GAUSS1, GroupElement(s2, np.eye(2)), nu)
    moved = intertwine_closed_form(LOG_GAUSS1, haar_sample(rng, s2), nu)
    assert moved == pytest.approx(base, rel=1e-10)
    lam = 0.8
    at_e = intertwine_closed_form(LOG_GAUSS1, GroupElement(s2, np.eye(2)), [lam])
    assert abs(at_e) == pytest.approx(abs(tilde_transform(LOG_GAUSS1, [lam], 2, 1)), rel=1e-10)


def test_direct_matches_closed_form(rng):
    s2 = algebra("sym", 2)
    g = GroupElement(s2, np.array([[1.2, 0.0], [0.3, 0.9]]))
    nu = [0.3 + 1.4j]
    direct = intertwine_direct(LOG_GAUSS1, g, nu, 1, QuadratureSpec(n_k=1 << 13, seed=0))
    closed = intertwine_closed_form(LOG_GAUSS1, g, nu)
    assert abs(direct.value - closed) <= 0.01 * abs(closed)
    with pytest.raises(PreconditionError):
        intertwine_direct(LOG_GAUSS1, g, [0.3 + 0.1j], 1)


def test_plancherel_identity_rank_one():
    rep = plancherel_check(LOG_GAUSS1, 2, 1)
    assert rep.passed and rep.rel_diff < 1e-6


def test_plancherel_of_zero():
    zero = RadialFunction(1, lambda t: np.zeros(t.shape[:-1]), "zero")
    rep = plancherel_check(zero, 2, 1)
    assert rep.lhs == 0 and rep.rhs == 0 and rep.passed


def test_plancherel_scaling_covariance():
    # pi^l(s e) f = s^(r l d / 2) f(s^2 .) stays K-invariant; both sides still agree
    s = 2.0
    moved = RadialFunction(1, lambda t: s ** (2 * 1 * 1 / 2.0) * LOG_GAUSS1.eigen(s * s * t), "moved")
    a = plancherel_check(LOG_GAUSS1, 2, 1)
    b = plancherel_check(moved, 2, 1)
    assert b.passed
    assert b.lhs == pytest.approx(a.lhs, rel=0.02)


def test_slowly_decaying_transform_refuses_huge_rule():
    f = RadialFunction(2, lambda t: np.exp(-np.sum(t, axis=-1)), "exp-tr")
    grid = lambda_grid(2, 8.0, 16, 16)
    with pytest.raises(ConvergenceError):
        spherical_ft(f, 1j * grid.nodes - 0.75, 1)
