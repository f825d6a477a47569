import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cone_harmonics import (
    GroupElement,
    act,
    adjoint,
    algebra,
    group_character,
    haar_batch,
    haar_from_uniform,
    haar_sample,
    identity_element,
    inner,
    inverse_adjoint,
    iwasawa_character,
    power_function,
    principal_minor,
    principal_minors,
    random_group_element,
    random_triangular,
    trace_det,
)
from cone_harmonics.errors import DomainError

SYM2 = algebra("sym", 2)
X = SYM2.element([[2.0, 1.0], [1.0, 2.0]])


def test_principal_minor_examples():
    assert principal_minor(SYM2.identity, 1) == 1.0
    assert principal_minor(SYM2.identity, 2) == 1.0
    assert principal_minor(X, 1) == pytest.approx(2.0)
    assert principal_minor(X, 2) == pytest.approx(3.0)
    assert principal_minor(SYM2.frame[0], 2) == 0.0
    with pytest.raises(DomainError):
        principal_minor(X, 3)


def test_power_function_examples(alg, rng):
    assert power_function(alg.identity, rng.normal(size=alg.rank)) == pytest.approx(1.0)
    assert power_function(X, [2, 1]) == pytest.approx(6.0)
    x = alg.random_cone_point(rng)
    det = trace_det(x)[1]
    assert power_function(x, [3] * alg.rank) == pytest.approx(det**3, rel=1e-10)


def test_power_function_reports_offending_minor():
    x = SYM2.element([[-1.0, 0.0], [0.0, 2.0]])
    with pytest.raises(DomainError) as info:
        power_function(x, [1.0, 0.5])
    assert info.value.index == 1


def test_boundary_extension_and_continuity():
    s3 = algebra("sym", 3)
    x0 = s3.element(np.pad([[2.0, 0.5], [0.5, 1.0]], ((0, 1), (0, 1))))
    nu = [1.2 + 0.3j, 0.4, 0.0]
    base = power_function(x0, nu)
    eps = 1e-6
    near = power_function(s3.element(x0.data + eps * np.eye(3)), nu)
    assert abs(near / base - 1) <= 1e-4
    with pytest.raises(DomainError):
        power_function(x0, [1.0, 0.5, 0.2])


def test_act_examples(rng):
    g = GroupElement(SYM2, np.diag([2.0, 1.0]))
    assert act(identity_element(SYM2), X).allclose(X)
    assert act(g, SYM2.identity).allclose(SYM2.diag([4.0, 1.0]))
    assert group_character(g) == pytest.approx(4.0)
    assert group_character(identity_element(SYM2)) == pytest.approx(1.0)
    assert group_character(haar_sample(rng, SYM2)) == pytest.approx(1.0)


def test_adjoint_and_theta(alg, rng):
    g = random_group_element(rng, alg)
    x, y = alg.random_element(rng), alg.random_element(rng)
    assert inner(act(g, x), y) == pytest.approx(inner(x, act(adjoint(g), y)), abs=1e-10)
    ge = act(g, alg.identity)
    theta_e = act(inverse_adjoint(g), alg.identity)
    np.testing.assert_allclose(theta_e.data, np.linalg.inv(ge.data), atol=1e-10)


def test_character_is_multiplicative(alg, rng):
    for _ in range(20):
        g, h = random_group_element(rng, alg), random_group_element(rng, alg)
        prod = group_character(g) * group_character(h)
        assert abs(group_character(g @ h) - prod) <= 1e-9 * prod


def test_iwasawa_character_examples(rng):
    assert iwasawa_character(identity_element(SYM2), [1.3, 0.2]) == pytest.approx(1.0)
    assert iwasawa_character(haar_sample(rng, SYM2), [1.3, 0.2]) == pytest.approx(1.0)
    t = 1.7
    g = GroupElement(SYM2, np.diag([t, 1.0]))
    assert iwasawa_character(g, [1.0, 0.0]) == pytest.approx(t**2)


def test_iwasawa_character_on_na(rng):
    s3 = algebra("sym", 3)
    g = random_triangular(rng, s3, 0.5)
    nu = np.array([0.7, -0.2 + 1j, 1.1])
    diag = np.abs(np.diag(g.matrix))
    assert iwasawa_character(g, nu) == pytest.approx(np.prod(diag ** (2 * nu)), rel=1e-10)


def test_haar_properties(alg, rng):
    ks = haar_batch(rng, alg, 50)
    eye = np.eye(alg.rank)
    np.testing.assert_allclose(ks @ np.conj(np.swapaxes(ks, -1, -2)), np.broadcast_to(eye, ks.shape), atol=1e-12)
    if alg.model == "sym":
        np.testing.assert_allclose(np.linalg.det(ks), 1.0)
    k = haar_sample(rng, alg)
    assert act(k, alg.identity).allclose(alg.identity, atol=1e-12)


def test_haar_mean_of_rank_one_projector():
    rng = np.random.default_rng(1)
    ks = haar_batch(rng, SYM2, 10**6)
    mean = np.mean(ks[:, :, :1] * ks[:, None, :, 0], axis=0)
    np.testing.assert_allclose(mean, 0.5 * np.eye(2), atol=3e-3)


def test_haar_from_uniform_second_moment():
    from scipy.stats import qmc

    herm = algebra("herm", 3)
    u = qmc.Sobol(18, scramble=True, seed=3).random(1 << 14)
    ks = haar_from_uniform(u, herm)
    mean = np.mean(np.abs(ks[:, 0, :]) ** 2, axis=0)
    np.testing.assert_allclose(mean, np.full(3, 1 / 3), atol=2e-3)


def test_random_triangular_shape(rng):
    s3 = algebra("sym", 3)
    g = random_triangular(rng, s3, 0.4)
    assert np.allclose(np.triu(g.matrix, 1), 0)
    assert np.all(np.diag(g.matrix) > 0)
    tiny = random_triangular(rng, s3, 1e-12)
    np.testing.assert_allclose(tiny.matrix, np.eye(3), atol=1e-10)


@settings(max_examples=300, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    model=st.sampled_from(["sym", "herm"]),
    r=st.integers(2, 4),
)
def test_na_homogeneity(seed, model, r):
    rng = np.random.default_rng(seed)
    a = algebra(model, r)
    g = random_triangular(rng, a, 0.6)
    x = a.random_cone_point(rng, 0.6)
    nu = rng.uniform(-3, 3, r) + 1j * rng.uniform(-3, 3, r)
    rhs = power_function(act(g, a.identity), nu) * power_function(x, nu)
    assert abs(power_function(act(g, x), nu) - rhs) <= 1e-8 * abs(rhs)


def test_k_invariance_of_trace_and_det(alg, rng):
    x = alg.random_cone_point(rng)
    k = haar_sample(rng, alg)
    t0, d0 = trace_det(x)
    t1, d1 = trace_det(act(k, x))
    assert t1 == pytest.approx(t0, rel=1e-10)
    assert d1 == pytest.approx(d0, rel=1e-10)


def test_principal_minors_batch(rng):
    s3 = algebra("sym", 3)
    xs = np.stack([s3.random_cone_point(rng).data for _ in range(5)])
    m = principal_minors(xs)
    for x, row in zip(xs, m):
        np.testing.assert_allclose(row, [x[0, 0], np.linalg.det(x[:2, :2]), np.linalg.det(x)])
