import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cone_harmonics import (
    algebra,
    element_rank,
    in_cone,
    inner,
    jordan_product,
    multiplication_operator,
    peirce_components,
    peirce_project,
    quadratic_rep,
    spectral_decomposition,
    trace_det,
)
from cone_harmonics.errors import DomainError, StructuralError

SYM2 = algebra("sym", 2)


def test_unit_and_orthogonal_idempotents():
    y = SYM2.element([[1.0, 2.0], [2.0, -3.0]])
    assert jordan_product(SYM2.identity, y).allclose(y)
    c1, c2 = SYM2.frame
    assert jordan_product(c1, c2).allclose(SYM2.element(np.zeros((2, 2))))


def test_offdiagonal_square_is_identity():
    x = SYM2.element([[0.0, 1.0], [1.0, 0.0]])
    assert jordan_product(x, x).allclose(SYM2.identity)


def test_quadratic_rep_examples():
    y = SYM2.element([[1.0, 0.5], [0.5, 2.0]])
    assert quadratic_rep(SYM2.identity, y).allclose(y)
    c1 = SYM2.frame[0]
    assert quadratic_rep(c1, SYM2.identity).allclose(c1)
    assert quadratic_rep(SYM2.diag([2, 3]), SYM2.identity).allclose(SYM2.diag([4, 9]))


def test_quadratic_rep_matches_jordan_formula(alg, rng):
    x, y = alg.random_element(rng), alg.random_element(rng)
    xx = jordan_product(x, x)
    formula = 2 * jordan_product(x, jordan_product(x, y)) - jordan_product(xx, y)
    assert quadratic_rep(x, y).allclose(formula, atol=1e-10)


def test_spectral_examples():
    sd = spectral_decomposition(SYM2.identity)
    np.testing.assert_allclose(sd.eigenvalues, [1, 1])
    np.testing.assert_allclose(spectral_decomposition(SYM2.diag([3, -1])).eigenvalues, [3, -1])
    np.testing.assert_allclose(spectral_decomposition(SYM2.element([[2, 1], [1, 2]])).eigenvalues, [3, 1])


def test_spectral_round_trip(alg, rng):
    x = alg.random_element(rng)
    sd = spectral_decomposition(x)
    assert np.all(np.diff(sd.eigenvalues) <= 0)
    assert sd.reconstruct(alg).allclose(x, atol=1e-10)
    k = sd.rotation
    np.testing.assert_allclose(k @ k.conj().T, np.eye(alg.rank), atol=1e-12)
    if alg.model == "sym":
        assert np.linalg.det(k) == pytest.approx(1.0)


def test_trace_det_examples():
    assert trace_det(algebra("sym", 4).identity) == pytest.approx((4.0, 1.0))
    assert trace_det(SYM2.element([[2, 1], [1, 2]])) == pytest.approx((4.0, 3.0))
    assert trace_det(algebra("sym", 3).frame[0]) == pytest.approx((1.0, 0.0))


def test_trace_det_match_eigenvalues(alg, rng):
    x = alg.random_element(rng)
    w = spectral_decomposition(x).eigenvalues
    tr, det = trace_det(x)
    assert tr == pytest.approx(np.sum(w), rel=1e-10, abs=1e-12)
    assert det == pytest.approx(np.prod(w), rel=1e-10, abs=1e-12)


def test_peirce_project_examples():
    x = SYM2.element([[1, 2], [2, 5]])
    assert peirce_project(x, 2).allclose(x)
    assert peirce_project(x, 1).allclose(SYM2.diag([1, 0]))
    s3 = algebra("sym", 3)
    assert peirce_project(s3.identity, 2).allclose(s3.idempotent(2))
    with pytest.raises(DomainError):
        peirce_project(x, 3)


def test_peirce_components_are_eigenspaces(alg, rng):
    x = alg.random_element(rng)
    for l in range(alg.rank + 1):
        parts = peirce_components(x, l)
        total = parts[0] + parts[1] + parts[2]
        assert total.allclose(x)
        e_l = alg.idempotent(l) if l else alg.element(np.zeros((alg.rank, alg.rank)))
        for eig, part in zip((1.0, 0.5, 0.0), parts):
            assert jordan_product(e_l, part).allclose(eig * part, atol=1e-12)
        assert peirce_project(peirce_project(x, max(l, 1)), max(l, 1)).allclose(peirce_project(x, max(l, 1)))


def test_in_cone_examples():
    assert in_cone(SYM2.identity)
    assert not in_cone(SYM2.frame[0])
    assert in_cone(SYM2.element([[2, 1], [1, 2]]))
    assert element_rank(SYM2.frame[0]) == 1


def test_structural_errors():
    with pytest.raises(StructuralError):
        SYM2.element([[1, 2], [0, 1]])
    with pytest.raises(StructuralError):
        jordan_product(SYM2.identity, algebra("sym", 3).identity)
    with pytest.raises(StructuralError):
        algebra("quaternion", 2)


def _elements(model, r):
    a = algebra(model, r)
    return st.lists(st.floats(-3, 3), min_size=a.dim, max_size=a.dim).map(
        lambda c: a.from_coordinates(np.array(c))
    )


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([("sym", 3), ("herm", 3)]).flatmap(lambda m: st.tuples(_elements(*m), _elements(*m))))
def test_commutativity(pair):
    x, y = pair
    assert jordan_product(x, y).allclose(jordan_product(y, x), atol=0.0)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([("sym", 3), ("herm", 2)]).flatmap(lambda m: st.tuples(_elements(*m), _elements(*m))))
def test_jordan_identity(pair):
    x, y = pair
    xx = jordan_product(x, x)
    lhs = jordan_product(x, jordan_product(xx, y))
    rhs = jordan_product(xx, jordan_product(x, y))
    scale = np.linalg.norm(x.data) ** 3 * np.linalg.norm(y.data)
    assert np.linalg.norm(lhs.data - rhs.data) <= 1e-9 * max(scale, 1.0)


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from([("sym", 3), ("herm", 2)]).flatmap(
        lambda m: st.tuples(_elements(*m), _elements(*m), _elements(*m))
    )
)
def test_multiplication_self_adjoint(triple):
    x, y, z = triple
    assert inner(jordan_product(x, y), z) == pytest.approx(inner(y, jordan_product(x, z)), abs=1e-10 * 30)
    lx = multiplication_operator(x)
    np.testing.assert_allclose(lx, lx.T, atol=1e-10)


def test_basis_is_orthonormal(alg):
    np.testing.assert_allclose(alg.gram(), np.eye(alg.dim), atol=1e-12)
    assert alg.dim == alg.rank + alg.degree * alg.rank * (alg.rank - 1) // 2
