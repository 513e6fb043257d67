import numpy as np
import pytest
from scipy.linalg import expm

from wedgekit.exceptions import ClosureError, DomainError, NumericError, UnsupportedError
from wedgekit.services.liealg_service import liealg_service


def test_sl2_structure_constants(sl2):
    """[E, F] = H and [H, E] = 2E in the built-in basis"""
    e, f, h = (sl2.basis_element(i) for i in range(3))
    np.testing.assert_allclose(liealg_service.bracket(e, f).coords, h.coords, atol=1e-12)
    np.testing.assert_allclose(liealg_service.bracket(h, e).coords, 2 * e.coords, atol=1e-12)
    np.testing.assert_allclose(liealg_service.bracket(h, f).coords, -2 * f.coords, atol=1e-12)


@pytest.mark.parametrize("family,params,dim", [
    ("sl", {"n": 3}, 8),
    ("so", {"p": 1, "q": 3}, 6),
    ("sp", {"n": 2}, 10),
    ("iso", {"d": 3}, 10),
    ("gl", {"n": 2}, 4),
    ("aff", {}, 2),
])
def test_family_dimensions(family, params, dim):
    """Built-in families have the expected dimension"""
    assert liealg_service.make_algebra(family, **params).dim == dim


def test_bracket_matches_matrix_commutator(sl3, rng):
    """Structure constants reproduce matrix commutators"""
    x = sl3.element(rng.normal(size=sl3.dim))
    y = sl3.element(rng.normal(size=sl3.dim))
    expected = x.matrix @ y.matrix - y.matrix @ x.matrix
    np.testing.assert_allclose(liealg_service.bracket(x, y).matrix, expected, atol=1e-10)


def test_bracket_is_antisymmetric(lorentz, rng):
    """[x, y] = -[y, x]"""
    x = lorentz.element(rng.normal(size=lorentz.dim))
    y = lorentz.element(rng.normal(size=lorentz.dim))
    total = liealg_service.bracket(x, y) + liealg_service.bracket(y, x)
    assert total.norm() < 1e-12


def test_killing_form_of_sl2(sl2):
    """Killing form of sl2 is 4 tr(xy)"""
    h = sl2.basis_element(2)
    assert liealg_service.killing_form(h, h) == pytest.approx(8.0)


def test_semisimplicity(sl3, poincare, aff):
    """Only the simple algebra has a nondegenerate Killing form"""
    assert liealg_service.is_semisimple(sl3)
    assert not liealg_service.is_semisimple(poincare)
    assert not liealg_service.is_semisimple(aff)


def test_non_closed_basis_is_rejected():
    """A basis that is not bracket closed raises"""
    e = np.array([[0.0, 1.0], [0.0, 0.0]])
    f = np.array([[0.0, 0.0], [1.0, 0.0]])
    with pytest.raises(ClosureError):
        liealg_service.from_basis("broken", [e, f])


def test_dependent_basis_is_rejected():
    """Linearly dependent matrices are not a basis"""
    e = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(DomainError):
        liealg_service.from_basis("twice", [e, 2 * e])


def test_unsupported_family_and_rank():
    """Unknown families and out-of-range ranks are refused"""
    with pytest.raises(UnsupportedError):
        liealg_service.make_algebra("e8")
    with pytest.raises(UnsupportedError):
        liealg_service.make_algebra("sl", n=9)


def test_adjoint_action_is_conjugation(sl3, rng):
    """Ad(exp x) y agrees with g y g^-1"""
    x = sl3.element(0.3 * rng.normal(size=sl3.dim))
    y = sl3.element(rng.normal(size=sl3.dim))
    g = liealg_service.exp_element(x)
    expected = g.matrix @ y.matrix @ np.linalg.inv(g.matrix)
    np.testing.assert_allclose(liealg_service.adjoint_action(g, y).matrix, expected, atol=1e-9)


def test_exp_overflow_is_reported(sl2):
    """Huge exponents raise instead of returning inf"""
    with pytest.raises(NumericError):
        liealg_service.exp_element(sl2.basis_element(2), 1e4)


def test_direct_sum_summands(sl2, aff):
    """The direct sum splits into two commuting ideals"""
    total = liealg_service.direct_sum(sl2, aff)
    left, right = liealg_service.summands(total)
    assert (len(left), len(right)) == (3, 2)
    assert liealg_service.is_ideal(left)
    assert liealg_service.is_ideal(right)
    assert liealg_service.bracket(left[0], right[1]).norm() < 1e-12


def test_subalgebra_checks(sl2):
    """Borel is a subalgebra but not an ideal"""
    borel = [sl2.basis_element(0), sl2.basis_element(2)]
    assert liealg_service.is_subalgebra(borel)
    assert not liealg_service.is_ideal(borel)
    assert not liealg_service.is_subalgebra([sl2.basis_element(0), sl2.basis_element(1)])


@pytest.mark.parametrize("t", [-1.3, 0.4, 2.0])
def test_adjoint_of_exponential_is_exponential_of_ad(sl3, rng, t):
    """Ad(exp tx) = exp(t ad x) on coordinate space"""
    for _ in range(10):
        x = sl3.element(0.5 * rng.normal(size=sl3.dim))
        g = liealg_service.exp_element(x, t)
        expected = expm(t * liealg_service.ad_matrix(x))
        np.testing.assert_allclose(liealg_service.adjoint_matrix(g, sl3), expected, atol=1e-8 * np.abs(expected).max())


@pytest.mark.parametrize("family,params", [("sl", {"n": 3}), ("so", {"p": 1, "q": 3}), ("sp", {"n": 2})])
def test_killing_form_is_ad_invariant(family, params, rng):
    """K(Ad g x, Ad g y) = K(x, y)"""
    algebra = liealg_service.make_algebra(family, **params)
    for _ in range(10):
        g = liealg_service.exp_element(algebra.element(0.4 * rng.normal(size=algebra.dim)))
        x = algebra.element(rng.normal(size=algebra.dim))
        y = algebra.element(rng.normal(size=algebra.dim))
        moved = liealg_service.killing_form(liealg_service.adjoint_action(g, x), liealg_service.adjoint_action(g, y))
        original = liealg_service.killing_form(x, y)
        assert moved == pytest.approx(original, rel=1e-8, abs=1e-8 * (1.0 + x.norm() * y.norm()))
