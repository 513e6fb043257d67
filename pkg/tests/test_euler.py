import numpy as np
import pytest

from wedgekit.exceptions import UnsupportedError
from wedgekit.services.euler_service import euler_service
from wedgekit.services.liealg_service import liealg_service


def _diag_element(algebra, entries):
    return liealg_service.coordinates(algebra, np.diag(entries))


def test_sl2_euler_element(sl2):
    """H/2 grades sl2 as 1 + 1 + 1"""
    grading = euler_service.is_euler(sl2.element([0.0, 0.0, 0.5]))
    assert grading is not None
    assert grading.dims == (1, 1, 1)
    assert grading.spectrum_residual < 1e-10


def test_non_euler_elements(sl2):
    """H has eigenvalues 2 and the nilpotent E is not diagonalizable"""
    assert euler_service.is_euler(sl2.basis_element(2)) is None
    diagnosis = euler_service.diagnose(sl2.basis_element(0))
    assert diagnosis.grading is None
    assert euler_service.diagnose(sl2.zero()).reason == "central"


def test_involution_is_automorphism(sl3):
    """tau squares to one and agrees with exp(i pi ad h)"""
    grading = euler_service.is_euler(_diag_element(sl3, [2 / 3, -1 / 3, -1 / 3]))
    tau = euler_service.euler_involution(grading).matrix
    np.testing.assert_allclose(tau @ tau, np.eye(sl3.dim), atol=1e-10)
    np.testing.assert_allclose(euler_service.involution_from_exponential(grading), tau, atol=1e-8)
    assert euler_service.grading_law_residual(grading) < 1e-10


def test_grading_dims_sl3(sl3):
    """First node of sl3 gives dims (2, 4, 2)"""
    grading = euler_service.is_euler(_diag_element(sl3, [2 / 3, -1 / 3, -1 / 3]))
    assert grading.dims == (2, 4, 2)


def test_sl3_node_is_not_symmetric(sl3):
    """-h has a different matrix spectrum, refuted without search"""
    grading = euler_service.is_euler(_diag_element(sl3, [2 / 3, -1 / 3, -1 / 3]))
    result = euler_service.is_symmetric(grading)
    assert result.symmetric is False
    assert result.source == "spectrum"


def test_sl2_symmetric_certificate(sl2):
    """The sl2 Euler element carries a conjugator to -h"""
    grading = euler_service.is_euler(sl2.element([0.0, 0.0, 0.5]))
    result = euler_service.is_symmetric(grading, seed=7)
    assert result.symmetric is True
    assert result.source == "certificate"
    assert result.witness_residual < 1e-6
    moved = liealg_service.adjoint_action(result.conjugator, grading.h)
    np.testing.assert_allclose(moved.coords, -grading.h.coords, atol=1e-6)


def test_sl4_middle_node_symmetric(sl4):
    """Middle node of sl4 is symmetric, the outer nodes are not"""
    middle = euler_service.is_euler(_diag_element(sl4, [0.5, 0.5, -0.5, -0.5]))
    outer = euler_service.is_euler(_diag_element(sl4, [0.75, -0.25, -0.25, -0.25]))
    assert middle.dims == (4, 7, 4)
    assert euler_service.is_symmetric(middle).symmetric is True
    assert euler_service.is_symmetric(outer).symmetric is False


def test_lorentz_boost_orbit(lorentz):
    """so(1,3) has a single boost orbit with g_1 of dimension 2"""
    orbits = euler_service.classify_euler_orbits(lorentz)
    assert len(orbits) == 1
    assert orbits[0][1].dims == (2, 2, 2)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sl_orbit_count(n):
    """sl_n has n - 1 Euler orbits"""
    algebra = liealg_service.make_algebra("sl", n=n)
    assert len(euler_service.classify_euler_orbits(algebra)) == n - 1


def test_classification_refuses_unsupported():
    """Orbit enumeration is not offered for so(2,2) or nonsimple input"""
    with pytest.raises(UnsupportedError):
        euler_service.classify_euler_orbits(liealg_service.make_algebra("so", p=2, q=2))
    with pytest.raises(UnsupportedError):
        euler_service.classify_euler_orbits(liealg_service.make_algebra("aff"))


def test_tube_type(sl2, sl3):
    """sl2 is hermitian of tube type, sl3 is not hermitian"""
    assert euler_service.is_tube_type_hermitian(sl2) is True
    assert euler_service.is_tube_type_hermitian(sl3) is False


def test_orthogonal_pair_in_lorentz(lorentz):
    """Boosts along x and y anticommute with each other's involution"""
    gx = euler_service.is_euler(lorentz.basis_element(0))
    gy = euler_service.is_euler(lorentz.basis_element(1))
    assert euler_service.is_orthogonal_pair(gx, gy)
    assert not euler_service.is_orthogonal_pair(gx, gx)


def test_orthogonal_pair_in_sl2(sl2):
    """diag(1,-1)/2 and the symmetric off-diagonal element are orthogonal both ways"""
    ga = euler_service.is_euler(sl2.element([0.0, 0.0, 0.5]))
    gb = euler_service.is_euler(sl2.element([0.5, 0.5, 0.0]))
    assert gb is not None
    assert euler_service.is_orthogonal_pair(ga, gb)
    assert euler_service.is_orthogonal_pair(gb, ga)
    assert not euler_service.is_orthogonal_pair(ga, ga)


def test_symmetry_survives_conjugation(sl4, rng):
    """Conjugating an Euler element does not change whether it is symmetric"""
    g = liealg_service.exp_element(sl4.element(0.3 * rng.normal(size=sl4.dim)))
    middle = liealg_service.adjoint_action(g, _diag_element(sl4, [0.5, 0.5, -0.5, -0.5]))
    outer = liealg_service.adjoint_action(g, _diag_element(sl4, [0.75, -0.25, -0.25, -0.25]))
    assert euler_service.is_symmetric(euler_service.is_euler(middle), seed=11).symmetric is True
    assert euler_service.is_symmetric(euler_service.is_euler(outer), seed=11).symmetric is False
