import numpy as np
import pytest
from scipy.linalg import expm

from wedgekit.exceptions import ConditioningError, DomainError
from wedgekit.models import GroupElement, ModularRepData
from wedgekit.services.bgl_service import bgl_service
from wedgekit.services.stdsub_service import stdsub_service


@pytest.fixture(name="rep")
def rep_fixture():
    """Swap-and-conjugate representation data on C^2"""
    pair = stdsub_service.swap_pair(0.3)
    return ModularRepData(generator=pair.log_delta, conjugation=pair.J)


@pytest.fixture(name="net")
def net_fixture(rep, sl2_couple):
    """Base wedge, its translate by exp(e) and their duals"""
    translation = GroupElement(np.array([[1.0, 1.0], [0.0, 1.0]]))
    flow = expm(-0.5j * rep.generator)
    return bgl_service.build_bgl_net(rep, sl2_couple, [(translation, flow)])


def test_bgl_subspace_is_standard(rep):
    """H from (A, J) is standard with the same modular data"""
    subspace = bgl_service.bgl_subspace(rep)
    assert stdsub_service.is_standard(subspace)
    _, pair = stdsub_service.tomita_from_subspace(subspace)
    assert stdsub_service.pair_distance(pair, bgl_service.bgl_pair(rep)) < 1e-8


def test_incompatible_conjugation_is_rejected(rep):
    """J must reverse the one-parameter group"""
    bad = ModularRepData(generator=np.diag([0.3, 0.3]).astype(complex), conjugation=rep.conjugation)
    with pytest.raises(DomainError):
        bgl_service.bgl_pair(bad)


def test_large_generator_is_ill_conditioned(rep):
    """||A|| above the envelope refuses to build Delta"""
    big = ModularRepData(generator=10.0 * rep.generator, conjugation=rep.conjugation)
    with pytest.raises(ConditioningError):
        bgl_service.bgl_pair(big)


def test_net_has_dual_entries(net):
    """Every entry is followed by its dual"""
    assert len(net.entries) == 4
    assert [e.dual_of for e in net.entries] == [None, 0, None, 2]


def test_consistent_net_passes_axioms(net, sl2_cone):
    """A net built from one representation satisfies every checked axiom"""
    report = bgl_service.check_net_axioms(net, sl2_cone)
    for name, result in report.axioms.items():
        assert result.passed, f"{name}: {result.residual}"
    assert report.axioms["HK1"].detail != "vacuous"


def test_wrong_subspace_breaks_covariance(net, sl2_cone, rng):
    """Swapping in an unrelated subspace is caught"""
    foreign = stdsub_service.subspace_from_pair(stdsub_service.random_admissible_pair(2, rng))
    broken = bgl_service.replace_subspace(net, 2, foreign)
    report = bgl_service.check_net_axioms(broken, sl2_cone)
    assert not report.axioms["HK2"].passed
    assert not report.axioms["HK5"].passed


def test_negative_spectral_generator_fails(net, sl2_cone):
    """A cone generator with negative spectrum violates the spectral condition"""
    net.spectral_generators.append(np.diag([1.0, -0.5]))
    report = bgl_service.check_net_axioms(net, sl2_cone)
    assert not report.axioms["HK3"].passed
    assert report.axioms["HK3"].residual == pytest.approx(0.5)


def test_one_parameter_group_is_modular_group(rep):
    """exp(-itA) equals Delta^{-it/2pi}"""
    pair = bgl_service.bgl_pair(rep)
    lhs = bgl_service.one_parameter_group(rep.generator, 0.7)
    rhs = stdsub_service.modular_group(pair, -0.7 / (2.0 * np.pi))
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_non_unitary_transport_is_rejected(rep, sl2_couple):
    """Transport operators must be unitary"""
    with pytest.raises(DomainError):
        bgl_service.build_bgl_net(rep, sl2_couple, [(GroupElement.identity(2), 2.0 * np.eye(2))])
