import numpy as np
import pytest

from wedgekit.exceptions import DomainError, UnsupportedError
from wedgekit.models import AntiLinearOp, CovarianceVerdict, GroupElement, ModularRepData, RegularityQuery
from wedgekit.schemas import GaussianSum
from wedgekit.services.cone_service import cone_service
from wedgekit.services.euler_service import euler_service
from wedgekit.services.liealg_service import liealg_service
from wedgekit.services.modular_service import modular_service
from wedgekit.services.stdsub_service import stdsub_service


def _lorentz_and_translations(algebra):
    d = algebra.params["d"]
    k = d * (d + 1) // 2
    lorentz = [algebra.basis_element(i) for i in range(k)]
    translations = [algebra.basis_element(k + mu) for mu in range(d + 1)]
    return lorentz, translations


@pytest.fixture(name="boost_grading")
def boost_grading_fixture(poincare):
    """Grading of iso(1,3) by the x-boost"""
    return euler_service.is_euler(poincare.basis_element(0))


def test_sl3_counterexample_violates_covariance():
    """The sl3 puzzle has commuting Euler elements and a nonzero witness"""
    puzzle = modular_service.build_ds2_counterexample()
    assert puzzle.commutation_residual < 1e-10
    report = modular_service.modular_covariance_test(puzzle)
    assert report.verdict == CovarianceVerdict.VIOLATED
    assert report.witness_norm == pytest.approx(2.0, rel=1e-6)
    assert report.assumptions


@pytest.mark.parametrize("n", [4, 5])
def test_counterexample_on_larger_sl(n):
    """The same construction works along sl_n"""
    puzzle = modular_service.build_covariance_counterexample(n)
    assert modular_service.modular_covariance_test(puzzle).verdict == CovarianceVerdict.VIOLATED


@pytest.mark.parametrize("n", [2, 7])
def test_counterexample_outside_range(n):
    """sl2 has no counterexample and large n is not built"""
    with pytest.raises(UnsupportedError):
        modular_service.build_covariance_counterexample(n)


def test_equal_euler_elements_are_compatible(sl2):
    """h1 = h2 passes the covariance criterion"""
    h = sl2.element([0.0, 0.0, 0.5])
    subalgebra = [sl2.basis_element(i) for i in range(3)]
    report = modular_service.modular_covariance_test(modular_service.make_puzzle(subalgebra, h, h))
    assert report.verdict == CovarianceVerdict.COMPATIBLE
    assert report.witness is None


def test_puzzle_validation(sl2):
    """Non-commuting or misplaced Euler elements are rejected"""
    h = sl2.element([0.0, 0.0, 0.5])
    other = sl2.element([0.5, 0.5, 0.0])
    borel = [sl2.basis_element(0), sl2.basis_element(2)]
    with pytest.raises(DomainError):
        modular_service.make_puzzle(borel, h, other)
    with pytest.raises(DomainError):
        modular_service.make_puzzle(borel, other, h)
    with pytest.raises(DomainError):
        modular_service.make_puzzle([sl2.basis_element(0), sl2.basis_element(1)], h, h)


def test_sl2_standard_cone_is_regular(sl2, sl2_cone):
    """The standard cone meets both eigenspaces in generating subcones"""
    grading = euler_service.is_euler(sl2.element([0.0, 0.0, 0.5]))
    report = modular_service.regularity_cone_check(RegularityQuery(cone=sl2_cone, grading=grading))
    assert report.verdict is True
    assert [side.span_dim for side in report.sides] == [1, 1]


def test_forward_cone_on_whole_poincare_algebra(poincare, boost_grading):
    """Only a lightray of the three-dimensional eigenspace lies in the cone"""
    cone = cone_service.make_cone("poincare-forward", poincare)
    report = modular_service.regularity_cone_check(RegularityQuery(cone=cone, grading=boost_grading))
    assert report.verdict is False
    assert all(side.eigenspace_dim == 3 for side in report.sides)
    assert all(side.span_dim == 1 for side in report.sides)


def test_semidirect_forward_cone(poincare, boost_grading):
    """Inside the translation ideal both lightrays are generated"""
    lorentz, translations = _lorentz_and_translations(poincare)
    cone = cone_service.make_cone("poincare-forward", poincare)
    query = RegularityQuery(cone=cone, grading=boost_grading, ideal=translations, complement=lorentz)
    report = modular_service.semidirect_regularity_check(query)
    assert report.condition_a is True
    assert report.condition_b is None
    assert report.verdict is None

    attested = RegularityQuery(
        cone=cone, grading=boost_grading, ideal=translations, complement=lorentz,
        attestation=True, attestation_note="free field restriction",
    )
    assert modular_service.semidirect_regularity_check(attested).verdict is True


def test_semidirect_spacelike_cone(poincare, boost_grading):
    """A cone inside the boost-fixed translations misses both eigenspaces"""
    lorentz, translations = _lorentz_and_translations(poincare)
    cone = cone_service.make_cone("poincare-spacelike", poincare)
    query = RegularityQuery(cone=cone, grading=boost_grading, ideal=translations, complement=lorentz)
    report = modular_service.semidirect_regularity_check(query)
    assert report.condition_a is False
    assert report.verdict is False


def test_semidirect_split_validation(poincare, boost_grading):
    """The ideal must be an ideal and the parts must span"""
    lorentz, translations = _lorentz_and_translations(poincare)
    cone = cone_service.make_cone("poincare-forward", poincare)
    with pytest.raises(DomainError):
        modular_service.semidirect_regularity_check(
            RegularityQuery(cone=cone, grading=boost_grading, ideal=lorentz, complement=translations)
        )
    with pytest.raises(DomainError):
        modular_service.semidirect_regularity_check(
            RegularityQuery(cone=cone, grading=boost_grading, ideal=translations, complement=lorentz[:3])
        )


def test_affine_audit(aff):
    """Dilation data satisfies both theorem identities"""
    pair = stdsub_service.swap_pair(0.3)
    rep = ModularRepData(generator=pair.log_delta, conjugation=pair.J)
    samples = modular_service.affine_audit_samples(aff, rep, count=6, seed=5)
    report = modular_service.euler_theorem_audit(rep, aff.basis_element(0), samples)
    assert report.h_euler
    assert report.samples == 6
    assert report.modular_group_residual < 1e-8
    assert report.max_reflection_residual < 1e-10


def test_rapidity_audit(model):
    """The free field boost satisfies both theorem identities"""
    report = modular_service.rapidity_theorem_audit(model, [GaussianSum.gaussian((0.0, 5.0), 0.4)])
    assert report.h_euler
    assert report.modular_group_residual < 1e-12
    assert report.max_reflection_residual < 1e-8


def test_anti_elliptic(sl2, lorentz):
    """Euler elements of simple algebras are anti-elliptic"""
    assert modular_service.anti_elliptic(sl2.element([0.0, 0.0, 0.5]))
    assert modular_service.anti_elliptic(lorentz.basis_element(0))


def test_anti_elliptic_with_center(sl2):
    """A central summand needs a component of h"""
    total = liealg_service.direct_sum(sl2, liealg_service.make_algebra("abelian", n=1))
    pure = total.element([0.0, 0.0, 0.5, 0.0])
    shifted = total.element([0.0, 0.0, 0.5, 1.0])
    report = modular_service.anti_elliptic_report(pure)
    assert report.ideal_dims == [3, 1]
    assert report.elliptic == [False, True]
    assert report.verdict is False
    assert modular_service.anti_elliptic(shifted) is True


def test_anti_elliptic_needs_reductive_input(aff):
    """The affine algebra is neither abelian nor semisimple"""
    with pytest.raises(UnsupportedError):
        modular_service.anti_elliptic(aff.basis_element(0))


def test_grading_consistency(sl3, lorentz):
    """g_0 is spanned by h and [g_1, g_-1]"""
    h = liealg_service.coordinates(sl3, np.diag([2 / 3, -1 / 3, -1 / 3]))
    assert modular_service.grading_consistency_check(euler_service.is_euler(h))
    assert modular_service.grading_consistency_check(euler_service.is_euler(lorentz.basis_element(0)))


def test_anti_elliptic_is_scale_invariant(sl2):
    """h and 2h on sl2 + so(3) leave the compact summand in the quotient"""
    total = liealg_service.direct_sum(sl2, liealg_service.make_algebra("so", p=0, q=3))
    h = total.element([0.0, 0.0, 0.5, 0.0, 0.0, 0.0])
    assert modular_service.anti_elliptic(h) is False
    assert modular_service.anti_elliptic(2.0 * h) is False
    assert modular_service.anti_elliptic_report(h).quotient_dim == 3


def test_zero_on_the_line_is_anti_elliptic():
    """One-dimensional algebras are trivially anti-elliptic"""
    line = liealg_service.make_algebra("abelian", n=1)
    assert modular_service.anti_elliptic(line.zero()) is True


def _conjugated_puzzle(puzzle, g):
    moved = [liealg_service.adjoint_action(g, y) for y in puzzle.subalgebra]
    return modular_service.make_puzzle(
        moved, liealg_service.adjoint_action(g, puzzle.h1), liealg_service.adjoint_action(g, puzzle.h2)
    )


def test_covariance_verdict_survives_conjugation(rng):
    """Conjugating the sl3 puzzle keeps the violation"""
    puzzle = modular_service.build_ds2_counterexample()
    cyclic = GroupElement(np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]))
    report = modular_service.modular_covariance_test(_conjugated_puzzle(puzzle, cyclic))
    assert report.verdict == CovarianceVerdict.VIOLATED
    assert report.witness_norm == pytest.approx(2.0, rel=1e-6)

    g = liealg_service.exp_element(puzzle.algebra.element(0.3 * rng.normal(size=puzzle.algebra.dim)))
    assert modular_service.modular_covariance_test(_conjugated_puzzle(puzzle, g)).verdict == CovarianceVerdict.VIOLATED


def test_regularity_is_monotone_in_the_cone(sl2, sl2_cone, rng):
    """Adding generators to a regular cone never makes it irregular"""
    grading = euler_service.is_euler(sl2.element([0.0, 0.0, 0.5]))
    base = list(sl2_cone.generators)
    for _ in range(5):
        extra = [sl2.element(rng.normal(size=sl2.dim)) for _ in range(int(rng.integers(1, 4)))]
        cone = cone_service.custom_cone(base + extra)
        assert modular_service.regularity_cone_check(RegularityQuery(cone=cone, grading=grading)).verdict is not False

    for _ in range(10):
        small = [sl2.element(rng.normal(size=sl2.dim)) for _ in range(3)]
        large = small + [sl2.element(rng.normal(size=sl2.dim)) for _ in range(2)]
        before = modular_service.regularity_cone_check(RegularityQuery(cone=cone_service.custom_cone(small), grading=grading))
        after = modular_service.regularity_cone_check(RegularityQuery(cone=cone_service.custom_cone(large), grading=grading))
        if before.verdict is True:
            assert after.verdict is not False


def test_audit_flags_incompatible_conjugation(aff):
    """Plain complex conjugation does not implement tau_h for the dilation data"""
    pair = stdsub_service.swap_pair(1.5)
    good = ModularRepData(generator=pair.log_delta, conjugation=pair.J)
    bad = ModularRepData(generator=pair.log_delta, conjugation=AntiLinearOp(stdsub_service.conjugation(2)))
    samples = modular_service.affine_audit_samples(aff, good, count=6, seed=5)
    h = aff.basis_element(0)
    assert modular_service.euler_theorem_audit(good, h, samples).max_reflection_residual < 1e-10
    report = modular_service.euler_theorem_audit(bad, h, samples)
    assert report.max_reflection_residual > 0.5
    assert report.modular_group_residual == np.inf
