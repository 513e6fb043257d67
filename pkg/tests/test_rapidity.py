import numpy as np
import pytest

from wedgekit.exceptions import DomainError, NumericError, QuadratureBoxError
from wedgekit.schemas import GaussianSum
from wedgekit.services.rapidity_service import rapidity_service


@pytest.fixture(name="right")
def right_fixture():
    """Gaussian deep in the right wedge"""
    return GaussianSum.gaussian((0.0, 5.0), 0.4, label="right")


@pytest.mark.parametrize("mass,n,theta_max", [(0.0, 2048, 20.0), (1.0, 1000, 20.0), (1.0, 2048, 5.0)])
def test_model_domain(mass, n, theta_max):
    """Mass, grid size and rapidity range are validated"""
    with pytest.raises(DomainError):
        rapidity_service.make_model(mass, n, theta_max)


def test_bw_fixed_points(model):
    """Right-wedge Gaussians are fixed by S, their mirror images are not"""
    report = rapidity_service.run_checks(model, ["bw"])
    assert report.passed, report.failures
    assert max(r.residual for r in report.bw_residuals) < 1e-3
    assert min(r.residual for r in report.left_wedge_residuals) > 0.1
    assert report.converged
    assert len(report.refinement) == len(report.bw_residuals)


def test_bw_residual_converges_with_grid(model):
    """Refining the rapidity grid four times does not make any fixture worse"""
    refinement = rapidity_service.grid_refinement(model, rapidity_service.bw_fixtures())
    assert len(refinement) == 6
    for r in refinement:
        assert r.fine_n == 4 * r.coarse_n
        assert r.converged, r
        assert r.fine_residual < 1e-4


@pytest.mark.parametrize(
    "center,width",
    [((0.0, 5.0), 0.3), ((0.0, 5.0), 0.4), ((0.0, 4.0), 0.3), ((0.0, 4.5), 0.35), ((0.0, 3.5), 0.3), ((0.5, 4.5), 0.3)],
)
def test_bw_fixed_point_on_fine_grid(center, width):
    """Right-wedge Gaussians are fixed by S to 1e-4 on 8192 points"""
    fine = rapidity_service.make_model(1.0, 8192, 20.0)
    psi = rapidity_service.rapidity_vector(fine, GaussianSum.gaussian(center, width)).values
    assert rapidity_service.fixed_point_residual(fine, psi) < 1e-4


def test_phase_rotation_leaves_the_fixed_points(model, right):
    """c f is fixed only for real c; the residual equals |c - conj c| / |c|"""
    psi = rapidity_service.rapidity_vector(model, right).values
    assert rapidity_service.fixed_point_residual(model, psi) < 1e-4
    assert rapidity_service.fixed_point_residual(model, 1j * psi) == pytest.approx(2.0, rel=1e-3)
    expected = 0.6 / np.sqrt(1.09)
    assert rapidity_service.fixed_point_residual(model, (1.0 + 0.3j) * psi) == pytest.approx(expected, rel=1e-3)
    assert rapidity_service.fixed_point_residual(model, -2.5 * psi) < 1e-4


@pytest.mark.parametrize("center", [(0.0, 5.0), (0.0, 0.5)])
def test_literal_tomita_refuses_unresolved_spectra(model, center):
    """Ordinary Gaussians carry weight where exp(pi omega) amplifies round-off"""
    psi = rapidity_service.rapidity_vector(model, GaussianSum.gaussian(center, 0.4)).values
    tomita = rapidity_service.rindler_tomita(model)
    with pytest.raises(NumericError):
        tomita.apply(psi)


def test_literal_tomita_overflow_guard():
    """exp(pi omega) is refused once it overflows"""
    with pytest.raises(NumericError):
        rapidity_service.rindler_tomita(rapidity_service.make_model(1.0, 8192, 20.0))


def test_literal_tomita_fixes_constructed_vector(model):
    """A spectrum built to satisfy F(w) = exp(-pi w) conj F(-w) is fixed by S"""
    omega = model.omega
    coefficients = np.zeros(model.n, dtype=complex)
    negative = np.flatnonzero(omega < 0)
    coefficients[negative] = np.exp(-2.0 * (omega[negative] + 1.0) ** 2) * np.exp(0.3j * omega[negative])
    positive = np.flatnonzero(omega > 0)
    coefficients[positive] = np.exp(-np.pi * omega[positive]) * np.conj(coefficients[(-positive) % model.n])
    coefficients[0] = np.exp(-2.0)
    psi = np.fft.ifft(coefficients)

    assert rapidity_service.fixed_point_residual(model, psi) < 1e-12
    tomita = rapidity_service.rindler_tomita(model)
    assert np.linalg.norm(tomita.apply(psi) - psi) / np.linalg.norm(psi) < 1e-4


def test_locality(model):
    """Opposite wedges commute, timelike neighbours do not"""
    report = rapidity_service.run_checks(model, ["locality"])
    assert report.locality_residuals["opposite-wedge"] < 1e-6
    assert report.locality_residuals["same-wedge"] > 1e-6
    assert report.passed


def test_regularity_profiles(model):
    """Small translations keep full rank, large ones empty the intersection"""
    report = rapidity_service.run_checks(model, ["regularity"])
    untouched, small, large = report.regularity
    assert untouched.real_rank == 6
    assert small.real_rank == 6
    assert small.complex_rank == 12
    assert large.real_rank == 0
    assert max(large.norms) < 1e-10


def test_borchers_relations(model):
    """Lightlike translations satisfy both Borchers relations"""
    report = rapidity_service.run_checks(model, ["borchers"])
    assert report.borchers.reflection_residual < 1e-6
    assert report.borchers.dilation_residual < 1e-6


def test_lightlike_translation_into_the_wedge(model, right):
    """Translating into the wedge keeps the fixed point, translating out does not"""
    residuals = dict(rapidity_service.borchers_inclusion_probe(model, right))
    for t in (0.0, 0.5, 1.0, 2.0):
        assert residuals[t] < 1e-3
    assert residuals[-10.0] > 0.1


def test_boost_matches_direct_quadrature(model, right):
    """Spectral boost equals the transform of the boosted function"""
    psi = rapidity_service.rapidity_vector(model, right).values
    direct = rapidity_service.rapidity_vector(model, right, boost=0.5).values
    shifted = rapidity_service.boost(model, psi, 0.5)
    assert np.linalg.norm(direct - shifted) / np.linalg.norm(psi) < 1e-6


def test_modular_group_is_unitary_group(model, right):
    """Delta^it composes additively and preserves the norm"""
    psi = rapidity_service.rapidity_vector(model, right).values
    once = rapidity_service.modular_group(model, rapidity_service.modular_group(model, psi, 0.1), 0.2)
    twice = rapidity_service.modular_group(model, psi, 0.3)
    np.testing.assert_allclose(once, twice, atol=1e-10 * np.abs(psi).max())
    assert rapidity_service.norm(model, twice) == pytest.approx(rapidity_service.norm(model, psi), rel=1e-10)
    inner = rapidity_service.inner(model, psi, psi)
    assert inner.real == pytest.approx(rapidity_service.norm(model, psi) ** 2)


def test_support_outside_quadrature_box(model):
    """Test functions reaching past the quadrature box are refused"""
    with pytest.raises(QuadratureBoxError):
        rapidity_service.rapidity_vector(model, GaussianSum.gaussian((0.0, 29.0), 0.4))


def test_unknown_check(model):
    """Only the documented checks are accepted"""
    with pytest.raises(DomainError):
        rapidity_service.run_checks(model, ["bw", "spectral"])
