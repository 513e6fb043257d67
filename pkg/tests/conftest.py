import numpy as np
import pytest

from wedgekit.services.cone_service import cone_service
from wedgekit.services.euler_service import euler_service
from wedgekit.services.liealg_service import liealg_service
from wedgekit.services.rapidity_service import rapidity_service
from wedgekit.services.wedge_service import wedge_service


@pytest.fixture(name="sl2")
def sl2_fixture():
    """sl2 with basis E01, E10, H"""
    return liealg_service.make_algebra("sl", n=2)


@pytest.fixture(name="sl3")
def sl3_fixture():
    """sl3 in the built-in ordering"""
    return liealg_service.make_algebra("sl", n=3)


@pytest.fixture(name="sl4")
def sl4_fixture():
    """sl4 in the built-in ordering"""
    return liealg_service.make_algebra("sl", n=4)


@pytest.fixture(name="lorentz")
def lorentz_fixture():
    """so(1,3) with the boost generators first"""
    return liealg_service.make_algebra("so", p=1, q=3)


@pytest.fixture(name="poincare")
def poincare_fixture():
    """iso(1,3): Lorentz generators then P_0..P_3"""
    return liealg_service.make_algebra("iso", d=3)


@pytest.fixture(name="aff")
def aff_fixture():
    """Affine algebra of the line"""
    return liealg_service.make_algebra("aff")


@pytest.fixture(name="model")
def model_fixture():
    """Default rapidity model, m = 1 on 2048 points"""
    return rapidity_service.make_model(1.0, 2048, 20.0)


@pytest.fixture(name="rng")
def rng_fixture():
    """Seeded generator for sampled checks"""
    return np.random.default_rng(20240601)


@pytest.fixture(name="sl2_couple")
def sl2_couple_fixture(sl2):
    """Base couple at h = diag(1,-1)/2"""
    grading = euler_service.is_euler(sl2.element([0.0, 0.0, 0.5]))
    return wedge_service.base_couple(grading, seed=3)


@pytest.fixture(name="sl2_cone")
def sl2_cone_fixture(sl2):
    """Standard invariant cone of sl2"""
    return cone_service.make_cone("sl2-standard", sl2)
