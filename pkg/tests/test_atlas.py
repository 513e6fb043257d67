import pytest

from wedgekit.schemas import AtlasEntry, AtlasOrbit
from wedgekit.services.atlas_service import ATLAS_FAMILIES, atlas_service


def test_expected_table_covers_atlas_families():
    """Every atlas algebra has a reference entry"""
    version, expected = atlas_service.load_expected()
    assert version >= 1
    assert len(expected) == len(ATLAS_FAMILIES)
    assert all(entry.source for entry in expected.values())


@pytest.mark.parametrize("family,params,orbits,tube", [
    ("sl", {"n": 2}, 1, True),
    ("sl", {"n": 4}, 3, False),
    ("so", {"p": 1, "q": 3}, 1, False),
])
def test_classification_matches_table(family, params, orbits, tube):
    """Computed orbits and tube type agree with the reference table"""
    report = atlas_service.classify(family, params, seed=1)
    assert report.orbit_count == orbits
    assert report.tube_type is tube
    assert report.expected_match is True, report.mismatches


def test_sl4_orbit_symmetry_pattern():
    """Only the middle node of sl4 is symmetric, with a certificate"""
    report = atlas_service.classify("sl", {"n": 4}, seed=1)
    assert [o.symmetric for o in report.orbits] == [False, True, False]
    middle = report.orbits[1]
    assert middle.dims == [4, 7, 4]
    if middle.source == "certificate":
        assert middle.witness.witness_residual < 1e-6


def test_compare_reports_differences():
    """A changed orbit and tube type are listed separately"""
    reference = AtlasEntry(
        family="sl", params={"n": 2}, orbit_count=1,
        orbits=[AtlasOrbit(dims=[1, 1, 1], symmetric=True)], tube_type=True, source="note",
    )
    same = reference.model_copy(update={"source": None})
    assert atlas_service.compare(same, reference) == []
    changed = AtlasEntry(
        family="sl", params={"n": 2}, orbit_count=1,
        orbits=[AtlasOrbit(dims=[1, 1, 1], symmetric=False)], tube_type=False,
    )
    mismatches = atlas_service.compare(changed, reference)
    assert len(mismatches) == 2
    assert any("tube type" in m for m in mismatches)
