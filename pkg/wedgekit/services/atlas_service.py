import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from joblib import Parallel, delayed

from wedgekit.config import settings
from wedgekit.exceptions import UnsupportedError
from wedgekit.models import SymmetryResult
from wedgekit.schemas import (
    AtlasEntry,
    AtlasOrbit,
    AtlasReport,
    ClassificationReport,
    OrbitReport,
    WitnessReport,
)
from wedgekit.services.euler_service import euler_service
from wedgekit.services.liealg_service import liealg_service
from wedgekit.storage import canonical_json

logger = logging.getLogger(__name__)

EXPECTED_ATLAS = Path(__file__).resolve().parent.parent / "data" / "expected_atlas.json"

ATLAS_FAMILIES: List[Tuple[str, Dict[str, int]]] = (
    [("sl", {"n": n}) for n in range(2, 7)]
    + [("so", {"p": 1, "q": q}) for q in (2, 3, 4)]
    + [("so", {"p": 2, "q": 3}), ("sp", {"n": 2})]
)


def _key(family: str, params: Dict[str, int]) -> str:
    return family + "(" + ",".join(f"{k}={params[k]}" for k in sorted(params)) + ")"


def witness_report(result: SymmetryResult) -> Optional[WitnessReport]:
    if result.source != "certificate":
        return None
    return WitnessReport(
        e=result.e.coords.tolist(),
        f=result.f.coords.tolist(),
        conjugator=result.conjugator.matrix.tolist(),
        triple_residual=result.triple_residual,
        witness_residual=result.witness_residual,
    )


class AtlasService:
    """Euler orbit tables for the supported simple algebras"""

    def load_expected(self, path: Optional[Path] = None) -> Tuple[int, Dict[str, AtlasEntry]]:
        data = json.loads(Path(path or EXPECTED_ATLAS).read_text())
        entries = [AtlasEntry.model_validate(item) for item in data["entries"]]
        return data["tableVersion"], {_key(e.family, e.params): e for e in entries}

    def classify(self, family: str, params: Dict[str, int], seed: Optional[int] = None) -> ClassificationReport:
        seed = settings.seed if seed is None else seed
        algebra = liealg_service.make_algebra(family, **params)
        orbits = []
        for representative, invariant in euler_service.classify_euler_orbits(algebra, seed=seed):
            grading = euler_service.is_euler(representative)
            symmetry = euler_service.is_symmetric(grading, seed=seed)
            orbits.append(
                OrbitReport(
                    representative=representative.coords.tolist(),
                    dims=list(invariant.dims),
                    killing_signature=list(invariant.killing_signature),
                    symmetric=symmetry.symmetric,
                    source=symmetry.source,
                    witness=witness_report(symmetry),
                )
            )
        try:
            tube_type = euler_service.is_tube_type_hermitian(algebra, seed=seed)
        except UnsupportedError as e:
            logger.warning(f"No tube-type verdict for {algebra.name}: {e}")
            tube_type = None

        report = ClassificationReport(algebra=algebra.name, orbit_count=len(orbits), orbits=orbits, tube_type=tube_type)
        _, expected = self.load_expected()
        reference = expected.get(_key(family, params))
        if reference is not None:
            report.mismatches = self.compare(self.entry_from_report(family, params, report), reference)
            report.expected_match = not report.mismatches
        return report

    @staticmethod
    def entry_from_report(family: str, params: Dict[str, int], report: ClassificationReport) -> AtlasEntry:
        return AtlasEntry(
            family=family,
            params=params,
            orbit_count=report.orbit_count,
            orbits=[AtlasOrbit(dims=o.dims, symmetric=o.symmetric) for o in report.orbits],
            tube_type=report.tube_type,
        )

    def build_entry(self, family: str, params: Dict[str, int], seed: Optional[int] = None) -> AtlasEntry:
        return self.entry_from_report(family, params, self.classify(family, params, seed))

    @staticmethod
    def compare(entry: AtlasEntry, reference: AtlasEntry) -> List[str]:
        strip = {"source"}
        if canonical_json(entry.model_dump(exclude=strip)) == canonical_json(reference.model_dump(exclude=strip)):
            return []
        key = _key(entry.family, entry.params)
        mismatches = []
        if entry.orbit_count != reference.orbit_count:
            mismatches.append(f"{key}: {entry.orbit_count} orbits, expected {reference.orbit_count}")
        for i, (got, want) in enumerate(zip(entry.orbits, reference.orbits)):
            if got != want:
                mismatches.append(f"{key} orbit {i}: {got.model_dump()} expected {want.model_dump()}")
        if entry.tube_type != reference.tube_type:
            mismatches.append(f"{key}: tube type {entry.tube_type}, expected {reference.tube_type}")
        return mismatches or [f"{key}: canonical forms differ"]

    def build_atlas(self, seed: Optional[int] = None, threads: Optional[int] = None) -> AtlasReport:
        threads = settings.threads if threads is None else threads
        logger.info(f"Building the Euler atlas over {len(ATLAS_FAMILIES)} algebras")
        entries = Parallel(n_jobs=threads)(
            delayed(self.build_entry)(family, params, seed) for family, params in ATLAS_FAMILIES
        )
        version, expected = self.load_expected()
        mismatches = []
        for entry in entries:
            key = _key(entry.family, entry.params)
            reference = expected.get(key)
            if reference is None:
                mismatches.append(f"{key}: missing from the expected table")
                continue
            mismatches += self.compare(entry, reference)
            entry.source = reference.source
        if mismatches:
            logger.warning(f"Atlas mismatches: {'; '.join(mismatches)}")
        return AtlasReport(table_version=version, entries=entries, matches=not mismatches, mismatches=mismatches)


atlas_service = AtlasService()
