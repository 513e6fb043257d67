"""
Script to regenerate the expected Euler atlas from the classifier
"""

import sys
import os

# Add the parent directory to the path so we can import from wedgekit
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import json
from wedgekit.services.atlas_service import ATLAS_FAMILIES, EXPECTED_ATLAS, _key, atlas_service
from wedgekit.config import settings
import logging

logger = logging.getLogger(__name__)


def generate_atlas(bump_version: bool = False):
    """Classify every atlas algebra and write the expected table, keeping source notes"""

    try:
        version, previous = atlas_service.load_expected()
    except FileNotFoundError:
        version, previous = 0, {}
        bump_version = True

    entries = []
    for family, params in ATLAS_FAMILIES:
        entry = atlas_service.build_entry(family, params, seed=settings.seed)
        reference = previous.get(_key(family, params))
        if reference is not None:
            entry.source = reference.source
            if atlas_service.compare(entry, reference):
                logger.warning(f"{_key(family, params)} changed against the stored table")
        entries.append(entry.model_dump())
        logger.info(f"{_key(family, params)}: {entry.orbit_count} orbit(s)")

    payload = {"tableVersion": version + 1 if bump_version else version, "entries": entries}
    EXPECTED_ATLAS.write_text(json.dumps(payload, indent=2) + "\n")
    logger.info(f"Expected atlas written to {EXPECTED_ATLAS}")


if __name__ == "__main__":
    logging.basicConfig(
        level=getattr(logging, settings.log.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    generate_atlas(bump_version="--bump" in sys.argv[1:])
