import json
import logging
import math
from pathlib import Path
from typing import Any, List, Union

import numpy as np
from pydantic import BaseModel

from wedgekit.exceptions import DomainError
from wedgekit.models import AlgebraFamily, LieAlgebra
from wedgekit.schemas import GaussianSum

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
VOLATILE_KEYS = {"generatedAt"}


def _canonical(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _canonical(v) for k, v in value.items() if k not in VOLATILE_KEYS}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return float(format(value, ".17g"))
    if isinstance(value, np.integer):
        return int(value)
    return value


def canonical_json(payload: Union[BaseModel, dict], keep_timestamp: bool = False) -> str:
    """Sorted keys and 17 significant digits; generatedAt dropped unless asked for."""
    data = payload.model_dump(mode="json", by_alias=True) if isinstance(payload, BaseModel) else payload
    timestamp = data.get("generatedAt") if keep_timestamp else None
    data = _canonical(data)
    if timestamp is not None:
        data["generatedAt"] = timestamp
    return json.dumps(data, sort_keys=True, indent=2)


def save_report(report: BaseModel, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(report, keep_timestamp=True) + "\n")
    logger.info(f"Wrote {type(report).__name__} to {path}")
    return path


def load_json(path: PathLike) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise DomainError(f"No such file: {path}")
    except json.JSONDecodeError as e:
        raise DomainError(f"{path} is not valid JSON: {e}")


def save_algebra(algebra: LieAlgebra, path: PathLike) -> Path:
    path = Path(path)
    payload = {
        "name": algebra.name,
        "family": algebra.family.value,
        "params": algebra.params,
        "tolerance": algebra.tolerance,
        "basis": algebra.basis.tolist(),
    }
    path.write_text(json.dumps(_canonical(payload), sort_keys=True, indent=2) + "\n")
    return path


def load_algebra(path: PathLike) -> LieAlgebra:
    """Read an algebra file and rebuild it through the structure-constant checks."""
    from wedgekit.services.liealg_service import liealg_service

    data = load_json(path)
    if "family" in data and data["family"] != AlgebraFamily.CUSTOM.value and "basis" not in data:
        return liealg_service.make_algebra(data["family"], **data.get("params", {}))
    if "basis" not in data:
        raise DomainError(f"{path} has neither a basis nor a built-in family")
    return liealg_service.from_basis(
        data.get("name", Path(path).stem),
        np.asarray(data["basis"], dtype=float),
        tolerance=data.get("tolerance"),
        family=AlgebraFamily(data.get("family", AlgebraFamily.CUSTOM.value)),
        params=data.get("params"),
    )


def load_test_functions(path: PathLike) -> List[GaussianSum]:
    data = load_json(path)
    items = data if isinstance(data, list) else [data]
    return [GaussianSum.model_validate(item) for item in items]
