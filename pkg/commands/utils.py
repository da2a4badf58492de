import hashlib
import json
import os
from typing import Iterable, List, Optional, Sequence, Type, TypeVar

import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError

from Utils.errors import ConfigError, VolumeReadError, VolumeWriteError
from config import settings
from logger import get_logger
from volume.resample import conform
from volume.types import LabelVolume, MAX_LABEL

logger = get_logger(__name__)

Model = TypeVar("Model", bound=BaseModel)


def load_model(model_cls: Type[Model], path: Optional[str]) -> Model:
    """Validate a JSON document against `model_cls`; no path means defaults."""
    if path is None:
        return model_cls()
    try:
        with open(path) as handle:
            model = model_cls.model_validate(json.load(handle))
    except OSError as e:
        raise ConfigError(f"cannot open {path}: {e}")
    except (json.JSONDecodeError, ValidationError) as e:
        raise ConfigError(f"invalid {model_cls.__name__} in {path}: {e}")
    logger.info(f"Loaded {model_cls.__name__} from {path}")
    return model


def config_hash(*models: BaseModel) -> str:
    digest = hashlib.sha256()
    for model in models:
        digest.update(json.dumps(model.model_dump(mode="json"), sort_keys=True).encode())
    return digest.hexdigest()


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit per-sample seed from (master seed, sample index)."""
    state = np.random.SeedSequence(master_seed, spawn_key=(index,)).generate_state(1, np.uint64)
    return int(state[0])


def to_canvas(vol: LabelVolume, enabled: bool = True) -> LabelVolume:
    if not enabled:
        return vol
    return conform(vol, settings.TARGET_SPACING, settings.TARGET_DIMS)


def ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(parent, exist_ok=True)
    except OSError as e:
        raise VolumeWriteError(f"cannot create {parent}: {e}")


def write_json(model: BaseModel, path: str) -> None:
    ensure_parent(path)
    try:
        with open(path, "w") as handle:
            handle.write(model.model_dump_json(indent=2))
            handle.write("\n")
    except OSError as e:
        raise VolumeWriteError(f"cannot write {path}: {e}")
    logger.info(f"Wrote {type(model).__name__} to {path}")


def write_table(records: Iterable[dict], columns: Sequence[str], path: str) -> None:
    ensure_parent(path)
    frame = pd.DataFrame.from_records(list(records), columns=list(columns))
    try:
        frame.to_csv(path, index=False)
    except OSError as e:
        raise VolumeWriteError(f"cannot write {path}: {e}")
    logger.info(f"Wrote {len(frame)} rows to {path}")


def read_table(path: str) -> pd.DataFrame:
    """CSV with identifier and flag columns kept as text."""
    try:
        columns = pd.read_csv(path, nrows=0).columns
        text = {c: str for c in ("class_code", "subject", "flags") if c in columns}
        return pd.read_csv(path, dtype=text)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise VolumeReadError(f"cannot read table {path}: {e}")


def census_lines(vol: LabelVolume) -> List[str]:
    return [f"{name:<10} {count}" for name, count in vol.census().items()]


def parse_classes(text: Optional[str]) -> Optional[List[int]]:
    if not text:
        return None
    try:
        codes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"--classes expects comma separated codes, got '{text}'")
    if not codes or any(not 1 <= c <= MAX_LABEL for c in codes):
        raise ConfigError(f"--classes expects codes in 1..{MAX_LABEL}, got '{text}'")
    return codes


def subject_name(path: str) -> str:
    name = os.path.basename(path)
    for suffix in (".nii.gz", ".nii", ".cmv"):
        if name.endswith(suffix):
            return name[: -len(suffix)]
    return name
