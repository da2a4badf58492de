"""Label-scheme remapping between annotation protocols."""
import json

import numpy as np
from pydantic import ValidationError

from Utils.errors import ConfigError, UnmappedCode
from logger import get_logger
from schemas.configs import LabelMap
from volume.types import LabelVolume, RawLabelVolume, TissueLabel

logger = get_logger(__name__)

# Draw-EM tissue codes to the 8-class scheme; 10 is the retained CC class
DRAWEM_TO_FETA = LabelMap(
    name="drawem-to-feta",
    strict=True,
    map={0: 0, 1: 1, 2: 2, 3: 3, 4: 0, 5: 4, 6: 5, 7: 6, 8: 7, 9: 3, 10: 8},
)
IDENTITY = LabelMap(name="identity", strict=True, map={code: code for code in range(9)})

BUILTIN_MAPS = {m.name: m for m in (DRAWEM_TO_FETA, IDENTITY)}


def load_label_map(name_or_path: str) -> LabelMap:
    if name_or_path in BUILTIN_MAPS:
        return BUILTIN_MAPS[name_or_path]
    try:
        with open(name_or_path) as handle:
            return LabelMap.model_validate(json.load(handle))
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise ConfigError(f"cannot load label map {name_or_path}: {e}")


def lookup_table(label_map: LabelMap) -> np.ndarray:
    """256-entry table; -1 marks codes the map does not name."""
    table = np.full(256, -1, dtype=np.int16)
    for src, tgt in label_map.map.items():
        table[src] = tgt
    return table


def remap(vol: RawLabelVolume, label_map: LabelMap) -> LabelVolume:
    table = lookup_table(label_map)
    present = np.flatnonzero(np.bincount(vol.voxels.ravel(), minlength=256))
    unmapped = [int(code) for code in present if table[code] < 0]
    if unmapped:
        if label_map.strict:
            raise UnmappedCode(f"map '{label_map.name}' has no entry for codes {unmapped}")
        logger.warning(f"map '{label_map.name}': codes {unmapped} sent to background")
        table[table < 0] = int(TissueLabel.BACKGROUND)

    voxels = table.astype(np.uint8)[vol.voxels]
    return LabelVolume(voxels=voxels, spacing=vol.spacing, orientation=vol.orientation,
                       description=vol.description)


def merge_cc_into_wm(vol: LabelVolume) -> LabelVolume:
    out = vol.voxels.copy()
    out[out == int(TissueLabel.CC)] = int(TissueLabel.WM)
    return vol.with_voxels(out)
