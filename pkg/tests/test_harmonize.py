import json

import numpy as np
import pytest
from pydantic import ValidationError

from Utils.errors import ConfigError, UnmappedCode
from harmonize import DRAWEM_TO_FETA, IDENTITY, load_label_map, merge_cc_into_wm, remap
from schemas.configs import LabelMap
from volume.types import RawLabelVolume

from .conftest import labels


def _raw(codes):
    return RawLabelVolume(voxels=np.asarray(codes, dtype=np.uint8).reshape(-1, 1, 1))


def test_drawem_codes_map_to_the_tissue_scheme():
    out = remap(_raw(range(11)), DRAWEM_TO_FETA)
    assert list(out.voxels.ravel()) == [0, 1, 2, 3, 0, 4, 5, 6, 7, 3, 8]


def test_strict_map_rejects_unknown_codes():
    with pytest.raises(UnmappedCode, match="17"):
        remap(_raw([1, 17]), DRAWEM_TO_FETA)


def test_lenient_map_sends_unknown_codes_to_background():
    lenient = DRAWEM_TO_FETA.model_copy(update={"strict": False})
    out = remap(_raw([1, 17, 200]), lenient)
    assert list(out.voxels.ravel()) == [1, 0, 0]


def test_identity_keeps_geometry():
    raw = RawLabelVolume(voxels=np.arange(9, dtype=np.uint8).reshape(9, 1, 1), spacing=(0.5, 0.5, 2.0),
                         orientation=("L", "P", "S"))
    out = remap(raw, IDENTITY)
    np.testing.assert_array_equal(out.voxels, raw.voxels)
    assert out.spacing == raw.spacing and out.orientation == raw.orientation


def test_label_maps_from_json(tmp_path):
    path = tmp_path / "map.json"
    path.write_text(json.dumps({"name": "custom", "strict": True, "map": {"0": 0, "40": 3}}))
    label_map = load_label_map(str(path))
    assert list(remap(_raw([40, 0]), label_map).voxels.ravel()) == [3, 0]
    assert load_label_map("drawem-to-feta") is DRAWEM_TO_FETA
    with pytest.raises(ConfigError):
        load_label_map(str(tmp_path / "missing.json"))


def test_map_targets_must_be_tissue_codes():
    with pytest.raises(ValidationError):
        LabelMap(name="bad", map={1: 9})


def test_merge_cc_into_wm():
    vol = labels(np.array([3, 8, 2]).reshape(3, 1, 1))
    assert list(merge_cc_into_wm(vol).voxels.ravel()) == [3, 3, 2]
