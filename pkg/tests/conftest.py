from functools import lru_cache

import numpy as np
import pytest

from phantom import generate_phantom
from schemas.configs import TRANSFORM_KINDS, AugmentationConfig, PhantomSpec
from volume.types import BinaryMask, LabelVolume, TissueLabel

SMALL_SPEC = dict(dims=(96, 96, 96), spacing=(0.75, 0.75, 0.75), scale=0.7)


def labels(voxels, spacing=(1.0, 1.0, 1.0), orientation=("R", "A", "S")) -> LabelVolume:
    return LabelVolume(voxels=np.asarray(voxels, dtype=np.uint8), spacing=spacing, orientation=orientation)


def mask(voxels, spacing=(1.0, 1.0, 1.0)) -> BinaryMask:
    return BinaryMask(voxels=np.asarray(voxels, dtype=bool), spacing=spacing)


def only(kind: str, p_augment: float = 1.0, **settings) -> AugmentationConfig:
    """Config that can only ever pick `kind`."""
    fields = {k: {"weight": 0.0} for k in TRANSFORM_KINDS}
    fields[kind] = {"weight": 1.0, **settings}
    return AugmentationConfig(p_augment=p_augment, max_transforms=1, **fields)


def cc_slab(shape=(12, 20, 12), cc_box=(slice(4, 8), slice(5, 15), slice(5, 8))) -> LabelVolume:
    """WM block with a rectangular CC inside it, CSF frame around."""
    voxels = np.full(shape, int(TissueLabel.CSF), dtype=np.uint8)
    voxels[1:-1, 1:-1, 1:-1] = int(TissueLabel.WM)
    voxels[cc_box] = int(TissueLabel.CC)
    return labels(voxels)


@lru_cache(maxsize=None)
def seeded_phantom(seed: int) -> LabelVolume:
    return generate_phantom(PhantomSpec(**SMALL_SPEC), seed=seed)


@pytest.fixture(scope="session")
def small_spec() -> PhantomSpec:
    return PhantomSpec(**SMALL_SPEC)


@pytest.fixture(scope="session")
def phantom(small_spec) -> LabelVolume:
    return generate_phantom(small_spec)


@pytest.fixture
def slab() -> LabelVolume:
    return cc_slab()
