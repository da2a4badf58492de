"""Resampling of label volumes onto the canonical canvas."""
from typing import Sequence

import numpy as np

from logger import get_logger
from volume.types import LabelVolume, TissueLabel, normalize_spacing

logger = get_logger(__name__)


def _nearest_indices(n_in: int, s_in: float, s_out: float) -> np.ndarray:
    n_out = max(1, int(round(n_in * s_in / s_out)))
    # center-aligned: output voxel j covers input position (j + 0.5) * s_out / s_in
    idx = np.floor((np.arange(n_out) + 0.5) * (s_out / s_in)).astype(np.int64)
    return np.clip(idx, 0, n_in - 1)


def _center_fit(voxels: np.ndarray, target_dims: Sequence[int]) -> np.ndarray:
    out = np.full(tuple(target_dims), int(TissueLabel.BACKGROUND), dtype=voxels.dtype)
    src, dst = [], []
    for n, t in zip(voxels.shape, target_dims):
        if n >= t:
            start = (n - t) // 2
            src.append(slice(start, start + t))
            dst.append(slice(0, t))
        else:
            start = (t - n) // 2
            src.append(slice(0, n))
            dst.append(slice(start, start + n))
    out[tuple(dst)] = voxels[tuple(src)]
    return out


def conform(vol: LabelVolume, target_spacing: Sequence[float], target_dims: Sequence[int]) -> LabelVolume:
    """Nearest-neighbor resample to `target_spacing`, then center pad/crop to `target_dims`."""
    target_spacing = normalize_spacing(target_spacing)
    voxels = vol.voxels
    if vol.spacing != target_spacing:
        indices = [_nearest_indices(n, s, t) for n, s, t in zip(vol.dims, vol.spacing, target_spacing)]
        voxels = voxels[np.ix_(*indices)]
    if voxels.shape != tuple(target_dims):
        voxels = _center_fit(voxels, target_dims)
    else:
        voxels = voxels.copy()
    logger.debug(f"conformed {vol.dims}@{vol.spacing} -> {voxels.shape}@{target_spacing}")
    return LabelVolume(voxels=voxels, spacing=target_spacing, orientation=vol.orientation,
                       description=vol.description)
