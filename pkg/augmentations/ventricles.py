"""Ventriculomegaly: localized radial expansion fields around the lateral
ventricles of one or both hemispheres."""
from typing import List, Tuple

import numpy as np

from Utils.errors import NoTargetStructure
from Utils.rules import require_structure
from logger import get_logger
from volume.distance import box_of
from volume.types import DisplacementField, LabelVolume, TissueLabel
from volume.warp import warp_region

logger = get_logger(__name__)

VM = int(TissueLabel.VM)
REACH_SIGMAS = 4.0
_EPS = 1e-9


def midplane(vol: LabelVolume) -> Tuple[int, float]:
    """Left-right grid axis and the index of the plane halfway across the
    non-background bounding box."""
    axis, _ = vol.axis("LR")
    box = box_of(vol.voxels != int(TissueLabel.BACKGROUND))
    return axis, 0.5 * (box.lo[axis] + box.hi[axis])


def side_centroids(vol: LabelVolume, laterality: str) -> List[np.ndarray]:
    """VM centroid (index space) of each selected hemisphere. Voxels lying
    exactly on the midplane belong to neither side."""
    if laterality not in ("left", "right", "bilateral"):
        raise ValueError(f"laterality must be left, right or bilateral, got {laterality}")
    require_structure(vol, VM, operation="ventriculomegaly")

    axis, mid = midplane(vol)
    _, sign = vol.axis("LR")
    coords = np.argwhere(vol.voxels == VM).astype(np.float64)
    # positive toward the subject's right
    rightward = (coords[:, axis] - mid) * sign

    sides = ["left", "right"] if laterality == "bilateral" else [laterality]
    centroids = []
    for side in sides:
        selected = coords[rightward > 0] if side == "right" else coords[rightward < 0]
        if len(selected) == 0:
            raise NoTargetStructure(f"ventriculomegaly: no VM voxels in the {side} hemisphere")
        centroids.append(selected.mean(axis=0))
    return centroids


def _reach_window(vol: LabelVolume, centroids, sigma_mm: float) -> tuple:
    lo, hi = [], []
    for axis in range(3):
        r = REACH_SIGMAS * sigma_mm / vol.spacing[axis]
        lo.append(max(0, int(np.floor(min(c[axis] for c in centroids) - r))))
        hi.append(min(vol.dims[axis], int(np.ceil(max(c[axis] for c in centroids) + r)) + 1))
    return tuple(slice(l, h) for l, h in zip(lo, hi))


def expansion_vectors(vol: LabelVolume, centroids, magnitude_mm: float, sigma_mm: float, window) -> np.ndarray:
    """Backward field pointing away from each centroid, so output voxels sample
    nearer the centroid; exactly zero beyond REACH_SIGMAS * sigma."""
    grids = np.ogrid[window]
    shape = tuple(sl.stop - sl.start for sl in window)
    vectors = np.zeros(shape + (3,), dtype=np.float64)
    for c in centroids:
        offsets = [(g - c[axis]) * vol.spacing[axis] for axis, g in enumerate(grids)]
        dist = np.sqrt(offsets[0] ** 2 + offsets[1] ** 2 + offsets[2] ** 2)
        weight = magnitude_mm * np.exp(-dist ** 2 / (2.0 * sigma_mm ** 2)) / np.maximum(dist, _EPS)
        weight = np.where(dist > REACH_SIGMAS * sigma_mm, 0.0, weight)
        for axis in range(3):
            vectors[..., axis] += weight * offsets[axis]
    return vectors.astype(np.float32)


def ventricle_field(vol: LabelVolume, magnitude_mm: float, sigma_mm: float, laterality: str) -> DisplacementField:
    """Dense field of the transform, for inspection."""
    centroids = side_centroids(vol, laterality)
    window = _reach_window(vol, centroids, sigma_mm)
    field = DisplacementField.zeros(vol, max_magnitude=len(centroids) * abs(magnitude_mm))
    field.vectors[window] = expansion_vectors(vol, centroids, magnitude_mm, sigma_mm, window)
    return field


def ventriculomegaly(vol: LabelVolume, magnitude_mm: float, sigma_mm: float, laterality: str) -> LabelVolume:
    if sigma_mm <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma_mm}")
    centroids = side_centroids(vol, laterality)
    if magnitude_mm == 0:
        return vol.with_voxels(vol.voxels.copy())
    window = _reach_window(vol, centroids, sigma_mm)
    vectors = expansion_vectors(vol, centroids, magnitude_mm, sigma_mm, window)
    out = warp_region(vol, window, vectors)
    logger.debug(f"ventriculomegaly {laterality}: VM {vol.count(VM)} -> {out.count(VM)} voxels")
    return out
