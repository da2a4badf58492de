"""Bounding boxes and spacing-weighted voxel distances."""
from typing import Tuple

import numpy as np
from scipy import ndimage

from Utils.errors import EmptyMask
from volume.types import BinaryMask, VoxelBox


def box_of(voxels: np.ndarray) -> VoxelBox:
    """Inclusive bounding box of the non-zero voxels of a 3D array (must be non-empty)."""
    lo, hi = [], []
    for axis in range(3):
        others = tuple(a for a in range(3) if a != axis)
        present = np.flatnonzero(np.any(voxels, axis=others))
        lo.append(int(present[0]))
        hi.append(int(present[-1]))
    return VoxelBox(tuple(lo), tuple(hi))


def bounding_box(mask: BinaryMask) -> VoxelBox:
    if mask.empty:
        raise EmptyMask("bounding box of an empty mask")
    return box_of(mask.voxels)


def surface_distances(a: BinaryMask, b: BinaryMask) -> Tuple[np.ndarray, np.ndarray]:
    """Per-voxel minimum Euclidean distance (mm) from each foreground voxel of
    `a` to `b`, and from `b` to `a`. Distances are between voxel centers."""
    a.require_same_grid(b)
    if a.empty or b.empty:
        raise EmptyMask("surface distances need two non-empty masks")

    # the nearest voxel of either mask always lies inside the union box
    window = box_of(a.voxels | b.voxels).slices()
    a_win, b_win = a.voxels[window], b.voxels[window]

    to_b = ndimage.distance_transform_edt(~b_win, sampling=a.spacing)
    to_a = ndimage.distance_transform_edt(~a_win, sampling=a.spacing)
    return to_b[a_win], to_a[b_win]
