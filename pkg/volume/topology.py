"""Connected components, Euler characteristic and Betti numbers of binary
masks viewed as closed cubical complexes (26-connected foreground,
6-connected background)."""
from typing import Tuple

import numpy as np
from scipy import ndimage

from Utils.errors import TopologyError
from logger import get_logger
from volume.distance import box_of
from volume.types import BettiTriple, BinaryMask

logger = get_logger(__name__)

_CONNECTIVITY_RANK = {6: 1, 18: 2, 26: 3}


def _structure(connectivity: int) -> np.ndarray:
    if connectivity not in _CONNECTIVITY_RANK:
        raise ValueError(f"connectivity must be 6, 18 or 26, got {connectivity}")
    return ndimage.generate_binary_structure(3, _CONNECTIVITY_RANK[connectivity])


def label_components(voxels: np.ndarray, connectivity: int = 26) -> Tuple[np.ndarray, int]:
    """Component ids numbered by first appearance in an x-fastest scan."""
    labels, count = ndimage.label(voxels, structure=_structure(connectivity))
    if count <= 1:
        return labels.astype(np.int32, copy=False), int(count)

    flat = labels.ravel(order="F")
    ids, first_seen = np.unique(flat, return_index=True)
    keep = ids > 0
    ids, first_seen = ids[keep], first_seen[keep]
    lookup = np.zeros(count + 1, dtype=np.int32)
    lookup[ids[np.argsort(first_seen)]] = np.arange(1, len(ids) + 1, dtype=np.int32)
    return lookup[labels], int(count)


def connected_components(mask: BinaryMask, connectivity: int = 26) -> Tuple[np.ndarray, int]:
    return label_components(mask.voxels, connectivity)


def count_components(voxels: np.ndarray, connectivity: int = 26) -> int:
    return int(ndimage.label(voxels, structure=_structure(connectivity))[1])


def _padded_crop(voxels: np.ndarray) -> np.ndarray:
    # a one-voxel Background frame around the foreground box leaves topology unchanged
    return np.pad(voxels[box_of(voxels).slices()], 1)


def euler_characteristic(mask: BinaryMask) -> int:
    """chi = V - E + F - C of the closed cubical complex whose 3-cells are the
    foreground voxels."""
    if mask.empty:
        return 0
    p = _padded_crop(mask.voxels)

    cubes = np.count_nonzero(p)

    faces = (np.count_nonzero(p[:-1, :, :] | p[1:, :, :])
             + np.count_nonzero(p[:, :-1, :] | p[:, 1:, :])
             + np.count_nonzero(p[:, :, :-1] | p[:, :, 1:]))

    # an edge along one axis is shared by the 2x2 voxels around it in the other two
    edges = (np.count_nonzero(p[:, :-1, :-1] | p[:, 1:, :-1] | p[:, :-1, 1:] | p[:, 1:, 1:])
             + np.count_nonzero(p[:-1, :, :-1] | p[1:, :, :-1] | p[:-1, :, 1:] | p[1:, :, 1:])
             + np.count_nonzero(p[:-1, :-1, :] | p[1:, :-1, :] | p[:-1, 1:, :] | p[1:, 1:, :]))

    corners = np.zeros(tuple(n - 1 for n in p.shape), dtype=bool)
    for dx in (0, 1):
        for dy in (0, 1):
            for dz in (0, 1):
                corners |= p[dx:dx + corners.shape[0], dy:dy + corners.shape[1], dz:dz + corners.shape[2]]
    vertices = np.count_nonzero(corners)

    return int(vertices - edges + faces - cubes)


def cavity_count(mask: BinaryMask) -> int:
    """Background components (6-connected) not reaching the grid boundary."""
    if mask.empty:
        return 0
    background = ~_padded_crop(mask.voxels)
    labels, count = ndimage.label(background, structure=_structure(6))
    # the frame is one component and touches the boundary
    return int(count) - 1


def betti_numbers(mask: BinaryMask) -> BettiTriple:
    if mask.empty:
        return BettiTriple(0, 0, 0)
    b0 = count_components(mask.voxels, 26)
    b2 = cavity_count(mask)
    chi = euler_characteristic(mask)
    b1 = b0 + b2 - chi
    if b1 < 0:
        raise TopologyError(f"inconsistent topology: b0={b0} b2={b2} chi={chi}")
    logger.debug(f"betti numbers ({b0}, {b1}, {b2}), chi={chi}")
    return BettiTriple(b0, b1, b2)
