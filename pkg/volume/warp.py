"""Nearest-neighbor label warping through backward displacement fields."""
import numpy as np

from Utils.errors import MetadataMismatch
from logger import get_logger
from volume.types import DisplacementField, LabelVolume, Spacing, TissueLabel

logger = get_logger(__name__)


def source_indices(vectors: np.ndarray, spacing: Spacing, window) -> list:
    """Rounded source index per grid axis for the voxels inside `window`:
    floor(i - u_i / spacing_i + 0.5). `vectors` covers exactly the window."""
    grids = np.ogrid[window]
    sources = []
    for axis in range(3):
        shift = vectors[..., axis].astype(np.float64) / spacing[axis]
        sources.append(np.floor(grids[axis] - shift + 0.5).astype(np.int64))
    return sources


def warp_region(vol: LabelVolume, window, vectors: np.ndarray) -> LabelVolume:
    """Warp only the voxels inside `window`; the field is zero everywhere else."""
    out = vol.voxels.copy()
    sx, sy, sz = source_indices(vectors, vol.spacing, window)
    nx, ny, nz = vol.dims
    inside = (sx >= 0) & (sx < nx) & (sy >= 0) & (sy < ny) & (sz >= 0) & (sz < nz)

    sampled = np.full(inside.shape, int(TissueLabel.BACKGROUND), dtype=np.uint8)
    sampled[inside] = vol.voxels[sx[inside], sy[inside], sz[inside]]
    out[window] = sampled
    logger.debug(f"warped {inside.size} voxels inside {window}")
    return vol.with_voxels(out)


def warp_labels(vol: LabelVolume, field: DisplacementField) -> LabelVolume:
    if not field.matches(vol):
        raise MetadataMismatch("displacement field grid does not match the volume")

    support = field.support()
    if support is None:
        return vol.with_voxels(vol.voxels.copy())
    window = support.slices()
    return warp_region(vol, window, field.vectors[window])
