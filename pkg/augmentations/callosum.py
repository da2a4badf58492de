"""Corpus callosum dysgenesis transforms: agenesis, thinning, thickening, kink."""
import math
from typing import Tuple

import numpy as np

from Utils.rules import require_structure
from logger import get_logger
from volume.distance import box_of
from volume.morphology import dilate_array, erode_array
from volume.types import DisplacementField, LabelVolume, Line, Sphere, TissueLabel, VoxelBox
from volume.warp import warp_region

logger = get_logger(__name__)

CC = int(TissueLabel.CC)
WM = int(TissueLabel.WM)
VM = int(TissueLabel.VM)


def complete_agenesis(vol: LabelVolume) -> LabelVolume:
    """Every CC voxel becomes ventricle."""
    require_structure(vol, CC, operation="complete_agenesis")
    out = vol.voxels.copy()
    out[out == CC] = VM
    return vol.with_voxels(out)


def removed_slices(extent: int, fraction: float) -> int:
    # round() strips float noise such as 0.25 * 40 = 10.000000000000002
    n = math.ceil(round(fraction * extent, 9))
    return max(0, min(n, extent - 1))


def partial_agenesis(vol: LabelVolume, fraction: float, end: str) -> LabelVolume:
    """Relabel the CC in the `fraction` of its posterior-anterior extent at
    `end` to ventricle. At least one CC slice always survives."""
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    if end not in ("anterior", "posterior"):
        raise ValueError(f"end must be anterior or posterior, got {end}")
    require_structure(vol, CC, operation="partial_agenesis")

    axis, sign = vol.axis("PA")
    cc = vol.voxels == CC
    box = box_of(cc)
    lo, hi = box.lo[axis], box.hi[axis]
    n = removed_slices(hi - lo + 1, fraction)
    if n == 0:
        return vol.with_voxels(vol.voxels.copy())

    # indices grow toward anterior when sign is +1
    at_high_end = (end == "anterior") == (sign > 0)
    start, stop = (hi - n + 1, hi + 1) if at_high_end else (lo, lo + n)

    region = [slice(None)] * 3
    region[axis] = slice(start, stop)
    region = tuple(region)
    out = vol.voxels.copy()
    block = out[region]
    block[block == CC] = VM
    logger.debug(f"partial agenesis removed {n} of {hi - lo + 1} slices at the {end} end")
    return vol.with_voxels(out)


def cc_thinning(vol: LabelVolume, iterations: int) -> LabelVolume:
    """Erode the CC with a vertical 3-voxel line. Vacated voxels become WM;
    the last non-empty erosion is kept."""
    require_structure(vol, CC, operation="cc_thinning")
    footprint = Line("IS", 3).footprint(vol.orientation)
    original = vol.voxels == CC
    current = original
    for _ in range(int(iterations)):
        eroded = erode_array(current, footprint)
        if not eroded.any():
            logger.debug("thinning stopped before emptying the CC")
            break
        current = eroded

    out = vol.voxels.copy()
    out[original & ~current] = WM
    return vol.with_voxels(out)


def cc_thickening(vol: LabelVolume, radius: float) -> LabelVolume:
    """Grow the CC by a spherical dilation, only into white matter."""
    require_structure(vol, CC, operation="cc_thickening")
    out = vol.voxels.copy()
    if radius <= 0:
        return vol.with_voxels(out)
    grown = dilate_array(vol.voxels == CC, Sphere(radius).footprint())
    out[grown & (vol.voxels == WM)] = CC
    return vol.with_voxels(out)


# ---------------------------------------------------------------------------
# Kink
# ---------------------------------------------------------------------------

def kink_margin(amplitude_mm: float, spacing) -> int:
    return int(math.ceil(amplitude_mm / min(spacing))) + 2


def _taper(window, core: VoxelBox, margin: int) -> np.ndarray:
    """Raised cosine: 1 inside the core box, falling to 0 at `margin` voxels outside it."""
    weight = None
    for axis, (sl, lo, hi) in enumerate(zip(window, core.lo, core.hi)):
        idx = np.arange(sl.start, sl.stop)
        d = np.maximum(np.maximum(lo - idx, idx - hi), 0)
        w = np.where(d < margin, 0.5 * (1.0 + np.cos(np.pi * d / margin)), 0.0)
        shape = [1, 1, 1]
        shape[axis] = len(idx)
        w = w.reshape(shape)
        weight = w if weight is None else weight * w
    return weight


def kink_vectors(vol: LabelVolume, amplitude_mm: float, cycles: float,
                 phase: float) -> Tuple[tuple, np.ndarray]:
    """Window (CC box grown by the margin, clipped to the grid) and the
    displacement vectors inside it."""
    cc_box = box_of(vol.voxels == CC)
    margin = kink_margin(amplitude_mm, vol.spacing)
    window = cc_box.slices(margin=margin, dims=vol.dims)

    pa_axis, _ = vol.axis("PA")
    is_axis, _ = vol.axis("IS")
    y0 = cc_box.lo[pa_axis]
    extent = cc_box.extent(pa_axis)

    y = np.arange(window[pa_axis].start, window[pa_axis].stop, dtype=np.float64)
    wave = amplitude_mm * np.sin(2.0 * np.pi * cycles * (y - y0) / extent + phase)
    shape = [1, 1, 1]
    shape[pa_axis] = len(y)

    shape_w = tuple(sl.stop - sl.start for sl in window)
    vectors = np.zeros(shape_w + (3,), dtype=np.float32)
    vectors[..., is_axis] = wave.reshape(shape) * _taper(window, cc_box, margin)
    return window, vectors


def kink_field(vol: LabelVolume, amplitude_mm: float, cycles: float, phase: float) -> DisplacementField:
    """Dense field of the kink, for inspection; the transform itself only
    builds the vectors inside the window."""
    require_structure(vol, CC, operation="cc_kink")
    field = DisplacementField.zeros(vol, max_magnitude=abs(amplitude_mm))
    window, vectors = kink_vectors(vol, amplitude_mm, cycles, phase)
    field.vectors[window] = vectors
    return field


def cc_kink(vol: LabelVolume, amplitude_mm: float, cycles: float, phase: float = 0.0) -> LabelVolume:
    """Sinusoidal inferior-superior displacement along the CC's
    posterior-anterior extent, tapered to zero around its bounding box."""
    if cycles <= 0:
        raise ValueError(f"cycles must be > 0, got {cycles}")
    require_structure(vol, CC, operation="cc_kink")
    if amplitude_mm == 0:
        return vol.with_voxels(vol.voxels.copy())
    window, vectors = kink_vectors(vol, amplitude_mm, cycles, phase)
    return warp_region(vol, window, vectors)
