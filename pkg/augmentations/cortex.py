"""Cortical transforms: thickening, thinning and smoothing of the GM ribbon."""
import numpy as np

from Utils.rules import require_structure
from logger import get_logger
from volume.morphology import dilate_array, erode_array
from volume.types import LabelVolume, Sphere, TissueLabel

logger = get_logger(__name__)

CSF = int(TissueLabel.CSF)
GM = int(TissueLabel.GM)
WM = int(TissueLabel.WM)


def grow_into(vol: LabelVolume, source: int, target: int, radius: float) -> LabelVolume:
    """Dilate `source` by Sphere(radius); gained voxels take the source label
    only where they were `target`."""
    out = vol.voxels.copy()
    if radius <= 0:
        return vol.with_voxels(out)
    grown = dilate_array(vol.voxels == source, Sphere(radius).footprint())
    gain = grown & (vol.voxels == target)
    out[gain] = source
    logger.debug(f"{TissueLabel(source).name} grew by {int(np.count_nonzero(gain))} voxels "
                 f"into {TissueLabel(target).name}")
    return vol.with_voxels(out)


def cortex_thickening(vol: LabelVolume, radius: float) -> LabelVolume:
    require_structure(vol, GM, operation="cortex_thickening")
    return grow_into(vol, GM, WM, radius)


def cortex_thinning(vol: LabelVolume, radius: float) -> LabelVolume:
    """CSF expands into the cortex."""
    require_structure(vol, GM, CSF, operation="cortex_thinning")
    return grow_into(vol, CSF, GM, radius)


def cortex_smoothing(vol: LabelVolume, radius: float) -> LabelVolume:
    """Close GM∪WM with Sphere(radius); CSF voxels filled by the closing become GM."""
    require_structure(vol, GM, operation="cortex_smoothing")
    out = vol.voxels.copy()
    if radius <= 0:
        return vol.with_voxels(out)
    footprint = Sphere(radius).footprint()
    tissue = (vol.voxels == GM) | (vol.voxels == WM)
    closed = erode_array(dilate_array(tissue, footprint), footprint)
    filled = closed & (vol.voxels == CSF)
    out[filled] = GM
    logger.debug(f"smoothing filled {int(np.count_nonzero(filled))} sulcal voxels")
    return vol.with_voxels(out)
