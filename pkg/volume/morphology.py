"""Binary morphology with Background outside the grid."""
import numpy as np
from scipy import ndimage

from volume.distance import box_of
from volume.types import BinaryMask, LabelVolume, StructuringElement, TissueLabel


def extract_mask(vol: LabelVolume, label: TissueLabel | int) -> BinaryMask:
    return BinaryMask(voxels=vol.voxels == int(label), spacing=vol.spacing,
                      orientation=vol.orientation)


def _halo(footprint: np.ndarray) -> int:
    return max(footprint.shape) // 2 + 1


def erode_array(voxels: np.ndarray, footprint: np.ndarray) -> np.ndarray:
    out = np.zeros_like(voxels, dtype=bool)
    if not voxels.any():
        return out
    # the result is a subset of the input, so work inside its box plus a halo
    window = box_of(voxels).slices(margin=_halo(footprint), dims=voxels.shape)
    out[window] = ndimage.binary_erosion(voxels[window], structure=footprint, border_value=0)
    return out


def dilate_array(voxels: np.ndarray, footprint: np.ndarray) -> np.ndarray:
    out = np.zeros_like(voxels, dtype=bool)
    if not voxels.any():
        return out
    window = box_of(voxels).slices(margin=_halo(footprint), dims=voxels.shape)
    out[window] = ndimage.binary_dilation(voxels[window], structure=footprint)
    return out


def erode(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Voxel survives iff `se` centered on it lies entirely inside the mask."""
    return mask.with_voxels(erode_array(mask.voxels, se.footprint(mask.orientation)))


def dilate(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Voxel is set iff `se` centered on it touches the mask."""
    return mask.with_voxels(dilate_array(mask.voxels, se.footprint(mask.orientation)))


def close(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    footprint = se.footprint(mask.orientation)
    return mask.with_voxels(erode_array(dilate_array(mask.voxels, footprint), footprint))
