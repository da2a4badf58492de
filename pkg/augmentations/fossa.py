"""Posterior fossa hypoplasia: joint erosion of cerebellum and brainstem with
a connectivity guard."""
import numpy as np
from scipy import ndimage

from Utils.rules import require_structure
from logger import get_logger
from volume.distance import box_of
from volume.morphology import erode_array
from volume.topology import count_components
from volume.types import LabelVolume, Sphere, TissueLabel

logger = get_logger(__name__)

CSF = int(TissueLabel.CSF)
CBM = int(TissueLabel.CBM)
BSM = int(TissueLabel.BSM)

_TOUCH = np.ones((3, 3, 3), dtype=bool)


def _keeps_shape(candidate: np.ndarray, other: np.ndarray) -> bool:
    """Non-empty, one 26-component, and still touching `other`."""
    if not candidate.any() or count_components(candidate, 26) != 1:
        return False
    return bool((ndimage.binary_dilation(candidate, structure=_TOUCH) & other).any())


def posterior_fossa_hypoplasia(vol: LabelVolume, iterations: int) -> LabelVolume:
    require_structure(vol, CBM, BSM, operation="posterior_fossa_hypoplasia")
    out = vol.voxels.copy()
    if iterations <= 0:
        return vol.with_voxels(out)

    # erosion only shrinks the union, so its box with a one-voxel frame holds every step
    window = box_of((vol.voxels == CBM) | (vol.voxels == BSM)).slices(margin=1, dims=vol.dims)
    local = vol.voxels[window]
    cbm, bsm = local == CBM, local == BSM
    footprint = Sphere(1).footprint()

    for step in range(int(iterations)):
        eroded = erode_array(cbm | bsm, footprint)
        cand_cbm, cand_bsm = cbm & eroded, bsm & eroded
        next_cbm = cand_cbm if _keeps_shape(cand_cbm, cand_bsm) else cbm
        next_bsm = cand_bsm if _keeps_shape(cand_bsm, next_cbm) else bsm
        if not (next_cbm ^ cbm).any() and not (next_bsm ^ bsm).any():
            logger.debug(f"hypoplasia guard rejected both structures at iteration {step + 1}")
            break
        cbm, bsm = next_cbm, next_bsm

    vacated = ((local == CBM) & ~cbm) | ((local == BSM) & ~bsm)
    block = out[window]
    block[vacated] = CSF
    return vol.with_voxels(out)
