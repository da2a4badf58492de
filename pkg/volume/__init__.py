from volume.distance import bounding_box, surface_distances
from volume.morphology import close, dilate, erode, extract_mask
from volume.resample import conform
from volume.topology import betti_numbers, connected_components, euler_characteristic
from volume.types import (
    BettiTriple, BinaryMask, Box, DisplacementField, IntensityVolume, LabelVolume, Line,
    RawLabelVolume, Sphere, StructuringElement, TissueLabel, VoxelBox,
)
from volume.warp import warp_labels

__all__ = [
    "BettiTriple", "BinaryMask", "Box", "DisplacementField", "IntensityVolume", "LabelVolume",
    "Line", "RawLabelVolume", "Sphere", "StructuringElement", "TissueLabel", "VoxelBox",
    "betti_numbers", "bounding_box", "close", "conform", "connected_components", "dilate",
    "erode", "euler_characteristic", "extract_mask", "surface_distances", "warp_labels",
]
