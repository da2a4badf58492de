"""Grid types shared by every module: label/intensity volumes, masks,
structuring elements, displacement fields and Betti triples."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Literal, NamedTuple, Tuple

import numpy as np

from Utils.errors import LabelOutOfRange, MetadataMismatch

Dims = Tuple[int, int, int]
Spacing = Tuple[float, float, float]
Orientation = Tuple[str, str, str]
AnatomicalAxis = Literal["LR", "PA", "IS"]

# axis code -> (anatomical axis, sign of the direction the index grows toward)
_AXIS_CODES = {
    "R": ("LR", 1), "L": ("LR", -1),
    "A": ("PA", 1), "P": ("PA", -1),
    "S": ("IS", 1), "I": ("IS", -1),
}
RAS: Orientation = ("R", "A", "S")


class TissueLabel(IntEnum):
    BACKGROUND = 0
    CSF = 1
    GM = 2
    WM = 3
    VM = 4
    CBM = 5
    SGM = 6
    BSM = 7
    CC = 8


MAX_LABEL = int(max(TissueLabel))


def normalize_spacing(spacing) -> Spacing:
    # float32 is what pixdim stores; normalizing here keeps NIfTI round trips exact
    values = tuple(float(np.float32(s)) for s in spacing)
    if len(values) != 3 or any(not s > 0 for s in values):
        raise ValueError(f"spacing must be three positive values, got {spacing}")
    return values  # type: ignore[return-value]


def _normalize_orientation(orientation) -> Orientation:
    codes = tuple(str(c).upper() for c in orientation)
    if len(codes) != 3 or any(c not in _AXIS_CODES for c in codes):
        raise ValueError(f"invalid orientation {orientation}")
    if len({_AXIS_CODES[c][0] for c in codes}) != 3:
        raise ValueError(f"orientation {orientation} must name each anatomical axis once")
    return codes  # type: ignore[return-value]


@dataclass(frozen=True, eq=False)
class Grid:
    """Geometry and voxels of a 3D volume. Voxels are indexed [x, y, z]."""
    voxels: np.ndarray
    spacing: Spacing = (1.0, 1.0, 1.0)
    orientation: Orientation = RAS
    description: str = ""

    def __post_init__(self):
        if self.voxels.ndim != 3:
            raise ValueError(f"expected a 3D array, got shape {self.voxels.shape}")
        object.__setattr__(self, "spacing", normalize_spacing(self.spacing))
        object.__setattr__(self, "orientation", _normalize_orientation(self.orientation))

    @property
    def dims(self) -> Dims:
        return tuple(int(n) for n in self.voxels.shape)  # type: ignore[return-value]

    @property
    def voxel_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis(self, anatomical: AnatomicalAxis) -> Tuple[int, int]:
        """Grid axis carrying an anatomical axis, and +1 if indices grow toward
        R/A/S (-1 toward L/P/I)."""
        for index, code in enumerate(self.orientation):
            name, sign = _AXIS_CODES[code]
            if name == anatomical:
                return index, sign
        raise ValueError(anatomical)

    def same_grid(self, other: "Grid") -> bool:
        return (self.dims == other.dims and self.spacing == other.spacing
                and self.orientation == other.orientation)

    def require_same_grid(self, other: "Grid") -> None:
        if not self.same_grid(other):
            raise MetadataMismatch(
                f"grid mismatch: {self.dims}@{self.spacing} {''.join(self.orientation)} vs "
                f"{other.dims}@{other.spacing} {''.join(other.orientation)}"
            )

    def with_voxels(self, voxels: np.ndarray):
        return replace(self, voxels=voxels)


@dataclass(frozen=True, eq=False)
class LabelVolume(Grid):
    def __post_init__(self):
        super().__post_init__()
        voxels = np.asarray(self.voxels)
        if voxels.dtype != np.uint8:
            if voxels.size and (voxels.min() < 0 or voxels.max() > 255):
                raise LabelOutOfRange("label codes must fit in uint8")
            voxels = voxels.astype(np.uint8)
        if voxels.size and int(voxels.max()) > MAX_LABEL:
            raise LabelOutOfRange(f"label code {int(voxels.max())} exceeds {MAX_LABEL}")
        object.__setattr__(self, "voxels", voxels)

    def mask(self, *labels: int) -> np.ndarray:
        if len(labels) == 1:
            return self.voxels == labels[0]
        return np.isin(self.voxels, labels)

    def count(self, label: int) -> int:
        return int(np.count_nonzero(self.voxels == label))

    def census(self) -> dict:
        counts = np.bincount(self.voxels.ravel(), minlength=MAX_LABEL + 1)
        return {TissueLabel(code).name: int(counts[code]) for code in range(MAX_LABEL + 1)}


@dataclass(frozen=True, eq=False)
class RawLabelVolume(Grid):
    """Label volume in a foreign annotation protocol (codes 0..255)."""

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "voxels", np.asarray(self.voxels).astype(np.uint8, copy=False))


@dataclass(frozen=True, eq=False)
class IntensityVolume(Grid):
    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "voxels", np.asarray(self.voxels, dtype=np.float32))


@dataclass(frozen=True, eq=False)
class BinaryMask(Grid):
    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "voxels", np.asarray(self.voxels, dtype=bool))

    @classmethod
    def like(cls, grid: Grid, voxels: np.ndarray) -> "BinaryMask":
        return cls(voxels=voxels, spacing=grid.spacing, orientation=grid.orientation)

    @property
    def empty(self) -> bool:
        return not self.voxels.any()

    def popcount(self) -> int:
        return int(np.count_nonzero(self.voxels))

    def complement(self) -> "BinaryMask":
        return self.with_voxels(~self.voxels)


class VoxelBox(NamedTuple):
    lo: Dims
    hi: Dims  # inclusive

    def slices(self, margin: int = 0, dims: Dims | None = None) -> Tuple[slice, slice, slice]:
        lo = [l - margin for l in self.lo]
        hi = [h + margin + 1 for h in self.hi]
        if dims is not None:
            lo = [max(0, l) for l in lo]
            hi = [min(n, h) for n, h in zip(dims, hi)]
        return tuple(slice(l, h) for l, h in zip(lo, hi))  # type: ignore[return-value]

    def extent(self, axis: int) -> int:
        return self.hi[axis] - self.lo[axis] + 1


class BettiTriple(NamedTuple):
    b0: int
    b1: int
    b2: int

    @property
    def euler(self) -> int:
        return self.b0 - self.b1 + self.b2


# ---------------------------------------------------------------------------
# Structuring elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Line:
    axis: AnatomicalAxis
    length: int = 3

    def __post_init__(self):
        if self.length < 1 or self.length % 2 == 0:
            raise ValueError("line length must be odd and >= 1")

    def footprint(self, orientation: Orientation = RAS) -> np.ndarray:
        grid_axis = [_AXIS_CODES[c][0] for c in orientation].index(self.axis)
        shape = [1, 1, 1]
        shape[grid_axis] = self.length
        return np.ones(shape, dtype=bool)


@dataclass(frozen=True)
class Sphere:
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("sphere radius must be >= 0")

    def footprint(self, orientation: Orientation = RAS) -> np.ndarray:
        r = int(math.floor(self.radius))
        offsets = np.arange(-r, r + 1)
        x, y, z = np.meshgrid(offsets, offsets, offsets, indexing="ij")
        return (x * x + y * y + z * z) <= self.radius * self.radius


@dataclass(frozen=True)
class Box:
    half_extents: Dims = (1, 1, 1)

    def footprint(self, orientation: Orientation = RAS) -> np.ndarray:
        return np.ones(tuple(2 * h + 1 for h in self.half_extents), dtype=bool)


StructuringElement = Line | Sphere | Box


def reflect(footprint: np.ndarray) -> np.ndarray:
    return footprint[::-1, ::-1, ::-1]


# ---------------------------------------------------------------------------
# Displacement fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DisplacementField:
    """Backward displacement in mm: output at x samples input at x - u(x).
    `vectors` has shape dims + (3,), components ordered by grid axis."""
    vectors: np.ndarray
    spacing: Spacing
    orientation: Orientation
    max_magnitude: float = math.inf

    def __post_init__(self):
        if self.vectors.ndim != 4 or self.vectors.shape[-1] != 3:
            raise ValueError("displacement vectors must have shape (nx, ny, nz, 3)")
        object.__setattr__(self, "spacing", normalize_spacing(self.spacing))
        object.__setattr__(self, "orientation", _normalize_orientation(self.orientation))

    @classmethod
    def zeros(cls, grid: Grid, max_magnitude: float = 0.0) -> "DisplacementField":
        return cls(np.zeros(grid.dims + (3,), dtype=np.float32), grid.spacing,
                   grid.orientation, max_magnitude)

    @property
    def dims(self) -> Dims:
        return tuple(int(n) for n in self.vectors.shape[:3])  # type: ignore[return-value]

    def matches(self, grid: Grid) -> bool:
        return (self.dims == grid.dims and self.spacing == grid.spacing
                and self.orientation == grid.orientation)

    def magnitude(self) -> np.ndarray:
        return np.sqrt(np.sum(self.vectors.astype(np.float64) ** 2, axis=-1))

    def support(self) -> VoxelBox | None:
        nonzero = np.any(self.vectors != 0, axis=-1)
        if not nonzero.any():
            return None
        from volume.distance import box_of
        return box_of(nonzero)

    def validate(self) -> None:
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("displacement field has non-finite components")
        if np.isfinite(self.max_magnitude) and self.magnitude().max(initial=0.0) > self.max_magnitude + 1e-6:
            raise ValueError("displacement exceeds declared max magnitude")


