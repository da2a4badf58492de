"""Procedural 8-class fetal brain phantom.

Nested ellipsoids (CSF shell, GM ribbon, WM bulk) with smoothly perturbed
boundaries, a subcortical core, a ventricle system (two laterals joined by a
midline third ventricle), a corpus callosum arch, cerebellum and brainstem.
Geometry is in mm around the grid center; the grid is RAS.
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from Utils.errors import InfeasibleSpec
from logger import get_logger
from schemas.configs import PhantomSpec
from volume.noise import low_frequency_noise
from volume.topology import betti_numbers, count_components
from volume.types import RAS, BinaryMask, LabelVolume, TissueLabel

logger = get_logger(__name__)

# third ventricle relative to the lateral ventricle center (PA, IS) and its
# half-widths beyond the lateral offset (LR) / absolute (PA, IS), mm before scaling
THIRD_VENTRICLE_SHIFT_MM = (-2.0, -3.0)
THIRD_VENTRICLE_SEMI_MM = (1.0, 3.0, 2.0)
SURFACE_SAMPLES = 512


class Ellipsoid:
    def __init__(self, center: Sequence[float], semi: Sequence[float]):
        self.center = np.asarray(center, dtype=np.float64)
        self.semi = np.asarray(semi, dtype=np.float64)

    def radius(self, coords) -> np.ndarray:
        """Normalized radius: 1 on the surface."""
        return np.sqrt(sum(((c - m) / a) ** 2 for c, m, a in zip(coords, self.center, self.semi)))

    def surface(self, count: int = SURFACE_SAMPLES) -> np.ndarray:
        # Fibonacci lattice on the unit sphere
        k = np.arange(count) + 0.5
        polar = np.arccos(1.0 - 2.0 * k / count)
        azimuth = np.pi * (1.0 + 5.0 ** 0.5) * k
        unit = np.stack([np.cos(azimuth) * np.sin(polar), np.sin(azimuth) * np.sin(polar), np.cos(polar)], axis=1)
        return self.center + unit * self.semi


class Layout:
    """All structures of a spec, in scaled mm."""

    def __init__(self, spec: PhantomSpec):
        s = spec.scale
        self.spec = spec
        self.head = Ellipsoid((0, 0, 0), np.multiply(spec.head_semi_axes_mm, s))
        self.brain = Ellipsoid((0, 0, 0), self.head.semi - spec.csf_thickness_mm * s)
        self.wm = Ellipsoid((0, 0, 0), self.brain.semi - spec.cortex_thickness_mm * s)
        self.sgm = Ellipsoid(np.multiply(spec.sgm_center_mm, s), np.multiply(spec.sgm_semi_axes_mm, s))

        pa, is_ = spec.ventricle_center_mm
        offset = spec.ventricle_offset_mm
        self.ventricles = [
            Ellipsoid(np.multiply((side * offset, pa, is_), s), np.multiply(spec.ventricle_semi_axes_mm, s))
            for side in (-1, 1)
        ]
        self.ventricles.append(Ellipsoid(
            np.multiply((0.0, pa + THIRD_VENTRICLE_SHIFT_MM[0], is_ + THIRD_VENTRICLE_SHIFT_MM[1]), s),
            np.multiply((offset + THIRD_VENTRICLE_SEMI_MM[0],) + THIRD_VENTRICLE_SEMI_MM[1:], s),
        ))
        self.cbm = Ellipsoid(np.multiply(spec.cbm_center_mm, s), np.multiply(spec.cbm_semi_axes_mm, s))
        self.bsm = Ellipsoid(np.multiply(spec.bsm_center_mm, s), np.multiply(spec.bsm_semi_axes_mm, s))

        self.cc_span = spec.cc_span_mm * s
        self.cc_thickness = spec.cc_thickness_mm * s
        self.cc_height = spec.cc_height_mm * s
        self.cc_base = spec.cc_base_mm * s
        self.cc_halfwidth = spec.cc_halfwidth_mm * s
        self.perturbation = spec.perturbation_mm * s
        self.perturbation_scale = spec.perturbation_scale_mm * s

    def arch_height(self, y: np.ndarray) -> np.ndarray:
        return self.cc_base + self.cc_height * (1.0 - (2.0 * y / self.cc_span) ** 2)

    def arch_outline(self, count: int = 64) -> np.ndarray:
        y = np.linspace(-self.cc_span / 2, self.cc_span / 2, count)
        h = self.arch_height(y)
        points = [np.stack([np.full_like(y, x), y, h + dz], axis=1)
                  for x in (-self.cc_halfwidth, self.cc_halfwidth)
                  for dz in (-self.cc_thickness / 2, self.cc_thickness / 2)]
        return np.concatenate(points)

    def inner_surfaces(self) -> List[Tuple[str, np.ndarray]]:
        named = [("SGM", self.sgm), ("VM", self.ventricles[0]), ("VM", self.ventricles[1]),
                 ("VM", self.ventricles[2]), ("CBM", self.cbm), ("BSM", self.bsm)]
        return [(name, e.surface()) for name, e in named] + [("CC", self.arch_outline())]


def check_feasible(spec: PhantomSpec) -> None:
    """Every structure must sit inside its parent with at least one voxel of clearance."""
    layout = Layout(spec)
    voxel = max(spec.spacing)

    if np.any(layout.wm.semi <= 0):
        raise InfeasibleSpec("CSF and cortex thicknesses exceed the head semi-axes")
    for axis, (n, s) in enumerate(zip(spec.dims, spec.spacing)):
        half = (n - 1) / 2.0 * s
        if layout.head.semi[axis] + voxel > half:
            raise InfeasibleSpec(f"head does not fit the grid along axis {axis}: "
                                 f"{layout.head.semi[axis]:.2f} mm vs {half:.2f} mm")

    # the perturbed brain surface moves by up to perturbation * (max/min semi-axis)
    stretch = layout.brain.semi.max() / layout.brain.semi.min()
    if spec.csf_thickness_mm * spec.scale < layout.perturbation * stretch + voxel:
        raise InfeasibleSpec("CSF shell is thinner than the boundary perturbation plus one voxel")
    if spec.cortex_thickness_mm * spec.scale < voxel:
        raise InfeasibleSpec("cortical ribbon is thinner than one voxel")

    limit = 1.0 - (layout.perturbation + voxel) / layout.wm.semi.min()
    for name, points in layout.inner_surfaces():
        worst = float(layout.wm.radius(points.T).max())
        if worst > limit:
            raise InfeasibleSpec(f"{name} reaches outside the white matter (normalized radius "
                                 f"{worst:.3f} > {limit:.3f})")


def _grid_coords(spec: PhantomSpec, window=None) -> list:
    """Per-axis mm coordinates, shaped for broadcasting."""
    if window is None:
        window = tuple(slice(0, n) for n in spec.dims)
    coords = []
    for axis, (sl, n, s) in enumerate(zip(window, spec.dims, spec.spacing)):
        shape = [1, 1, 1]
        shape[axis] = sl.stop - sl.start
        coords.append(((np.arange(sl.start, sl.stop) - (n - 1) / 2.0) * s).reshape(shape))
    return coords


def _window(spec: PhantomSpec, lo_mm: Sequence[float], hi_mm: Sequence[float]) -> tuple:
    slices = []
    for lo, hi, n, s in zip(lo_mm, hi_mm, spec.dims, spec.spacing):
        center = (n - 1) / 2.0
        start = max(0, int(np.floor(lo / s + center)) - 1)
        stop = min(n, int(np.ceil(hi / s + center)) + 2)
        slices.append(slice(start, max(start, stop)))
    return tuple(slices)


def _paint(labels: np.ndarray, spec: PhantomSpec, e: Ellipsoid, code: int) -> None:
    window = _window(spec, e.center - e.semi, e.center + e.semi)
    inside = e.radius(_grid_coords(spec, window)) <= 1.0
    labels[window][inside] = code


def _paint_arch(labels: np.ndarray, spec: PhantomSpec, layout: Layout) -> None:
    half = layout.cc_span / 2
    top = layout.cc_base + max(layout.cc_height, 0.0) + layout.cc_thickness / 2
    bottom = layout.cc_base + min(layout.cc_height, 0.0) - layout.cc_thickness / 2
    window = _window(spec, (-layout.cc_halfwidth, -half, bottom), (layout.cc_halfwidth, half, top))
    x, y, z = _grid_coords(spec, window)
    inside = ((np.abs(x) <= layout.cc_halfwidth) & (np.abs(y) <= half)
              & (np.abs(z - layout.arch_height(y)) <= layout.cc_thickness / 2))
    labels[window][inside] = int(TissueLabel.CC)


def _verify(vol: LabelVolume) -> None:
    missing = [name for name, count in vol.census().items() if count == 0]
    if missing:
        raise InfeasibleSpec(f"phantom lacks labels {missing}")
    for code in range(1, len(TissueLabel)):
        pieces = count_components(vol.voxels == code, 26)
        if pieces != 1:
            raise InfeasibleSpec(f"{TissueLabel(code).name} splits into {pieces} components")
    cc = betti_numbers(BinaryMask.like(vol, vol.voxels == int(TissueLabel.CC)))
    if tuple(cc) != (1, 0, 0):
        raise InfeasibleSpec(f"CC topology {tuple(cc)} is not a solid arch")


def generate_phantom(spec: PhantomSpec, seed: Optional[int] = None) -> LabelVolume:
    check_feasible(spec)
    seed = spec.seed if seed is None else seed
    layout = Layout(spec)
    labels = np.zeros(tuple(spec.dims), dtype=np.uint8)
    coords = _grid_coords(spec)

    labels[layout.head.radius(coords) <= 1.0] = int(TissueLabel.CSF)

    # one noise field displaces both the pial and the white matter surface
    rng = np.random.default_rng(seed)
    delta = layout.perturbation * low_frequency_noise(spec.dims, spec.spacing, layout.perturbation_scale, rng)
    for shell, code in ((layout.brain, TissueLabel.GM), (layout.wm, TissueLabel.WM)):
        labels[(shell.radius(coords) - 1.0) * shell.semi.min() <= delta] = int(code)
    del delta

    _paint(labels, spec, layout.sgm, int(TissueLabel.SGM))
    for ventricle in layout.ventricles:
        _paint(labels, spec, ventricle, int(TissueLabel.VM))
    _paint_arch(labels, spec, layout)
    _paint(labels, spec, layout.cbm, int(TissueLabel.CBM))
    _paint(labels, spec, layout.bsm, int(TissueLabel.BSM))

    vol = LabelVolume(voxels=labels, spacing=spec.spacing, orientation=RAS,
                      description=f"callosim phantom seed={seed}")
    _verify(vol)
    logger.info(f"Generated phantom {vol.dims}@{vol.spacing} seed={seed}")
    return vol
