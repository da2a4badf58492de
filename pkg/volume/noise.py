"""Smooth low-frequency noise: random knots on a coarse lattice, upsampled
linearly. Shared by the bias field and the phantom boundary perturbation."""
from typing import Sequence

import numpy as np
from scipy import ndimage


def knot_counts(dims: Sequence[int], spacing: Sequence[float], scale_mm: float) -> tuple:
    """Knots per axis so that neighboring knots are at least `scale_mm` apart."""
    return tuple(max(2, int(np.floor((n - 1) * s / scale_mm)) + 1) for n, s in zip(dims, spacing))


def upsample_linear(coarse: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """Linear interpolation of a knot lattice whose corner knots sit on the grid corners."""
    matrix = [(c - 1) / (n - 1) if n > 1 else 0.0 for c, n in zip(coarse.shape, dims)]
    return ndimage.affine_transform(coarse, matrix, offset=0.0, output_shape=tuple(dims),
                                    order=1, mode="nearest")


def low_frequency_noise(dims: Sequence[int], spacing: Sequence[float], scale_mm: float,
                        rng: np.random.Generator) -> np.ndarray:
    """Smooth field with values in [-1, 1]; the largest knot has magnitude 1."""
    knots = rng.uniform(-1.0, 1.0, size=knot_counts(dims, spacing, scale_mm))
    peak = np.abs(knots).max()
    if peak > 0:
        knots = knots / peak
    return upsample_linear(knots, dims)
