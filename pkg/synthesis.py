"""Domain-randomized intensity synthesis from label volumes.

Pipeline: per-label Gaussian intensities, blur, multiplicative bias field,
thick-slice degradation, additive noise, gamma contrast, min-max
normalization. Every random draw comes from a stream keyed by
(seed, stage, label), so a sample never depends on other samples, on the
worker that produced it, or on which other labels are present.
"""
from typing import Sequence, Tuple

import numpy as np
from scipy import ndimage

from logger import get_logger
from schemas.configs import SynthConfig
from volume.noise import low_frequency_noise
from volume.types import RAS, IntensityVolume, LabelVolume, MAX_LABEL, Orientation

logger = get_logger(__name__)

STAGE_INTENSITY = 0
STAGE_BLUR = 1
STAGE_BIAS = 2
STAGE_RESOLUTION = 3
STAGE_NOISE = 4
STAGE_GAMMA = 5

# sigma (in low-res voxels) of a Gaussian whose FWHM is one voxel: 1 / (2 * sqrt(2 ln 2))
FWHM_TO_SIGMA = 0.4247


def stream(seed: int, stage: int, label: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stage, label)))


def _uniform(rng: np.random.Generator, bounds: Tuple[float, float]) -> float:
    lo, hi = bounds
    return float(lo) if lo == hi else float(rng.uniform(lo, hi))


def _min_max(values: np.ndarray) -> np.ndarray:
    lo, hi = float(values.min()), float(values.max())
    if hi - lo <= 0:
        return np.zeros_like(values)
    return np.clip((values - lo) / (hi - lo), 0.0, 1.0)


def sample_intensities(vol: LabelVolume, cfg: SynthConfig, seed: int) -> IntensityVolume:
    out = np.zeros(vol.dims, dtype=np.float64)
    for code in range(MAX_LABEL + 1):
        mask = vol.voxels == code
        count = int(np.count_nonzero(mask))
        if count == 0:
            continue
        rng = stream(seed, STAGE_INTENSITY, code)
        entry = cfg.labels[code]
        mu, sigma = _uniform(rng, entry.mean), _uniform(rng, entry.std)
        out[mask] = rng.normal(mu, sigma, size=count) if sigma > 0 else mu
    return IntensityVolume(voxels=out, spacing=vol.spacing, orientation=vol.orientation)


def bias_field(dims: Sequence[int], spacing: Sequence[float], amplitude: float, scale_mm: float,
               seed: int, orientation: Orientation = RAS) -> IntensityVolume:
    """exp(B) with B smooth noise whose largest knot has magnitude `amplitude`.

    Between knots B is a linear blend, so max |B| over voxels is at most
    `amplitude`; it is reached only when knots fall on voxel centers, i.e.
    when (knots - 1) divides (dims - 1) along every axis.
    """
    if amplitude < 0:
        raise ValueError(f"bias amplitude must be >= 0, got {amplitude}")
    if amplitude == 0:
        return IntensityVolume(voxels=np.ones(tuple(dims), dtype=np.float32), spacing=spacing,
                               orientation=orientation)
    noise = low_frequency_noise(dims, spacing, scale_mm, stream(seed, STAGE_BIAS))
    return IntensityVolume(voxels=np.exp(amplitude * noise), spacing=spacing, orientation=orientation)


def degrade_resolution(img: IntensityVolume, acq_spacing: Sequence[float], seed: int) -> IntensityVolume:
    """Simulate acquisition at `acq_spacing`: blur to the coarser point spread,
    sample the coarse grid at a random sub-voxel phase, interpolate back."""
    ratios = [float(a) / s for a, s in zip(acq_spacing, img.spacing)]
    if any(r < 1.0 - 1e-6 for r in ratios):
        raise ValueError(f"acquisition spacing {tuple(acq_spacing)} is finer than {img.spacing}")
    if all(r <= 1.0 + 1e-6 for r in ratios):
        return img.with_voxels(img.voxels.copy())

    rng = stream(seed, STAGE_RESOLUTION, 1)
    ratios = [max(r, 1.0) for r in ratios]
    sigmas = [FWHM_TO_SIGMA * np.sqrt(r * r - 1.0) for r in ratios]
    phases = [float(rng.uniform(0.0, r - 1.0)) if r > 1.0 else 0.0 for r in ratios]

    blurred = ndimage.gaussian_filter(img.voxels.astype(np.float64), sigmas, mode="nearest")
    coarse_dims = [max(1, int(np.floor((n - 1 - p) / r)) + 1) for n, p, r in zip(img.dims, phases, ratios)]
    coarse = ndimage.affine_transform(blurred, ratios, offset=phases, output_shape=coarse_dims,
                                      order=1, mode="nearest")
    restored = ndimage.affine_transform(coarse, [1.0 / r for r in ratios],
                                        offset=[-p / r for p, r in zip(phases, ratios)],
                                        output_shape=img.dims, order=1, mode="nearest")
    return img.with_voxels(restored.astype(np.float32))


def synthesize(vol: LabelVolume, cfg: SynthConfig, seed: int) -> Tuple[IntensityVolume, LabelVolume]:
    """Returns the synthetic image and the untouched input labels."""
    img = sample_intensities(vol, cfg, seed)
    values = img.voxels.astype(np.float64)

    blur_mm = _uniform(stream(seed, STAGE_BLUR), cfg.blur_sigma_mm)
    if blur_mm > 0:
        values = ndimage.gaussian_filter(values, [blur_mm / s for s in vol.spacing], mode="nearest")

    amplitude = _uniform(stream(seed, STAGE_BIAS, 1), cfg.bias_amplitude)
    values = values * bias_field(vol.dims, vol.spacing, amplitude, cfg.bias_scale_mm, seed).voxels

    rng = stream(seed, STAGE_RESOLUTION)
    axis = int(rng.integers(3))
    acq = list(vol.spacing)
    acq[axis] = max(acq[axis], _uniform(rng, cfg.slice_thickness_mm))
    values = degrade_resolution(img.with_voxels(values), acq, seed).voxels.astype(np.float64)

    rng = stream(seed, STAGE_NOISE)
    noise_std = _uniform(rng, cfg.noise_std)
    if noise_std > 0:
        values = values + rng.normal(0.0, noise_std, size=values.shape)

    lo, hi = cfg.gamma
    gamma = float(np.exp(_uniform(stream(seed, STAGE_GAMMA), (np.log(lo), np.log(hi)))))
    values = _min_max(_min_max(values) ** gamma)

    logger.debug(f"seed {seed}: blur {blur_mm:.3f} mm, bias {amplitude:.3f}, acq {tuple(acq)}, "
                 f"noise {noise_std:.4f}, gamma {gamma:.3f}")
    return img.with_voxels(values.astype(np.float32)), vol
