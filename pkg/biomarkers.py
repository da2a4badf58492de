"""Corpus callosum biomarkers: length, volume, deviations, growth-curve fits."""
from typing import Optional, Sequence, Tuple

import numpy as np

from Utils.errors import DegenerateDesign, GAOutOfRange
from logger import get_logger
from schemas.configs import NormativeCurve
from schemas.reports import BiomarkerReport, GrowthFitReport
from volume.types import LabelVolume, TissueLabel

logger = get_logger(__name__)

CC = int(TissueLabel.CC)


def cc_length(vol: LabelVolume) -> Tuple[float, Optional[str]]:
    """Posterior-anterior extent of the CC, projected on that axis (mm).
    Empty CC gives 0.0 with the cc-absent flag."""
    cc = vol.voxels == CC
    if not cc.any():
        return 0.0, "cc-absent"
    axis, _ = vol.axis("PA")
    others = tuple(a for a in range(3) if a != axis)
    present = np.flatnonzero(cc.any(axis=others))
    return float(present[-1] - present[0]) * vol.spacing[axis], None


def cc_volume(vol: LabelVolume) -> float:
    return vol.count(CC) * vol.voxel_volume


def delta_length(pred: LabelVolume, gt: LabelVolume) -> Tuple[float, Optional[str]]:
    """|length(pred) - length(gt)|; an absent gt CC counts as length 0 (cca flag)."""
    pred.require_same_grid(gt)
    pred_length, _ = cc_length(pred)
    gt_length, gt_flag = cc_length(gt)
    return abs(pred_length - gt_length), ("cca" if gt_flag else None)


def delta_growth(length_mm: float, ga_weeks: float, curve: NormativeCurve) -> float:
    if not curve.covers(ga_weeks):
        raise GAOutOfRange(f"GA {ga_weeks} outside curve range {curve.ga_range}")
    return abs(length_mm - curve.expected(ga_weeks))


def biomarker_report(seg: LabelVolume, ga_weeks: Optional[float] = None,
                     curve: Optional[NormativeCurve] = None, gt: Optional[LabelVolume] = None,
                     subject: str = "") -> BiomarkerReport:
    """Delta fields stay empty when their inputs are unavailable or flagged."""
    length, flag = cc_length(seg)
    flags = [flag] if flag else []

    d_length = None
    if gt is not None:
        d_length, gt_flag = delta_length(seg, gt)
        if gt_flag:
            flags.append(gt_flag)

    d_growth = None
    if ga_weeks is not None and curve is not None and not flag:
        d_growth = delta_growth(length, ga_weeks, curve)

    return BiomarkerReport(subject=subject, ga_weeks=ga_weeks, cc_length_mm=length,
                           cc_volume_mm3=cc_volume(seg), delta_length_mm=d_length,
                           delta_growth_mm=d_growth, flags=flags)


# ---------------------------------------------------------------------------
# Growth curves
# ---------------------------------------------------------------------------

def fit_growth_quadratic(points: Sequence[Tuple[float, float]]) -> Tuple[Tuple[float, float, float], float]:
    """Least-squares value = a0 + a1*GA + a2*GA^2. Solved by normal equations
    on GA centered at its mean, then expanded back. Returns the coefficients
    and the RMS residual."""
    data = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    ga, value = data[:, 0], data[:, 1]
    if len(np.unique(ga)) < 3:
        raise DegenerateDesign(f"quadratic fit needs 3 distinct GA values, got {len(np.unique(ga))}")

    center = ga.mean()
    t = ga - center
    design = np.stack([np.ones_like(t), t, t * t], axis=1)
    normal = design.T @ design
    if np.linalg.matrix_rank(normal) < 3:
        raise DegenerateDesign("design matrix is rank deficient")
    b0, b1, b2 = np.linalg.solve(normal, design.T @ value)

    # value = b0 + b1 (GA - c) + b2 (GA - c)^2
    a0 = b0 - b1 * center + b2 * center * center
    a1 = b1 - 2.0 * b2 * center
    a2 = b2
    residual = value - (b0 + b1 * t + b2 * t * t)
    rms = float(np.sqrt(np.mean(residual ** 2)))
    return (float(a0), float(a1), float(a2)), rms


def growth_fit_report(points: Sequence[Tuple[float, float]], column: str) -> GrowthFitReport:
    coefficients, rms = fit_growth_quadratic(points)
    ga = [p[0] for p in points]
    logger.info(f"fitted {column} over {len(points)} points: coefficients {coefficients}, rms {rms:.4f}")
    return GrowthFitReport(column=column, coefficients=coefficients, residual_rms=rms,
                           n_points=len(points), ga_range=(min(ga), max(ga)))
