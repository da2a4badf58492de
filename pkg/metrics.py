"""Segmentation metrics: generalized Dice, per-class Dice, HD95, volume
similarity and Euler difference. Undefined entries are returned flagged,
never as sentinel numbers."""
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from Utils.errors import AllClassesAbsent, ConfigError
from harmonize import merge_cc_into_wm as merge_cc
from logger import get_logger
from schemas.reports import (ClassMetrics, CohortRow, CohortSummary, GlobalMetrics,
                             MetricSummary, SegReport)
from volume.distance import surface_distances
from volume.topology import euler_characteristic
from volume.types import BettiTriple, BinaryMask, LabelVolume, MAX_LABEL, TissueLabel

logger = get_logger(__name__)

CC_REFERENCE = BettiTriple(1, 0, 0)
ALL_CLASSES: Tuple[int, ...] = tuple(range(1, MAX_LABEL + 1))
MERGED_CLASSES: Tuple[int, ...] = tuple(c for c in ALL_CLASSES if c != int(TissueLabel.CC))
AVERAGED_METRICS = ("dice", "hd95_mm", "vs")


class Flagged(NamedTuple):
    value: Optional[float]
    flag: Optional[str] = None


class ConfusionCounts(NamedTuple):
    tp: int
    fp: int
    fn: int

    @property
    def gt_size(self) -> int:
        return self.tp + self.fn

    @property
    def pred_size(self) -> int:
        return self.tp + self.fp


class GeneralizedDice(NamedTuple):
    value: float
    absent: Tuple[int, ...]


def _empty_flag(gt_size: int, pred_size: int) -> Optional[str]:
    if gt_size == 0 and pred_size == 0:
        return "both-empty"
    if gt_size == 0:
        return "gt-empty"
    if pred_size == 0:
        return "pred-empty"
    return None


def confusion_counts(gt: LabelVolume, pred: LabelVolume, classes: Iterable[int]) -> Dict[int, ConfusionCounts]:
    gt.require_same_grid(pred)
    n = MAX_LABEL + 1
    joint = np.bincount(gt.voxels.ravel().astype(np.int64) * n + pred.voxels.ravel(),
                        minlength=n * n).reshape(n, n)
    counts = {}
    for c in classes:
        tp = int(joint[c, c])
        counts[int(c)] = ConfusionCounts(tp=tp, fp=int(joint[:, c].sum()) - tp, fn=int(joint[c, :].sum()) - tp)
    return counts


def generalized_dice(gt: LabelVolume, pred: LabelVolume, classes: Sequence[int]) -> GeneralizedDice:
    """Class weights 1/|gt_c|^2; classes absent from gt are left out of both sums."""
    if not classes:
        raise ValueError("generalized dice needs at least one class")
    numerator = denominator = 0.0
    absent = []
    for c, k in confusion_counts(gt, pred, classes).items():
        if k.gt_size == 0:
            absent.append(c)
            continue
        w = 1.0 / float(k.gt_size) ** 2
        numerator += w * k.tp
        denominator += w * (2 * k.tp + k.fp + k.fn)
    if len(absent) == len(classes):
        raise AllClassesAbsent(f"none of classes {list(classes)} occur in the ground truth")
    return GeneralizedDice(2.0 * numerator / denominator, tuple(absent))


def dice(gt_mask: BinaryMask, pred_mask: BinaryMask) -> Flagged:
    gt_mask.require_same_grid(pred_mask)
    a, b = gt_mask.popcount(), pred_mask.popcount()
    flag = _empty_flag(a, b)
    if a + b == 0:
        return Flagged(None, flag)
    overlap = int(np.count_nonzero(gt_mask.voxels & pred_mask.voxels))
    return Flagged(2.0 * overlap / (a + b), flag)


def hd95(gt_mask: BinaryMask, pred_mask: BinaryMask) -> Flagged:
    """max of the two directed 95th percentiles (linear interpolation), in mm."""
    gt_mask.require_same_grid(pred_mask)
    flag = _empty_flag(gt_mask.popcount(), pred_mask.popcount())
    if flag:
        return Flagged(None, flag)
    to_pred, to_gt = surface_distances(gt_mask, pred_mask)
    return Flagged(float(max(np.percentile(to_pred, 95), np.percentile(to_gt, 95))))


def volume_similarity(gt_mask: BinaryMask, pred_mask: BinaryMask) -> Flagged:
    gt_mask.require_same_grid(pred_mask)
    g, t = gt_mask.popcount(), pred_mask.popcount()
    flag = _empty_flag(g, t)
    if g + t == 0:
        return Flagged(None, flag)
    return Flagged(1.0 - abs(t - g) / (t + g), flag)


def euler_difference(mask: BinaryMask, reference: BettiTriple = CC_REFERENCE) -> int:
    return abs(reference.euler - euler_characteristic(mask))


def _mask(vol: LabelVolume, code: int) -> BinaryMask:
    return BinaryMask.like(vol, vol.voxels == code)


def class_metrics(gt: LabelVolume, pred: LabelVolume, code: int) -> ClassMetrics:
    gt_mask, pred_mask = _mask(gt, code), _mask(pred, code)
    d, h, v = dice(gt_mask, pred_mask), hd95(gt_mask, pred_mask), volume_similarity(gt_mask, pred_mask)
    # CC is judged against a single solid component; other structures against their own ground truth
    reference = euler_characteristic(gt_mask) if code != int(TissueLabel.CC) else CC_REFERENCE.euler
    ed = abs(reference - euler_characteristic(pred_mask))
    flags = list(dict.fromkeys(m.flag for m in (d, h, v) if m.flag))
    return ClassMetrics(class_code=code, class_name=TissueLabel(code).name, dice=d.value,
                        hd95_mm=h.value, vs=v.value, ed=ed, flags=flags)


def _mean(values: List[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def evaluate(gt: LabelVolume, pred: LabelVolume, classes: Optional[Sequence[int]] = None,
             merge_cc_into_wm: bool = False, subject: str = "") -> SegReport:
    gt.require_same_grid(pred)
    if merge_cc_into_wm:
        gt, pred = merge_cc(gt), merge_cc(pred)
    if classes is None:
        classes = MERGED_CLASSES if merge_cc_into_wm else ALL_CLASSES
    classes = sorted({int(c) for c in classes})
    if merge_cc_into_wm:
        classes = [c for c in classes if c != int(TissueLabel.CC)]
    if any(not 1 <= c <= MAX_LABEL for c in classes):
        raise ConfigError(f"classes must lie in 1..{MAX_LABEL}, got {classes}")
    if not classes:
        raise ConfigError("no classes left to evaluate")

    rows = [class_metrics(gt, pred, c) for c in classes]
    gdsc = generalized_dice(gt, pred, classes)

    # flagged rows stay in the report but not in the averages
    clean = [r for r in rows if not r.flags]
    summary = GlobalMetrics(
        gdsc=gdsc.value,
        mean_hd95_mm=_mean([r.hd95_mm for r in clean if r.hd95_mm is not None]),
        mean_vs=_mean([r.vs for r in clean if r.vs is not None]),
        mean_ed=_mean([float(r.ed) for r in rows]),
        absent_classes=list(gdsc.absent),
        excluded={name: len(rows) - len(clean) for name in AVERAGED_METRICS},
    )
    for r in rows:
        if r.flags:
            logger.warning(f"{subject or 'subject'} {r.class_name}: {', '.join(r.flags)}")
    logger.info(f"{subject or 'subject'}: gDSC {gdsc.value:.4f} over {len(classes) - len(gdsc.absent)} classes")
    return SegReport(subject=subject, classes=classes, merge_cc_into_wm=merge_cc_into_wm,
                     rows=rows, summary=summary)


# ---------------------------------------------------------------------------
# Cohort aggregation
# ---------------------------------------------------------------------------

def _summarize(series: pd.Series, usable: pd.Series) -> MetricSummary:
    values = series[usable].dropna().astype(float)
    return MetricSummary(
        mean=float(values.mean()) if len(values) else None,
        std=float(values.std(ddof=0)) if len(values) else None,
        n=int(len(values)),
        excluded=int(len(series) - len(values)),
    )


def aggregate_records(frame: pd.DataFrame) -> CohortSummary:
    """Per-class mean/std over subjects from report records (CSV rows).
    Entries carrying a flag are excluded and counted."""
    per_class = frame[frame["class_code"].astype(str) != "all"].copy()
    per_class["class_code"] = per_class["class_code"].astype(int)
    per_class["flags"] = per_class["flags"].fillna("").astype(str)

    rows = []
    for code, group in per_class.groupby("class_code", sort=True):
        usable = group["flags"] == ""
        rows.append(CohortRow(
            class_code=int(code),
            class_name=str(group["class_name"].iloc[0]),
            dice=_summarize(group["dice"], usable),
            hd95_mm=_summarize(group["hd95_mm"], usable),
            vs=_summarize(group["vs"], usable),
            ed=_summarize(group["ed"], pd.Series(True, index=group.index)),
        ))
    subjects = int((frame["class_code"].astype(str) == "all").sum())
    return CohortSummary(subjects=subjects, rows=rows)


def aggregate_reports(reports: Sequence[SegReport]) -> CohortSummary:
    records = [record for report in reports for record in report.to_records()]
    return aggregate_records(pd.DataFrame.from_records(records))
