"""Seeded augmentation plans: which transforms to apply, in which order, with
which parameters."""
import math
from typing import Callable, Dict, List, Tuple

import numpy as np

from Utils.errors import NoTargetStructure
from augmentations.callosum import (cc_kink, cc_thickening, cc_thinning, complete_agenesis,
                                    partial_agenesis)
from augmentations.cortex import cortex_smoothing, cortex_thickening, cortex_thinning
from augmentations.fossa import posterior_fossa_hypoplasia
from augmentations.ventricles import ventriculomegaly
from logger import get_logger
from schemas.configs import TRANSFORM_KINDS, AugmentationConfig
from schemas.reports import AugmentationPlan, PlanStep
from volume.types import LabelVolume

logger = get_logger(__name__)

TRANSFORMS: Dict[str, Callable[..., LabelVolume]] = {
    "complete_agenesis": complete_agenesis,
    "partial_agenesis": partial_agenesis,
    "cc_thinning": cc_thinning,
    "cc_thickening": cc_thickening,
    "cc_kink": cc_kink,
    "cortex_thickening": cortex_thickening,
    "cortex_thinning": cortex_thinning,
    "cortex_smoothing": cortex_smoothing,
    "posterior_fossa_hypoplasia": posterior_fossa_hypoplasia,
    "ventriculomegaly": ventriculomegaly,
}

# transform -> (range field, parameter name, integer?)
_SEVERITY_PARAMS = {
    "partial_agenesis": [("fraction", "fraction", False)],
    "cc_thinning": [("iterations", "iterations", True)],
    "cc_thickening": [("radius", "radius", True)],
    "cc_kink": [("amplitude_mm", "amplitude_mm", False), ("cycles", "cycles", False)],
    "cortex_thickening": [("radius", "radius", True)],
    "cortex_thinning": [("radius", "radius", True)],
    "cortex_smoothing": [("radius", "radius", True)],
    "posterior_fossa_hypoplasia": [("iterations", "iterations", True)],
    "ventriculomegaly": [("magnitude_mm", "magnitude_mm", False), ("sigma_mm", "sigma_mm", False)],
}


def _scale(bounds: Tuple[float, float], severity: float, integer: bool):
    lo, hi = bounds
    value = lo + severity * (hi - lo)
    if integer:
        return int(math.floor(value + 0.5))
    return float(value)


def resolve_step(kind: str, config: AugmentationConfig, rng: np.random.Generator) -> PlanStep:
    """Draw a severity and map it linearly onto every range of the transform;
    categorical choices are drawn after it from the same stream."""
    settings = config.settings_for(kind)
    severity = float(rng.random())
    params = {name: _scale(getattr(settings, field), severity, integer)
              for field, name, integer in _SEVERITY_PARAMS.get(kind, [])}
    if kind == "partial_agenesis":
        params["end"] = str(rng.choice(settings.ends))
    elif kind == "cc_kink":
        params["phase"] = float(rng.uniform(0.0, 2.0 * np.pi))
    elif kind == "ventriculomegaly":
        params["laterality"] = str(rng.choice(settings.laterality))
    return PlanStep(kind=kind, severity=severity, params=params)


def sample_plan(config: AugmentationConfig, seed: int) -> AugmentationPlan:
    rng = np.random.default_rng(seed)
    applied = bool(rng.random() < config.p_augment)
    if not applied:
        return AugmentationPlan(seed=seed, applied=False)

    weights = config.weights()
    kinds = [k for k in TRANSFORM_KINDS if weights[k] > 0]
    p = np.array([weights[k] for k in kinds], dtype=np.float64)
    count = int(rng.integers(1, min(config.max_transforms, len(kinds)) + 1))
    chosen = rng.choice(len(kinds), size=count, replace=False, p=p / p.sum())

    steps = [resolve_step(kinds[i], config, rng) for i in chosen]
    plan = AugmentationPlan(seed=seed, applied=True, steps=steps)
    logger.debug(f"seed {seed}: plan {plan.summary()}")
    return plan


def apply_plan(vol: LabelVolume, plan: AugmentationPlan) -> Tuple[LabelVolume, List[str]]:
    """Apply the steps in order. A step whose target structure is missing is
    skipped and noted instead of failing the plan."""
    skipped: List[str] = []
    for step in plan.steps:
        try:
            vol = TRANSFORMS[step.kind](vol, **step.params)
        except NoTargetStructure as e:
            note = f"{step.kind}: {e.detail}"
            logger.warning(f"Skipped {note}")
            skipped.append(note)
    return vol, skipped


def augment(vol: LabelVolume, config: AugmentationConfig, seed: int) -> Tuple[LabelVolume, AugmentationPlan, List[str]]:
    plan = sample_plan(config, seed)
    out, skipped = apply_plan(vol, plan)
    return out, plan, skipped
