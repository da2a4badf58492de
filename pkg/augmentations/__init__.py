from augmentations.callosum import (cc_kink, cc_thickening, cc_thinning, complete_agenesis,
                                    kink_field, partial_agenesis)
from augmentations.cortex import cortex_smoothing, cortex_thickening, cortex_thinning
from augmentations.fossa import posterior_fossa_hypoplasia
from augmentations.plan import TRANSFORMS, apply_plan, augment, sample_plan
from augmentations.ventricles import ventricle_field, ventriculomegaly

__all__ = [
    "TRANSFORMS", "apply_plan", "augment", "cc_kink", "cc_thickening", "cc_thinning",
    "complete_agenesis", "cortex_smoothing", "cortex_thickening", "cortex_thinning",
    "kink_field", "partial_agenesis", "posterior_fossa_hypoplasia", "sample_plan",
    "ventricle_field", "ventriculomegaly",
]
