from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Dict, List, Literal, Optional, Tuple

Range = Tuple[float, float]


def _check_range(name: str, value: Range, lower: float = 0.0) -> Range:
    lo, hi = value
    if lo > hi:
        raise ValueError(f"{name}: range [{lo}, {hi}] is not ordered")
    if lo < lower:
        raise ValueError(f"{name}: range [{lo}, {hi}] must be >= {lower}")
    return value


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ======================
# Augmentation config
# ======================

TransformKind = Literal[
    "complete_agenesis",
    "partial_agenesis",
    "cc_thinning",
    "cc_thickening",
    "cc_kink",
    "cortex_thickening",
    "cortex_thinning",
    "cortex_smoothing",
    "posterior_fossa_hypoplasia",
    "ventriculomegaly",
]
TRANSFORM_KINDS: Tuple[str, ...] = TransformKind.__args__


class TransformSettings(StrictModel):
    weight: float = Field(default=1.0, ge=0)

    @model_validator(mode="after")
    def validate_ranges(self):
        for name, value in self:
            if isinstance(value, tuple) and len(value) == 2:
                _check_range(name, value)
        return self


class PartialAgenesisSettings(TransformSettings):
    fraction: Range = (0.2, 0.8)
    ends: List[Literal["anterior", "posterior"]] = Field(default=["anterior", "posterior"], min_length=1)

    @field_validator("fraction")
    @classmethod
    def fraction_open_interval(cls, value):
        if not (0.0 < value[0] and value[1] < 1.0):
            raise ValueError("fraction range must lie inside (0, 1)")
        return value


class ThinningSettings(TransformSettings):
    iterations: Range = (1, 3)


class ThickeningSettings(TransformSettings):
    radius: Range = (1, 3)


class KinkSettings(TransformSettings):
    amplitude_mm: Range = (0.5, 3.0)
    cycles: Range = (0.5, 2.0)

    @field_validator("cycles")
    @classmethod
    def cycles_positive(cls, value):
        if value[0] <= 0:
            raise ValueError("cycles must be > 0")
        return value


class CortexSettings(TransformSettings):
    radius: Range = (1, 2)


class HypoplasiaSettings(TransformSettings):
    iterations: Range = (1, 3)


class VentriculomegalySettings(TransformSettings):
    magnitude_mm: Range = (1.0, 6.0)
    sigma_mm: Range = (4.0, 10.0)
    laterality: List[Literal["left", "right", "bilateral"]] = Field(
        default=["left", "right", "bilateral"], min_length=1)

    @field_validator("sigma_mm")
    @classmethod
    def sigma_positive(cls, value):
        if value[0] <= 0:
            raise ValueError("sigma must be > 0")
        return value


class AugmentationConfig(StrictModel):
    """Label-space augmentation settings. Ranges are in voxels (iterations,
    radii), mm (amplitudes, magnitudes, sigmas) or unitless (fraction, cycles).
    Defaults are placeholders, not published values."""
    p_augment: float = Field(default=0.5, ge=0, le=1)
    max_transforms: int = Field(default=3, ge=1)

    complete_agenesis: TransformSettings = TransformSettings()
    partial_agenesis: PartialAgenesisSettings = PartialAgenesisSettings()
    cc_thinning: ThinningSettings = ThinningSettings()
    cc_thickening: ThickeningSettings = ThickeningSettings()
    cc_kink: KinkSettings = KinkSettings()
    cortex_thickening: CortexSettings = CortexSettings()
    cortex_thinning: CortexSettings = CortexSettings()
    cortex_smoothing: CortexSettings = CortexSettings()
    posterior_fossa_hypoplasia: HypoplasiaSettings = HypoplasiaSettings()
    ventriculomegaly: VentriculomegalySettings = VentriculomegalySettings()

    @model_validator(mode="after")
    def validate_weights(self):
        if not any(w > 0 for w in self.weights().values()):
            raise ValueError("at least one transform needs a positive weight")
        return self

    def weights(self) -> Dict[str, float]:
        return {kind: getattr(self, kind).weight for kind in TRANSFORM_KINDS}

    def settings_for(self, kind: str) -> TransformSettings:
        return getattr(self, kind)


# ======================
# Synthesis config
# ======================

class LabelIntensity(StrictModel):
    mean: Range
    std: Range

    @model_validator(mode="after")
    def validate_ranges(self):
        _check_range("mean", self.mean)
        _check_range("std", self.std)
        return self


def _default_label_intensities() -> Dict[int, LabelIntensity]:
    # background dark and tight; tissue means overlap on purpose
    table = {0: ((0.0, 0.05), (0.0, 0.01))}
    for code in range(1, 9):
        table[code] = ((0.1, 1.0), (0.0, 0.05))
    return {code: LabelIntensity(mean=m, std=s) for code, (m, s) in table.items()}


class SynthConfig(StrictModel):
    labels: Dict[int, LabelIntensity] = Field(default_factory=_default_label_intensities)
    blur_sigma_mm: Range = (0.0, 0.5)
    bias_amplitude: Range = (0.0, 0.4)
    bias_scale_mm: float = Field(default=32.0, gt=0)
    slice_thickness_mm: Range = (0.5, 3.0)
    noise_std: Range = (0.0, 0.05)
    gamma: Range = (0.7, 1.4)

    @model_validator(mode="after")
    def validate_ranges(self):
        missing = set(range(9)) - set(self.labels)
        extra = set(self.labels) - set(range(9))
        if missing or extra:
            raise ValueError(f"labels must cover codes 0..8 exactly (missing {sorted(missing)}, extra {sorted(extra)})")
        for name in ("blur_sigma_mm", "bias_amplitude", "slice_thickness_mm", "noise_std", "gamma"):
            _check_range(name, getattr(self, name))
        if self.gamma[0] <= 0:
            raise ValueError("gamma range must be > 0")
        return self


# ======================
# Phantom spec
# ======================

Vec3 = Tuple[float, float, float]


class PhantomSpec(StrictModel):
    """Geometry in mm relative to the grid center, axes (left-right,
    posterior-anterior, inferior-superior). `scale` multiplies every mm
    quantity so small test grids can reuse the default anatomy."""
    dims: Tuple[int, int, int] = (256, 256, 256)
    spacing: Vec3 = (0.5, 0.5, 0.5)
    scale: float = Field(default=1.0, gt=0)

    head_semi_axes_mm: Vec3 = (38.0, 48.0, 36.0)
    csf_thickness_mm: float = Field(default=3.0, gt=0)
    cortex_thickness_mm: float = Field(default=2.5, gt=0)

    ventricle_semi_axes_mm: Vec3 = (5.0, 18.0, 6.0)
    ventricle_offset_mm: float = Field(default=8.0, gt=0)
    ventricle_center_mm: Tuple[float, float] = (0.0, 2.0)

    sgm_center_mm: Vec3 = (0.0, 2.0, -4.0)
    sgm_semi_axes_mm: Vec3 = (10.0, 10.0, 6.0)

    cc_span_mm: float = Field(default=36.0, gt=0)
    cc_thickness_mm: float = Field(default=4.0, gt=0)
    cc_height_mm: float = Field(default=6.0, ge=0)
    cc_base_mm: float = 10.0
    cc_halfwidth_mm: float = Field(default=6.0, gt=0)

    cbm_center_mm: Vec3 = (0.0, -24.0, -14.0)
    cbm_semi_axes_mm: Vec3 = (15.0, 7.5, 6.5)
    bsm_center_mm: Vec3 = (0.0, -12.0, -17.0)
    bsm_semi_axes_mm: Vec3 = (5.0, 6.0, 8.0)

    perturbation_mm: float = Field(default=1.0, ge=0)
    perturbation_scale_mm: float = Field(default=16.0, gt=0)
    seed: int = 0

    @field_validator("dims")
    @classmethod
    def dims_positive(cls, value):
        if any(n < 1 for n in value):
            raise ValueError("dims must be positive")
        return value

    @field_validator("spacing", "head_semi_axes_mm", "ventricle_semi_axes_mm", "sgm_semi_axes_mm",
                     "cbm_semi_axes_mm", "bsm_semi_axes_mm")
    @classmethod
    def positive_vector(cls, value):
        if any(v <= 0 for v in value):
            raise ValueError("values must be > 0")
        return value


# ======================
# Label maps and normative curves
# ======================

class LabelMap(StrictModel):
    name: str
    strict: bool = True
    map: Dict[int, int]

    @field_validator("map")
    @classmethod
    def validate_codes(cls, value):
        for src, tgt in value.items():
            if not 0 <= src <= 255:
                raise ValueError(f"source code {src} outside 0..255")
            if not 0 <= tgt <= 8:
                raise ValueError(f"target code {tgt} outside 0..8")
        return value


class NormativeCurve(StrictModel):
    """Expected CC length (mm) as a function of gestational age (weeks)."""
    kind: Literal["quadratic", "table"]
    coefficients: Optional[Tuple[float, float, float]] = None  # a0 + a1*GA + a2*GA^2
    knots: Optional[List[Tuple[float, float]]] = None  # (GA, length)
    ga_range: Tuple[float, float]
    source: str = ""

    @model_validator(mode="after")
    def validate_curve(self):
        lo, hi = self.ga_range
        if lo > hi:
            raise ValueError("ga_range is not ordered")
        if self.kind == "quadratic":
            if self.coefficients is None:
                raise ValueError("quadratic curve needs coefficients")
            a0, a1, a2 = self.coefficients
            # derivative is linear in GA, so checking both ends covers the interval
            if min(a1 + 2 * a2 * lo, a1 + 2 * a2 * hi) < -1e-12:
                raise ValueError("curve must be non-decreasing over ga_range")
        else:
            if not self.knots or len(self.knots) < 2:
                raise ValueError("table curve needs at least two knots")
            ga = [k[0] for k in self.knots]
            values = [k[1] for k in self.knots]
            if any(b <= a for a, b in zip(ga, ga[1:])):
                raise ValueError("knot GAs must be strictly increasing")
            if any(b < a for a, b in zip(values, values[1:])):
                raise ValueError("knot lengths must be non-decreasing")
            if lo < ga[0] or hi > ga[-1]:
                raise ValueError("ga_range must lie within the knots")
        return self

    def covers(self, ga: float) -> bool:
        return self.ga_range[0] <= ga <= self.ga_range[1]

    def expected(self, ga: float) -> float:
        if self.kind == "quadratic":
            a0, a1, a2 = self.coefficients
            return a0 + a1 * ga + a2 * ga * ga
        ga_knots = [k[0] for k in self.knots]
        values = [k[1] for k in self.knots]
        for i in range(len(ga_knots) - 1):
            g0, g1 = ga_knots[i], ga_knots[i + 1]
            if g0 <= ga <= g1:
                t = (ga - g0) / (g1 - g0)
                return values[i] + t * (values[i + 1] - values[i])
        raise ValueError(f"GA {ga} outside the knots")
