from pydantic import BaseModel, Field
from typing import Dict, List, Optional, Tuple, Union

ParamValue = Union[int, float, str]


# ======================
# Augmentation
# ======================

class PlanStep(BaseModel):
    kind: str
    severity: float
    params: Dict[str, ParamValue] = {}

    def summary(self) -> str:
        args = ", ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
                         for k, v in self.params.items())
        return f"{self.kind}({args})"


class AugmentationPlan(BaseModel):
    seed: int
    applied: bool
    steps: List[PlanStep] = []

    def summary(self) -> List[str]:
        return [step.summary() for step in self.steps]


# ======================
# Segmentation report
# ======================

CSV_COLUMNS = ["subject", "class_code", "class_name", "dice", "hd95_mm", "vs", "ed", "flags"]


class ClassMetrics(BaseModel):
    class_code: int
    class_name: str
    dice: Optional[float] = None
    hd95_mm: Optional[float] = None
    vs: Optional[float] = None
    ed: Optional[int] = None
    flags: List[str] = []


class GlobalMetrics(BaseModel):
    gdsc: Optional[float] = None
    mean_hd95_mm: Optional[float] = None
    mean_vs: Optional[float] = None
    mean_ed: Optional[float] = None
    absent_classes: List[int] = []
    excluded: Dict[str, int] = {}


class SegReport(BaseModel):
    subject: str = ""
    classes: List[int]
    merge_cc_into_wm: bool = False
    rows: List[ClassMetrics]
    summary: GlobalMetrics

    def row(self, class_code: int) -> Optional[ClassMetrics]:
        return next((r for r in self.rows if r.class_code == class_code), None)

    def to_records(self) -> List[dict]:
        """One record per class plus the global row, keyed by CSV_COLUMNS."""
        records = [
            {"subject": self.subject, "class_code": str(r.class_code), "class_name": r.class_name,
             "dice": r.dice, "hd95_mm": r.hd95_mm, "vs": r.vs, "ed": r.ed, "flags": ";".join(r.flags)}
            for r in self.rows
        ]
        excluded = ";".join(f"{k}-excluded={v}" for k, v in self.summary.excluded.items() if v)
        records.append({
            "subject": self.subject, "class_code": "all", "class_name": "global",
            "dice": self.summary.gdsc, "hd95_mm": self.summary.mean_hd95_mm,
            "vs": self.summary.mean_vs, "ed": self.summary.mean_ed, "flags": excluded,
        })
        return records


class MetricSummary(BaseModel):
    mean: Optional[float] = None
    std: Optional[float] = None
    n: int = 0
    excluded: int = 0


class CohortRow(BaseModel):
    class_code: int
    class_name: str
    dice: MetricSummary
    hd95_mm: MetricSummary
    vs: MetricSummary
    ed: MetricSummary


class CohortSummary(BaseModel):
    subjects: int
    rows: List[CohortRow]


# ======================
# Biomarkers
# ======================

BIOMARKER_COLUMNS = ["subject", "GA", "length_mm", "volume_mm3", "delta_length_mm", "delta_growth_mm", "flags"]


class BiomarkerReport(BaseModel):
    subject: str = ""
    ga_weeks: Optional[float] = None
    cc_length_mm: float = Field(ge=0)
    cc_volume_mm3: float = Field(ge=0)
    delta_length_mm: Optional[float] = None
    delta_growth_mm: Optional[float] = None
    flags: List[str] = []

    def to_record(self) -> dict:
        return {
            "subject": self.subject, "GA": self.ga_weeks, "length_mm": self.cc_length_mm,
            "volume_mm3": self.cc_volume_mm3, "delta_length_mm": self.delta_length_mm,
            "delta_growth_mm": self.delta_growth_mm, "flags": ";".join(self.flags),
        }


class GrowthFitReport(BaseModel):
    column: str
    coefficients: Tuple[float, float, float]  # a0, a1, a2
    residual_rms: float
    n_points: int
    ga_range: Tuple[float, float]


# ======================
# Batch generation
# ======================

class SampleRecord(BaseModel):
    index: int
    input_path: str
    seed: int
    applied: bool
    plan: List[str] = []
    skipped: List[str] = []
    image_path: str
    label_path: str


class RunManifest(BaseModel):
    tool_version: str
    config_hash: str
    master_seed: int
    count: int
    samples: List[SampleRecord] = []
    wall_time_s: float = 0.0
