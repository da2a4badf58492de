import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Sequence, TypeVar

from augmentations.plan import apply_plan, sample_plan
from logger import get_logger
from nifti_io import read_labels, write_volume
from schemas.configs import AugmentationConfig, SynthConfig
from schemas.reports import SampleRecord
from synthesis import synthesize
from volume.types import LabelVolume

from .utils import to_canvas

logger = get_logger(__name__)

Job = TypeVar("Job")
Result = TypeVar("Result")


@dataclass(frozen=True)
class SampleJob:
    index: int
    input_path: str
    seed: int
    augmentation: AugmentationConfig
    synthesis: SynthConfig
    conform: bool
    image_dir: str
    label_dir: str


@lru_cache(maxsize=4)
def _load_input(path: str, conform: bool) -> LabelVolume:
    # cached per worker process; volumes are never mutated in place
    return to_canvas(read_labels(path), conform)


def sample_paths(job: SampleJob) -> tuple:
    name = f"sample_{job.index:04d}.nii.gz"
    return os.path.join(job.image_dir, name), os.path.join(job.label_dir, name)


def run_sample(job: SampleJob) -> SampleRecord:
    """augment -> synthesize -> write, for one sample. Depends only on the job."""
    labels = _load_input(job.input_path, job.conform)
    plan = sample_plan(job.augmentation, job.seed)
    augmented, skipped = apply_plan(labels, plan)
    image, target = synthesize(augmented, job.synthesis, job.seed)

    image_path, label_path = sample_paths(job)
    write_volume(image, image_path)
    write_volume(target, label_path)
    logger.info(f"sample {job.index}: seed {job.seed}, plan {plan.summary() or ['identity']}")
    return SampleRecord(index=job.index, input_path=job.input_path, seed=job.seed,
                        applied=plan.applied, plan=plan.summary(), skipped=skipped,
                        image_path=image_path, label_path=label_path)


def run_pool(fn: Callable[[Job], Result], jobs: Sequence[Job], workers: int) -> List[Result]:
    """Results come back in job order whatever the worker count."""
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))
