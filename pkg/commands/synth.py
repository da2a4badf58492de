import json
import os
import time
from typing import List

import click

from Utils.errors import ConfigError
from config import settings
from logger import get_logger
from schemas.configs import AugmentationConfig, SynthConfig
from schemas.reports import RunManifest

from .poolUtils import SampleJob, run_pool, run_sample
from .utils import config_hash, derive_seed, ensure_parent, load_model, write_json

logger = get_logger(__name__)


def read_inputs(path: str) -> List[str]:
    """A label volume, or a .jsonl batch file with one {"input": path} per line."""
    if not path.endswith(".jsonl"):
        return [path]
    inputs = []
    try:
        with open(path) as handle:
            for number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                entry = json.loads(line)
                if "input" not in entry:
                    raise ConfigError(f"{path}:{number}: missing 'input'")
                inputs.append(str(entry["input"]))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read batch file {path}: {e}")
    if not inputs:
        raise ConfigError(f"batch file {path} lists no inputs")
    return inputs


@click.command("synth")
@click.argument("in_path", type=click.Path(dir_okay=False))
@click.argument("out_img", type=click.Path(file_okay=False))
@click.argument("out_lbl", type=click.Path(file_okay=False))
@click.option("--config", "config_path", type=click.Path(dir_okay=False),
              default=settings.AUGMENTATION_CONFIG, show_default=True)
@click.option("--synth-config", "synth_path", type=click.Path(dir_okay=False),
              default=settings.SYNTH_CONFIG, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Master seed.")
@click.option("--count", type=click.IntRange(min=0), default=1, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=None,
              help="Worker processes (default: CALLOSIM_WORKERS or 1).")
@click.option("--manifest", "manifest_path", type=click.Path(dir_okay=False), default=None,
              help="Manifest location (default: OUT_IMG/manifest.json).")
@click.option("--conform/--no-conform", default=True, show_default=True)
def synth_command(in_path: str, out_img: str, out_lbl: str, config_path: str, synth_path: str,
                  seed: int, count: int, workers: int, manifest_path: str, conform: bool):
    """Generate COUNT augmented, synthesized (image, label) pairs."""
    augmentation = load_model(AugmentationConfig, config_path)
    synthesis = load_model(SynthConfig, synth_path)
    inputs = read_inputs(in_path)
    workers = workers or settings.DEFAULT_WORKERS

    for directory in (out_img, out_lbl):
        ensure_parent(os.path.join(directory, "sample"))

    jobs = [
        SampleJob(index=i, input_path=inputs[i % len(inputs)], seed=derive_seed(seed, i),
                  augmentation=augmentation, synthesis=synthesis, conform=conform,
                  image_dir=out_img, label_dir=out_lbl)
        for i in range(count)
    ]
    started = time.perf_counter()
    records = run_pool(run_sample, jobs, workers)

    manifest = RunManifest(
        tool_version=settings.TOOL_VERSION,
        config_hash=config_hash(augmentation, synthesis),
        master_seed=seed,
        count=count,
        samples=records,
        wall_time_s=round(time.perf_counter() - started, 3),
    )
    write_json(manifest, manifest_path or os.path.join(out_img, "manifest.json"))
    applied = sum(r.applied for r in records)
    logger.info(f"Generated {count} samples with {workers} worker(s)")
    click.echo(f"samples: {count}, augmented: {applied}")
