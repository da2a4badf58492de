import click

from augmentations.plan import apply_plan, sample_plan
from config import settings
from logger import get_logger
from nifti_io import read_labels, write_volume
from schemas.configs import AugmentationConfig

from .utils import census_lines, load_model, to_canvas, write_json

logger = get_logger(__name__)


@click.command("augment")
@click.argument("in_path", type=click.Path(dir_okay=False))
@click.argument("out_path", type=click.Path(dir_okay=False))
@click.option("--config", "config_path", type=click.Path(dir_okay=False),
              default=settings.AUGMENTATION_CONFIG, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--plan-out", type=click.Path(dir_okay=False), default=None,
              help="Write the sampled plan as JSON.")
@click.option("--conform/--no-conform", default=True, show_default=True,
              help="Resample onto the canonical 0.5 mm, 256^3 canvas first.")
def augment_command(in_path: str, out_path: str, config_path: str, seed: int, plan_out: str, conform: bool):
    """Sample an augmentation plan and apply it to a label volume."""
    config = load_model(AugmentationConfig, config_path)
    vol = to_canvas(read_labels(in_path), conform)

    plan = sample_plan(config, seed)
    augmented, skipped = apply_plan(vol, plan)
    write_volume(augmented, out_path)
    if plan_out:
        write_json(plan, plan_out)

    logger.info(f"Augmented {in_path} with seed {seed}: {plan.summary() or ['identity']}")
    click.echo(f"plan: {', '.join(plan.summary()) or 'identity'}")
    for note in skipped:
        click.echo(f"skipped: {note}")
    for line in census_lines(augmented):
        click.echo(line)
