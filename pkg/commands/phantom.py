import click

from logger import get_logger
from nifti_io import write_volume
from phantom import generate_phantom
from schemas.configs import PhantomSpec

from .utils import census_lines, load_model

logger = get_logger(__name__)


@click.command("phantom")
@click.argument("spec_path", type=click.Path(dir_okay=False))
@click.argument("out_path", type=click.Path(dir_okay=False))
@click.option("--seed", type=int, default=None, help="Overrides the seed in SPEC_PATH.")
def phantom_command(spec_path: str, out_path: str, seed: int):
    """Generate a procedural 8-class phantom and print its label census."""
    spec = load_model(PhantomSpec, spec_path)
    vol = generate_phantom(spec, seed=seed)
    write_volume(vol, out_path)
    for line in census_lines(vol):
        click.echo(line)
