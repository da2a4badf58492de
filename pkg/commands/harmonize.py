import click

from Utils.errors import UnsupportedDatatype
from harmonize import BUILTIN_MAPS, load_label_map, remap
from nifti_io import read_volume, write_volume
from volume.types import RawLabelVolume

from .utils import census_lines


@click.command("harmonize")
@click.argument("in_path", type=click.Path(dir_okay=False))
@click.argument("out_path", type=click.Path(dir_okay=False))
@click.option("--map", "map_name", default="drawem-to-feta", show_default=True,
              help=f"Built-in map ({', '.join(BUILTIN_MAPS)}) or a JSON label map.")
def harmonize_command(in_path: str, out_path: str, map_name: str):
    """Remap a label volume from another annotation protocol to the 8-class scheme."""
    label_map = load_label_map(map_name)
    raw = read_volume(in_path, raw_codes=True)
    if not isinstance(raw, RawLabelVolume):
        raise UnsupportedDatatype(f"{in_path}: expected a uint8 label volume")
    vol = remap(raw, label_map)
    write_volume(vol, out_path)
    for line in census_lines(vol):
        click.echo(line)
