import click

from biomarkers import biomarker_report
from logger import get_logger
from nifti_io import read_labels
from schemas.configs import NormativeCurve
from schemas.reports import BIOMARKER_COLUMNS

from .utils import load_model, subject_name, write_table

logger = get_logger(__name__)


@click.command("biomarker")
@click.argument("seg_path", type=click.Path(dir_okay=False))
@click.option("--ga", "ga_weeks", type=float, default=None, help="Gestational age in weeks.")
@click.option("--curve", "curve_path", type=click.Path(dir_okay=False), default=None,
              help="Normative CC length curve (JSON).")
@click.option("--gt", "gt_path", type=click.Path(dir_okay=False), default=None,
              help="Ground truth segmentation for the length deviation.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None, help="CSV destination.")
@click.option("--subject", default=None)
def biomarker_command(seg_path: str, ga_weeks: float, curve_path: str, gt_path: str, out_path: str, subject: str):
    """CC length and volume of a segmentation, with optional deviations."""
    curve = load_model(NormativeCurve, curve_path) if curve_path else None
    seg = read_labels(seg_path)
    gt = read_labels(gt_path) if gt_path else None

    report = biomarker_report(seg, ga_weeks=ga_weeks, curve=curve, gt=gt,
                              subject=subject or subject_name(seg_path))
    if out_path:
        write_table([report.to_record()], BIOMARKER_COLUMNS, out_path)

    for column, value in report.to_record().items():
        click.echo(f"{column}: {'' if value is None else value}")
