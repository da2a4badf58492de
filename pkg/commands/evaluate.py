import click

from Utils.errors import ConfigError
from logger import get_logger
from metrics import evaluate
from nifti_io import read_labels
from schemas.reports import CSV_COLUMNS

from .utils import parse_classes, subject_name, write_json, write_table

logger = get_logger(__name__)


def _fmt(value) -> str:
    return "n/a" if value is None else f"{value:.4f}"


@click.command("evaluate")
@click.argument("gt_path", type=click.Path(dir_okay=False))
@click.argument("pred_path", type=click.Path(dir_okay=False))
@click.option("--classes", default=None, help="Comma separated class codes (default: 1..8).")
@click.option("--merge-cc-wm", is_flag=True, help="Relabel CC as WM in both volumes first.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Report destination, .csv or .json.")
@click.option("--subject", default=None, help="Subject id (default: prediction file name).")
def evaluate_command(gt_path: str, pred_path: str, classes: str, merge_cc_wm: bool, out_path: str, subject: str):
    """Score a predicted segmentation against its ground truth."""
    class_list = parse_classes(classes)
    if out_path and not out_path.endswith((".csv", ".json")):
        raise ConfigError(f"--out must end in .csv or .json, got {out_path}")

    gt, pred = read_labels(gt_path), read_labels(pred_path)
    report = evaluate(gt, pred, classes=class_list, merge_cc_into_wm=merge_cc_wm,
                      subject=subject or subject_name(pred_path))

    if out_path and out_path.endswith(".csv"):
        write_table(report.to_records(), CSV_COLUMNS, out_path)
    elif out_path:
        write_json(report, out_path)

    s = report.summary
    click.echo(f"gDSC {_fmt(s.gdsc)}  HD95 {_fmt(s.mean_hd95_mm)} mm  VS {_fmt(s.mean_vs)}  ED {_fmt(s.mean_ed)}")
    for row in report.rows:
        flags = f"  [{', '.join(row.flags)}]" if row.flags else ""
        click.echo(f"{row.class_name:<4} dice {_fmt(row.dice)}  hd95 {_fmt(row.hd95_mm)}  "
                   f"vs {_fmt(row.vs)}  ed {row.ed}{flags}")
