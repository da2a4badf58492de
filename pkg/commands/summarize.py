import json
from typing import Tuple

import click
import pandas as pd
from pydantic import ValidationError

from Utils.errors import ConfigError, VolumeReadError
from metrics import aggregate_records
from schemas.reports import CSV_COLUMNS, SegReport

from .utils import read_table, write_json


def _fmt(summary) -> str:
    if summary.mean is None:
        return "n/a"
    return f"{summary.mean:.4f}±{summary.std:.4f}"


def load_records(path: str) -> pd.DataFrame:
    """Report records from an evaluate CSV or JSON report."""
    if path.endswith(".json"):
        try:
            with open(path) as handle:
                report = SegReport.model_validate(json.load(handle))
        except OSError as e:
            raise VolumeReadError(f"cannot read report {path}: {e}")
        except (json.JSONDecodeError, ValidationError) as e:
            raise ConfigError(f"invalid report {path}: {e}")
        return pd.DataFrame.from_records(report.to_records(), columns=CSV_COLUMNS)
    frame = read_table(path)
    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise ConfigError(f"{path} lacks report columns {missing}")
    return frame


@click.command("summarize")
@click.argument("reports", nargs=-1, required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None, help="JSON destination.")
def summarize_command(reports: Tuple[str, ...], out_path: str):
    """Cohort mean and standard deviation per class over evaluate reports."""
    frame = pd.concat([load_records(path) for path in reports], ignore_index=True)
    summary = aggregate_records(frame)
    if out_path:
        write_json(summary, out_path)
    click.echo(f"subjects: {summary.subjects}")
    for row in summary.rows:
        click.echo(f"{row.class_name:<4} dice {_fmt(row.dice)}  hd95 {_fmt(row.hd95_mm)}  "
                   f"vs {_fmt(row.vs)}  ed {_fmt(row.ed)}  excluded {row.dice.excluded}")
