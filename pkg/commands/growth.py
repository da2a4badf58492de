from typing import List, Tuple

import click
import pandas as pd

from Utils.errors import ConfigError
from biomarkers import growth_fit_report

from .utils import read_table, write_json


def growth_points(frames: List[pd.DataFrame], column: str) -> List[Tuple[float, float]]:
    """(GA, value) pairs from biomarker tables; rows without a GA or a value are skipped."""
    frame = pd.concat(frames, ignore_index=True)
    missing = [c for c in ("GA", column) if c not in frame.columns]
    if missing:
        raise ConfigError(f"biomarker tables lack columns {missing}")
    usable = frame[["GA", column]].apply(pd.to_numeric, errors="coerce").dropna()
    return list(usable.itertuples(index=False, name=None))


@click.command("fit-growth")
@click.argument("tables", nargs=-1, required=True, type=click.Path(dir_okay=False))
@click.option("--column", type=click.Choice(["length_mm", "volume_mm3"]), default="length_mm", show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None, help="JSON destination.")
def fit_growth_command(tables: Tuple[str, ...], column: str, out_path: str):
    """Fit a quadratic growth curve in GA to biomarker CSV rows."""
    points = growth_points([read_table(path) for path in tables], column)
    report = growth_fit_report(points, column)
    if out_path:
        write_json(report, out_path)
    a0, a1, a2 = report.coefficients
    click.echo(f"{column} = {a0:.6g} + {a1:.6g}*GA + {a2:.6g}*GA^2  (rms {report.residual_rms:.4g}, n={report.n_points})")
