"""Strict readers for the experiment CSV files.

Each reader checks the header against the schema it declares and hands back
the columns as numpy arrays.  Values are parsed, never transformed: means,
bounds and log columns are plotted exactly as written upstream.
"""

import csv
from pathlib import Path

import numpy as np

from .figspec import SpecError

SCHEMAS = {
    "sample_paths_trials": ("ell", "trial", "q", "err", "deflated"),
    "sample_paths_mean": ("ell", "q", "mean_err"),
    "burn_in_mean": ("series", "q", "mean_err"),
    "bound_check_prob": ("ell", "q", "eps", "trials", "p_hat",
                         "wilson_halfwidth", "prob_gapfree", "prob_gap",
                         "prob_best"),
    "bound_check_expect": ("ell", "q", "trials", "mean_err", "stderr",
                           "expect_gapfree", "expect_gap", "expect_best"),
    "srank_profile": ("series", "nu", "srk", "log_srk"),
}


def read_table(path, schema: str) -> dict:
    """Columns of one CSV as float arrays, keyed by header name."""
    expected = SCHEMAS[schema]
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != expected:
        found = ",".join(rows[0]) if rows else "nothing"
        raise SpecError(f"{path} does not match the {schema} schema: "
                        f"expected header {','.join(expected)}, found {found}")
    body = rows[1:]
    if not body:
        raise SpecError(f"{path} has no data rows; refusing to draw an empty figure")
    width = len(expected)
    for i, row in enumerate(body, start=2):
        if len(row) != width:
            raise SpecError(f"{path} line {i} has {len(row)} fields, expected {width}")
    try:
        data = np.array([[float(v) for v in row] for row in body])
    except ValueError as exc:
        raise SpecError(f"{path} holds a non-numeric value: {exc}")
    return {name: data[:, j] for j, name in enumerate(expected)}


def read_column_pair(path, x_name: str, y_name: str) -> tuple:
    """Two named columns from an arbitrary CSV, for reference overlays."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SpecError(f"{path} is empty")
    header = rows[0]
    for name in (x_name, y_name):
        if name not in header:
            raise SpecError(f"{path} has no column {name!r}; header is "
                            f"{','.join(header)}")
    xi, yi = header.index(x_name), header.index(y_name)
    body = rows[1:]
    if not body:
        raise SpecError(f"{path} has no data rows")
    try:
        x = np.array([float(row[xi]) for row in body])
        y = np.array([float(row[yi]) for row in body])
    except (ValueError, IndexError) as exc:
        raise SpecError(f"{path} overlay columns are malformed: {exc}")
    return x, y
