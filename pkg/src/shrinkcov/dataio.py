"""Reading and writing numeric tables."""

import csv
import io

import numpy as np

from ._errors import DataError

LAYOUTS = ("observations", "variables")


def _split_lines(text, delimiter):
    if delimiter is None:
        return [line.split() for line in text.splitlines() if line.strip()]
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    return [[c.strip() for c in row] for row in reader if any(c.strip() for c in row)]


def read_table(path, delimiter=",", has_header=False):
    """Parse a rectangular numeric table.

    ``delimiter=None`` splits on runs of whitespace. Returns ``(values, header)``
    where ``header`` is the first row's cells or ``None``. Error messages give
    1-based file coordinates.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    rows = _split_lines(text, delimiter)
    header = None
    offset = 1
    if has_header and rows:
        header, rows = rows[0], rows[1:]
        offset = 2
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(rows[0])
    out = np.empty((len(rows), width))
    for r, row in enumerate(rows):
        if len(row) != width:
            raise DataError(
                f"{path}: ragged table, row {r + offset} has {len(row)} fields, expected {width}"
            )
        for c, cell in enumerate(row):
            try:
                out[r, c] = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: non-numeric cell {cell!r} at row {r + offset}, column {c + 1}"
                ) from None
    if not np.all(np.isfinite(out)):
        r, c = np.argwhere(~np.isfinite(out))[0]
        raise DataError(f"{path}: non-finite value at row {r + offset}, column {c + 1}")
    return out, header


def orient(values, layout):
    if layout not in LAYOUTS:
        raise DataError(f"unknown layout {layout!r}; expected one of {LAYOUTS}")
    return values if layout == "observations" else np.ascontiguousarray(values.T)


def load_matrix(path, layout="observations", delimiter=",", has_header=False):
    """Load an observations-by-variables data matrix from a delimited file.

    ``layout="variables"`` means each file row is one variable and the table is
    transposed on load.
    """
    values, _ = read_table(path, delimiter=delimiter, has_header=has_header)
    return orient(values, layout)


def read_labels(path):
    """Group labels, one per observation, separated by newlines, commas or blanks."""
    with open(path, encoding="utf-8") as fh:
        tokens = fh.read().replace(",", " ").split()
    if not tokens:
        raise DataError(f"{path}: no labels")
    return tokens


def format_float(v):
    """Shortest decimal string that round-trips to the same double."""
    return repr(float(v))


def write_matrix(matrix, fh, delimiter=","):
    for row in np.asarray(matrix):
        fh.write(delimiter.join(format_float(v) for v in row))
        fh.write("\n")
