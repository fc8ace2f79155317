"""CSV readers/writers for the CLI surfaces.

Matrix files are plain comma-separated values, no header, one row per line;
vectors are single-column files.  Point-set files are two-column CSVs.
Parse failures report the offending 1-based line number.
"""

import numpy as np

from .errors import ParseError, PreconditionError


def read_matrix_csv(path):
    rows = []
    width = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                row = [float(p) for p in parts]
            except ValueError:
                raise ParseError(f"could not parse {line!r} as numbers", path, lineno)
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ParseError(
                    f"expected {width} columns, found {len(row)}", path, lineno
                )
            rows.append(row)
    if not rows:
        raise ParseError("file is empty", path)
    return np.array(rows)


def read_vector_csv(path):
    mat = read_matrix_csv(path)
    if mat.shape[1] != 1:
        raise ParseError(f"expected a single-column vector, found {mat.shape[1]} columns", path)
    return mat[:, 0]


def read_points_csv(path):
    mat = read_matrix_csv(path)
    if mat.shape[1] != 2:
        raise ParseError(f"expected 2 columns (x, y), found {mat.shape[1]}", path)
    return mat
