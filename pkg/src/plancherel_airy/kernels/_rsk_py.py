"""Pure-Python Robinson-Schensted row-insertion kernels.

Reference implementation mirrored by the compiled extension in ``_rsk.pyx``;
the two are interchangeable and cross-checked in the test suite.  Row
insertion bumps the smallest entry strictly larger than the inserted value;
with ``row_cap`` set, entries bumped out of the last kept row are discarded,
which leaves the first ``row_cap`` rows identical to the uncapped run.
"""

from bisect import bisect_right

import numpy as np


def _insert(rows, x, row_cap):
    r = 0
    nrows = len(rows)
    while True:
        if row_cap is not None and r == row_cap:
            return
        if r == nrows:
            rows.append([x])
            return
        row = rows[r]
        if x > row[-1]:
            row.append(x)
            return
        pos = bisect_right(row, x)
        row[pos], x = x, row[pos]
        r += 1


def rsk_shape(values, row_cap=None):
    """Shape (row lengths) of the insertion tableau of ``values``."""
    rows = []
    cap = None if row_cap is None or row_cap <= 0 else int(row_cap)
    for x in values:
        _insert(rows, int(x), cap)
    return np.array([len(r) for r in rows], dtype=np.int64)


def rsk_shape_snapshots(values, prefix_sizes, row_cap=None):
    """Shapes at the given increasing prefix sizes of ``values``.

    Returns one int64 row-length array per requested prefix.
    """
    sizes = [int(s) for s in prefix_sizes]
    if any(sizes[i] > sizes[i + 1] for i in range(len(sizes) - 1)):
        raise ValueError("prefix_sizes must be non-decreasing")
    if sizes and sizes[-1] > len(values):
        raise ValueError("prefix size exceeds word length")
    rows = []
    cap = None if row_cap is None or row_cap <= 0 else int(row_cap)
    out = []
    pos = 0
    for target in sizes:
        while pos < target:
            _insert(rows, int(values[pos]), cap)
            pos += 1
        out.append(np.array([len(r) for r in rows], dtype=np.int64))
    return out


def rsk_shapes_bulk(perms, row_cap):
    """First ``row_cap`` row lengths for each row of the 2-D array ``perms``."""
    perms = np.asarray(perms)
    m, n = perms.shape
    cap = int(row_cap)
    out = np.zeros((m, cap), dtype=np.int64)
    for i in range(m):
        shape = rsk_shape(perms[i], cap)
        out[i, : len(shape)] = shape
    return out


IMPLEMENTATION = "python"
