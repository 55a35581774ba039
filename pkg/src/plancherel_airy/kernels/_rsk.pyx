# distutils: language = c++
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Robinson-Schensted row-insertion kernels.

Same contracts as ``_rsk_py``; rows are kept as C++ vectors and the bumping
search is a hand-rolled upper_bound on int64 data.
"""

from libcpp.vector cimport vector

ctypedef long long i64

import numpy as np

cimport numpy as cnp

cnp.import_array()

IMPLEMENTATION = "cython"


cdef inline Py_ssize_t _upper_bound(vector[i64]& row, i64 x) noexcept nogil:
    cdef Py_ssize_t lo = 0
    cdef Py_ssize_t hi = row.size()
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if row[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline void _insert(vector[vector[i64]]& rows, i64 x, Py_ssize_t cap) noexcept nogil:
    cdef Py_ssize_t r = 0
    cdef Py_ssize_t pos
    cdef i64 bumped
    while True:
        if cap > 0 and r == cap:
            return
        if r == <Py_ssize_t>rows.size():
            rows.push_back(vector[i64]())
            rows[r].push_back(x)
            return
        if rows[r].size() == 0 or x > rows[r][rows[r].size() - 1]:
            rows[r].push_back(x)
            return
        pos = _upper_bound(rows[r], x)
        bumped = rows[r][pos]
        rows[r][pos] = x
        x = bumped
        r += 1


cdef cnp.ndarray _lengths(vector[vector[i64]]& rows):
    cdef Py_ssize_t nrows = rows.size()
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(nrows, dtype=np.int64)
    cdef Py_ssize_t i
    for i in range(nrows):
        out[i] = rows[i].size()
    return out


def rsk_shape(values, row_cap=None):
    """Shape (row lengths) of the insertion tableau of ``values``."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] vals = np.ascontiguousarray(values, dtype=np.int64)
    cdef Py_ssize_t cap = 0 if row_cap is None else max(0, int(row_cap))
    cdef vector[vector[i64]] rows
    cdef Py_ssize_t i
    cdef Py_ssize_t n = vals.shape[0]
    with nogil:
        for i in range(n):
            _insert(rows, vals[i], cap)
    return _lengths(rows)


def rsk_shape_snapshots(values, prefix_sizes, row_cap=None):
    """Shapes at the given non-decreasing prefix sizes of ``values``."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] vals = np.ascontiguousarray(values, dtype=np.int64)
    sizes = [int(s) for s in prefix_sizes]
    if any(sizes[i] > sizes[i + 1] for i in range(len(sizes) - 1)):
        raise ValueError("prefix_sizes must be non-decreasing")
    if sizes and sizes[len(sizes) - 1] > vals.shape[0]:
        raise ValueError("prefix size exceeds word length")
    cdef Py_ssize_t cap = 0 if row_cap is None else max(0, int(row_cap))
    cdef vector[vector[i64]] rows
    cdef Py_ssize_t pos = 0
    cdef Py_ssize_t target
    cdef Py_ssize_t r
    cdef cnp.ndarray[cnp.int64_t, ndim=1] snap
    out = []
    for t in sizes:
        target = t
        with nogil:
            while pos < target:
                _insert(rows, vals[pos], cap)
                pos += 1
        snap = np.empty(rows.size(), dtype=np.int64)
        for r in range(<Py_ssize_t>rows.size()):
            snap[r] = rows[r].size()
        out.append(snap)
    return out


def rsk_shapes_bulk(perms, row_cap):
    """First ``row_cap`` row lengths for each row of the 2-D array ``perms``."""
    cdef cnp.ndarray[cnp.int64_t, ndim=2] mat = np.ascontiguousarray(perms, dtype=np.int64)
    cdef Py_ssize_t cap = int(row_cap)
    cdef Py_ssize_t m = mat.shape[0]
    cdef Py_ssize_t n = mat.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] out = np.zeros((m, cap), dtype=np.int64)
    cdef vector[vector[i64]] rows
    cdef Py_ssize_t i, j, r
    with nogil:
        for i in range(m):
            rows.clear()
            for j in range(n):
                _insert(rows, mat[i, j], cap)
            for r in range(<Py_ssize_t>rows.size()):
                out[i, r] = rows[r].size()
    return out
