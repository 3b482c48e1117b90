"""Small dense GF(2) routines on numpy uint8 arrays."""

from __future__ import annotations

import numpy as np


class SingularMatrixError(ValueError):
    """Raised when a square GF(2) system has no unique solution.

    ``dependent_rows`` lists row indices whose mod-2 sum is the zero row.
    """

    def __init__(self, message: str, dependent_rows: list[int]):
        super().__init__(message)
        self.dependent_rows = dependent_rows


def _eliminate(a: np.ndarray):
    """Gauss-Jordan on ``[a | I]``.  Returns (reduced, tracker, pivot_rows_by_col, rank)."""
    a = (np.asarray(a, dtype=np.uint8) & 1).copy()
    m, n = a.shape
    track = np.eye(m, dtype=np.uint8)
    row = 0
    pivots = []
    for col in range(n):
        if row == m:
            break
        hits = np.flatnonzero(a[row:, col]) + row
        if hits.size == 0:
            continue
        piv = hits[0]
        if piv != row:
            a[[row, piv]] = a[[piv, row]]
            track[[row, piv]] = track[[piv, row]]
        others = np.flatnonzero(a[:, col])
        others = others[others != row]
        a[others] ^= a[row]
        track[others] ^= track[row]
        pivots.append(col)
        row += 1
    return a, track, pivots, row


def rank(a) -> int:
    return _eliminate(a)[3]


def dependent_rows(a) -> list[int] | None:
    """A nonempty set of rows of ``a`` summing to zero, or None if the rows are independent."""
    reduced, track, _, r = _eliminate(a)
    if r == reduced.shape[0]:
        return None
    return [int(i) for i in np.flatnonzero(track[r])]


def inverse(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.uint8)
    m, n = a.shape
    if m != n:
        raise ValueError("inverse needs a square matrix")
    reduced, track, _, r = _eliminate(a)
    if r < m:
        raise SingularMatrixError(
            f"matrix of size {m} has GF(2) rank {r}", [int(i) for i in np.flatnonzero(track[r])]
        )
    return track


def independent_columns(a) -> list[int]:
    """Greedy maximal set of linearly independent columns, scanned left to right."""
    a = (np.asarray(a, dtype=np.uint8) & 1)
    basis: dict[int, np.ndarray] = {}  # pivot row -> reduced vector
    chosen = []
    for col in range(a.shape[1]):
        v = a[:, col].copy()
        for piv, b in basis.items():
            if v[piv]:
                v ^= b
        nz = np.flatnonzero(v)
        if nz.size == 0:
            continue
        piv = int(nz[0])
        for other, b in basis.items():
            if b[piv]:
                b ^= v
        basis[piv] = v
        chosen.append(col)
    return chosen
