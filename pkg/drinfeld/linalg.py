"""Dense linear algebra over F_p on numpy int64 arrays.

Plain Gaussian elimination: the matrices the detector builds are a few
thousand rows at most, and exactness matters more than speed.
"""

from __future__ import annotations

import numpy as np


def row_reduce(M, p: int, n_pivot_cols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form of *M* over F_p.

    Args:
        M: integer matrix (rows x cols); entries are taken mod p.
        p: prime modulus.
        n_pivot_cols: only look for pivots in the first *n_pivot_cols*
            columns.  Defaults to all columns.

    Returns:
        (R, pivot_cols) where R is reduced (pivots equal 1, zero above and
        below) and pivot_cols lists the pivot column of each nonzero row.
    """
    R = (np.asarray(M, dtype=np.int64) % p).copy()
    if R.ndim != 2:
        raise ValueError("row_reduce expects a 2-d matrix")
    rows, cols = R.shape
    if n_pivot_cols is None:
        n_pivot_cols = cols

    pivot_cols: list[int] = []
    pivot_row = 0
    for col in range(n_pivot_cols):
        if pivot_row == rows:
            break
        nonzero = np.nonzero(R[pivot_row:, col])[0]
        if nonzero.size == 0:
            continue
        found = pivot_row + int(nonzero[0])
        if found != pivot_row:
            R[[pivot_row, found]] = R[[found, pivot_row]]
        inv = pow(int(R[pivot_row, col]), p - 2, p)
        R[pivot_row] = (R[pivot_row] * inv) % p
        factors = R[:, col].copy()
        factors[pivot_row] = 0
        hit = np.nonzero(factors)[0]
        if hit.size:
            R[hit] = (R[hit] - np.outer(factors[hit], R[pivot_row])) % p
        pivot_cols.append(col)
        pivot_row += 1
    return R, pivot_cols


def rank_mod_p(M, p: int) -> int:
    M = np.asarray(M, dtype=np.int64)
    if M.size == 0:
        return 0
    return len(row_reduce(M, p)[1])


def nullspace_mod_p(M, p: int) -> list[np.ndarray]:
    """Kernel basis of *M* over F_p, one vector per free column.

    The vector for free column f has a 1 at f, zeros at the other free
    columns, and its remaining support on pivot columns left of f.  So with
    columns sorted by increasing monomial, the first vector returned has the
    smallest possible leading monomial of any kernel element.
    """
    M = np.asarray(M, dtype=np.int64)
    cols = M.shape[1]
    if M.shape[0] == 0:
        return [np.eye(cols, dtype=np.int64)[i] for i in range(cols)]
    R, pivots = row_reduce(M, p)
    pivot_set = set(pivots)
    basis = []
    for free in range(cols):
        if free in pivot_set:
            continue
        vec = np.zeros(cols, dtype=np.int64)
        vec[free] = 1
        for row, pc in enumerate(pivots):
            vec[pc] = (-R[row, free]) % p
        basis.append(vec)
    return basis
