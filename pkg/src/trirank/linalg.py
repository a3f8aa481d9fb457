"""Gaussian elimination and subspace operations over table-driven finite fields.

Matrices are 2-D numpy arrays of field codes.  The batched variants run
elimination on a whole stack of matrices at once, which is what makes
exhaustive rank-stratum counting affordable.
"""

from __future__ import annotations

import numpy as np

from .fields import Field


def as_matrix(M) -> np.ndarray:
    A = np.asarray(M, dtype=np.int32)
    if A.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    return A


def rref(M, F: Field):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    R = as_matrix(M).copy()
    m, n = R.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] = F.mul[F.inv[R[r, c]], R[r]]
        for j in np.nonzero(R[:, c])[0]:
            if j != r:
                R[j] = F.add[R[j], F.mul[F.neg[R[j, c]], R[r]]]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(M, F: Field) -> int:
    return len(rref(M, F)[1])


def kernel_basis(M, F: Field) -> np.ndarray:
    """Basis of {v : Mv = 0} as rows of a (d, n) array."""
    R, pivots = rref(M, F)
    n = R.shape[1]
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int32)
    for row, f in enumerate(free):
        basis[row, f] = 1
        for i, pc in enumerate(pivots):
            basis[row, pc] = F.neg[R[i, f]]
    return basis


def solve(M, b, F: Field):
    """One solution of Mx = b (free variables set to 0), or None."""
    M = as_matrix(M)
    b = np.asarray(b, dtype=np.int32).reshape(-1, 1)
    R, pivots = rref(np.hstack([M, b]), F)
    n = M.shape[1]
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.int32)
    for i, pc in enumerate(pivots):
        x[pc] = R[i, n]
    return x


def inverse(M, F: Field):
    """Matrix inverse, or None if singular."""
    M = as_matrix(M)
    m, n = M.shape
    if m != n:
        return None
    R, pivots = rref(np.hstack([M, np.eye(n, dtype=np.int32)]), F)
    if pivots[:n] != list(range(n)):  # a pivot escaped into the augmented block
        return None
    return R[:, n:].copy()


def row_space_basis(rows, F: Field) -> np.ndarray:
    """Independent spanning subset, in RREF (canonical for the row space)."""
    rows = as_matrix(rows)
    if rows.shape[0] == 0:
        return rows.copy()
    R, pivots = rref(rows, F)
    return R[: len(pivots)].copy()


def mat_mul(A, B, F: Field) -> np.ndarray:
    A, B = as_matrix(A), as_matrix(B)
    acc = np.zeros((A.shape[0], B.shape[1]), dtype=np.int32)
    for t in range(A.shape[1]):
        acc = F.add[acc, F.mul[A[:, t][:, None], B[t][None, :]]]
    return acc


def mat_vec(A, v, F: Field) -> np.ndarray:
    return mat_mul(A, np.asarray(v, dtype=np.int32).reshape(-1, 1), F)[:, 0]


def vec_mat(v, A, F: Field) -> np.ndarray:
    return mat_mul(np.asarray(v, dtype=np.int32).reshape(1, -1), A, F)[0]


def in_row_space(v, basis_rref, F: Field) -> bool:
    stacked = np.vstack([basis_rref, np.asarray(v, dtype=np.int32)])
    return rank(stacked, F) == basis_rref.shape[0]


def intersect_row_spaces(U, V, F: Field) -> np.ndarray:
    """Basis of the intersection of two row spaces."""
    U, V = as_matrix(U), as_matrix(V)
    if U.shape[0] == 0 or V.shape[0] == 0:
        return np.zeros((0, U.shape[1]), dtype=np.int32)
    S = np.vstack([U, V])
    left_null = kernel_basis(S.T, F)  # rows (a | b) with aU + bV = 0
    if left_null.shape[0] == 0:
        return np.zeros((0, U.shape[1]), dtype=np.int32)
    combos = mat_mul(left_null[:, : U.shape[0]], U, F)
    return row_space_basis(combos, F)


def extend_basis(rows, candidates, F: Field):
    """Candidates (in order) that extend the span of rows; returns the list."""
    rows = as_matrix(rows)
    current = row_space_basis(rows, F) if rows.shape[0] else rows
    r = current.shape[0]
    added = []
    for cand in candidates:
        cand = np.asarray(cand, dtype=np.int32)
        stacked = np.vstack([current, cand.reshape(1, -1)]) if r else cand.reshape(1, -1)
        new_rank = rank(stacked, F)
        if new_rank > r:
            added.append(cand)
            current = row_space_basis(stacked, F)
            r = new_rank
    return added


# ---------------------------------------------------------------------------
# batched elimination
# ---------------------------------------------------------------------------

def batched_rank(Ms, F: Field, chunk: int = 1 << 15) -> np.ndarray:
    """Ranks of a stack of matrices, shape (N, m, n) -> (N,)."""
    Ms = np.asarray(Ms, dtype=np.int32)
    N = Ms.shape[0]
    out = np.empty(N, dtype=np.int64)
    for start in range(0, N, chunk):
        out[start : start + chunk] = _batched_rank_chunk(Ms[start : start + chunk], F)
    return out


def _batched_rank_chunk(Ms, F: Field) -> np.ndarray:
    Ms = Ms.copy()
    N, m, n = Ms.shape
    r = np.zeros(N, dtype=np.int64)
    rows = np.arange(m)
    for c in range(n):
        cand = (Ms[:, :, c] != 0) & (rows[None, :] >= r[:, None])
        idx = np.nonzero(cand.any(axis=1))[0]
        if idx.size == 0:
            continue
        piv = np.argmax(cand[idx], axis=1)
        rr = r[idx]
        pivot_rows = Ms[idx, piv].copy()
        Ms[idx, piv] = Ms[idx, rr]
        pivot_rows = F.mul[F.inv[pivot_rows[:, c]][:, None], pivot_rows]
        Ms[idx, rr] = pivot_rows
        factors = Ms[idx, :, c]
        delta = F.mul[F.neg[factors][:, :, None], pivot_rows[:, None, :]]
        updated = F.add[Ms[idx], delta]
        below = rows[None, :] > rr[:, None]
        Ms[idx] = np.where(below[:, :, None], updated, Ms[idx])
        r[idx] = rr + 1
        if (r == m).all():
            break
    return r
