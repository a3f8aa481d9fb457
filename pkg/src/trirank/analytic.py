"""Exact analytic rank, bias, and min-entropy by exhaustive counting.

The source of truth is the exact integer count of zeros of the bilinear map:
for fixed x the map y -> f(x, y) is linear, so its zero count is
q^(n2 - rank(sum_i x_i A_i)) and the total is an exact sum over all x.  The
character sum is computed independently as a redundant float cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import BudgetExceeded
from .fields import Field
from .tensor import Tensor3, slices

ENUM_BUDGET = 10 ** 8


@dataclass(frozen=True)
class ARValue:
    zero_count: int
    log_domain: int  # domain size is q^log_domain
    q: int

    @property
    def domain_size(self) -> int:
        return self.q ** self.log_domain

    @property
    def value(self) -> float:
        if self.zero_count == 0:
            return float("inf")
        return self.log_domain - math.log(self.zero_count, self.q)

    def to_dict(self):
        return {
            "zero_count": self.zero_count,
            "domain_size": self.domain_size,
            "value": self.value,
        }


@dataclass
class EntropyReport:
    histogram: np.ndarray  # counts indexed by packed output code
    log_domain: int
    q: int
    n3: int

    @property
    def max_count(self) -> int:
        return int(self.histogram.max()) if self.histogram.size else 0

    @property
    def me(self) -> float:
        return math.log2(self.q ** self.log_domain / self.max_count)

    @property
    def argmax_is_zero(self) -> bool:
        return bool(self.histogram.argmax() == 0)


def _x_block(q: int, n: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    X = np.empty((idx.size, n), dtype=np.int32)
    for i in range(n):
        X[:, i] = idx % q
        idx //= q
    return X


def _contraction_stack(T: Tensor3, F: Field, X: np.ndarray) -> np.ndarray:
    """Matrices sum_i x_i A_i for each row x of X, shape (N, n2, n3)."""
    A = np.asarray(T.field.lift_codes(slices(T, "x"), F), dtype=np.int32)
    out = np.zeros((X.shape[0],) + A.shape[1:], dtype=np.int32)
    for i in range(A.shape[0]):
        out = F.add[out, F.mul[X[:, i][:, None, None], A[i][None, :, :]]]
    return out


def zero_count(T: Tensor3, budget: int = ENUM_BUDGET) -> int:
    """Exact |{(x, y) : f(x, y) = 0}| over the tensor's own field."""
    F = T.field
    n1, n2, _ = T.dims
    if F.q ** (n1 + n2) > budget:
        raise BudgetExceeded(f"q^(n1+n2) = {F.q}^{n1 + n2} exceeds budget {budget}")
    total = F.q ** n1
    count = 0
    chunk = 1 << 15
    q_pows = F.q ** np.arange(n2 + 1, dtype=object)
    for start in range(0, total, chunk):
        X = _x_block(F.q, n1, start, min(start + chunk, total))
        ranks = linalg.batched_rank(_contraction_stack(T, F, X), F)
        binc = np.bincount(ranks, minlength=n2 + 1)
        count += sum(int(binc[r]) * int(q_pows[n2 - r]) for r in range(n2 + 1))
    return count


def analytic_rank(T: Tensor3, budget: int = ENUM_BUDGET) -> ARValue:
    n1, n2, _ = T.dims
    return ARValue(zero_count(T, budget=budget), n1 + n2, T.field.q)


def bias_char_sum(T: Tensor3, budget: int = ENUM_BUDGET) -> complex:
    """Exp_{x,y,z} chi(T(x,y,z)), with the z-average taken analytically.

    For each (x, y) the average over z factors into per-coordinate character
    sums S(c) = sum_z chi(c z), each evaluated from an exact residue histogram.
    """
    F = T.field
    n1, n2, n3 = T.dims
    if F.q ** (n1 + n2) * max(n3, 1) > budget:
        raise BudgetExceeded("character-sum budget exceeded")
    # S(c) for every code c, from exact residue counts
    roots = np.exp(2j * np.pi * np.arange(F.p) / F.p)
    S = np.empty(F.q, dtype=np.complex128)
    codes = np.arange(F.q, dtype=np.int32)
    for c in range(F.q):
        residues = F.trace_res[F.mul[c, codes]]
        S[c] = np.bincount(residues, minlength=F.p) @ roots
    total_x = F.q ** n1
    Y = _x_block(F.q, n2, 0, F.q ** n2)
    acc = 0.0 + 0.0j
    chunk = 1 << 12
    for start in range(0, total_x, chunk):
        X = _x_block(F.q, n1, start, min(start + chunk, total_x))
        Ms = _contraction_stack(T, F, X)  # (C, n2, n3)
        # f_k(x, y) for all y: (C, Ny, n3)
        vals = np.zeros((X.shape[0], Y.shape[0], n3), dtype=np.int32)
        for j in range(n2):
            vals = F.add[vals, F.mul[Ms[:, j, :][:, None, :], Y[:, j][None, :, None]]]
        prod = S[vals].prod(axis=2) / (F.q ** n3)
        acc += prod.sum()
    return complex(acc / (F.q ** (n1 + n2)))


def min_entropy(T: Tensor3, budget: int = ENUM_BUDGET) -> EntropyReport:
    """Exact output histogram of the bilinear map under uniform inputs."""
    F = T.field
    n1, n2, n3 = T.dims
    if F.q ** (n1 + n2) > budget or F.q ** n3 > budget:
        raise BudgetExceeded("min-entropy budget exceeded")
    total_x = F.q ** n1
    Y = _x_block(F.q, n2, 0, F.q ** n2)
    weights = (F.q ** np.arange(n3, dtype=np.int64)).astype(np.int64)
    hist = np.zeros(F.q ** n3, dtype=np.int64)
    chunk = 1 << 12
    for start in range(0, total_x, chunk):
        X = _x_block(F.q, n1, start, min(start + chunk, total_x))
        Ms = _contraction_stack(T, F, X)
        vals = np.zeros((X.shape[0], Y.shape[0], n3), dtype=np.int64)
        for j in range(n2):
            vals = F.add[vals.astype(np.int32), F.mul[Ms[:, j, :][:, None, :], Y[:, j][None, :, None]]].astype(np.int64)
        packed = (vals * weights).sum(axis=2)
        hist += np.bincount(packed.ravel(), minlength=hist.size)
    return EntropyReport(histogram=hist, log_domain=n1 + n2, q=F.q, n3=n3)
