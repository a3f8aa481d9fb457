"""Geometric rank by rank-stratified point counting over an extension tower.

Two routes are computed: the stratification min_r (r + codim X_r), where
X_r = {x : rank(sum_i x_i A_i) <= r}, and the kernel-codimension definition
codim{(x, y) : f(x, y) = 0}.  Both use exact enumeration when affordable and
seeded Monte Carlo otherwise; sampled strata never silently enter the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import linalg
from .errors import BudgetExceeded
from .fields import Field
from .tensor import Tensor3, slices
from .variety import CountRecord, DimEstimate, estimate_from_counts, exact_estimate

ELIM_BUDGET = 2 ** 21  # matrices eliminated per tower level, exact mode
MC_SAMPLES = 10 ** 5


def _x_block(q: int, n: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    X = np.empty((idx.size, n), dtype=np.int32)
    for i in range(n):
        X[:, i] = idx % q
        idx //= q
    return X


def _lifted_slices(T: Tensor3, axis: str, Fk: Field) -> np.ndarray:
    return np.asarray(T.field.lift_codes(slices(T, axis), Fk), dtype=np.int32)


def _rank_histogram(A: np.ndarray, Fk: Field, X: np.ndarray, rmax: int) -> np.ndarray:
    Ms = np.zeros((X.shape[0],) + A.shape[1:], dtype=np.int32)
    for i in range(A.shape[0]):
        Ms = Fk.add[Ms, Fk.mul[X[:, i][:, None, None], A[i][None, :, :]]]
    ranks = linalg.batched_rank(Ms, Fk)
    return np.bincount(ranks, minlength=rmax + 1)


def rank_strata_counts(
    T: Tensor3,
    k: int,
    axis: str = "x",
    budget: int = ELIM_BUDGET,
    mc_samples: int = MC_SAMPLES,
    seed: int = 0,
    allow_sampling: bool = True,
):
    """Per-r counts |X_r(F_{q^k})| (cumulative in r); exact when within budget.

    Returns a list of CountRecord, one per r in [0, min of the other two dims].
    """
    Fk = T.field.extension(k)
    A = _lifted_slices(T, axis, Fk)
    n_coeff = A.shape[0]
    rmax = min(A.shape[1], A.shape[2])
    total = Fk.q ** n_coeff
    hist = np.zeros(rmax + 1, dtype=np.float64)
    if total <= budget:
        chunk = 1 << 15
        exact_hist = np.zeros(rmax + 1, dtype=np.int64)
        for start in range(0, total, chunk):
            X = _x_block(Fk.q, n_coeff, start, min(start + chunk, total))
            exact_hist += _rank_histogram(A, Fk, X, rmax)
        cum = np.cumsum(exact_hist)
        return [CountRecord(k=k, count=int(cum[r]), exact=True) for r in range(rmax + 1)]
    if not allow_sampling:
        raise BudgetExceeded(f"{Fk.q}^{n_coeff} contractions exceed budget {budget}")
    rng = np.random.default_rng(seed ^ (k * 0x9E3779B9))
    remaining = mc_samples
    while remaining > 0:
        m = min(remaining, 1 << 15)
        X = rng.integers(0, Fk.q, size=(m, n_coeff), dtype=np.int64).astype(np.int32)
        hist += _rank_histogram(A, Fk, X, rmax)
        remaining -= m
    cum = np.cumsum(hist) / mc_samples
    return [
        CountRecord(k=k, count=float(cum[r]) * total, exact=False, samples=mc_samples)
        for r in range(rmax + 1)
    ]


@dataclass
class GRReport:
    gr: int
    argmin_r: int
    axis: str
    strata: dict = dc_field(default_factory=dict)  # r -> DimEstimate
    kernel: DimEstimate | None = None
    stable: bool = False
    consistent: bool | None = None

    def to_dict(self):
        return {
            "gr": self.gr,
            "argmin_r": self.argmin_r,
            "axis": self.axis,
            "stable": self.stable,
            "consistent": self.consistent,
            "strata": {r: est.to_dict() for r, est in self.strata.items()},
            "kernel": self.kernel.to_dict() if self.kernel else None,
        }


def geometric_rank(
    T: Tensor3,
    kmax: int = 3,
    axis: str = "x",
    budget: int = ELIM_BUDGET,
    mc_samples: int = MC_SAMPLES,
    seed: int = 0,
    cross_check: bool = False,
) -> GRReport:
    """GR = min_r (r + codim X_r) from tower estimates of each stratum."""
    if kmax < 2:
        raise BudgetExceeded("kmax must be >= 2")
    from .tensor import slice_space

    ax = "xyz".index(axis)
    n_coeff = T.dims[ax]
    rmax = min(dim for i, dim in enumerate(T.dims) if i != ax)
    if T.is_zero() or 0 in T.dims:
        report = GRReport(gr=0, argmin_r=0, axis=axis, stable=True)
        report.strata[0] = exact_estimate(n_coeff, n_coeff)
        if cross_check:
            report.kernel = exact_estimate(T.dims[0] + T.dims[1], T.dims[0] + T.dims[1])
            report.consistent = True
        return report

    per_k = [
        rank_strata_counts(
            T, k, axis=axis, budget=budget, mc_samples=mc_samples, seed=seed
        )
        for k in range(1, kmax + 1)
    ]
    d = slice_space(T, axis).dim
    strata: dict[int, DimEstimate] = {}
    for r in range(rmax + 1):
        counts = [per_k[k - 1][r] for k in range(1, kmax + 1)]
        if r == 0:
            # X_0 is the kernel of a linear map: exact codim, no estimation
            strata[0] = exact_estimate(n_coeff, n_coeff - d, counts)
        elif all(
            c.exact and c.count == T.field.extension(c.k).q ** n_coeff for c in counts
        ):
            # stratum is the whole space at every level: exact
            strata[r] = exact_estimate(n_coeff, n_coeff, counts)
        else:
            strata[r] = estimate_from_counts(T.field.q, n_coeff, counts)
    best_r, best_val, best_stable = None, None, False
    for r, est in strata.items():
        if est.status == "empty":
            continue
        val = r + est.codim
        if best_val is None or val < best_val:
            best_r, best_val = r, val
            best_stable = est.status == "stable"
    report = GRReport(
        gr=best_val, argmin_r=best_r, axis=axis, strata=strata, stable=best_stable
    )
    if cross_check:
        report.kernel = kernel_codim(
            T, kmax, budget=budget, mc_samples=mc_samples, seed=seed
        )
        if report.kernel.status in ("stable", "empty") and best_stable:
            report.consistent = report.kernel.codim == report.gr
    return report


def kernel_codim(
    T: Tensor3,
    kmax: int = 3,
    budget: int = ELIM_BUDGET,
    mc_samples: int = MC_SAMPLES,
    seed: int = 0,
) -> DimEstimate:
    """Dimension estimate of ker f = {(x, y) : f(x, y) = 0} in (n1+n2)-space.

    For fixed x the y-fiber is a linear kernel of exact size q^(n2 - rank), so
    the count over F_{q^k} is an exact sum over x (or a low-variance sampled
    average in Monte Carlo mode).
    """
    n1, n2, _ = T.dims
    counts = []
    for k in range(1, kmax + 1):
        Fk = T.field.extension(k)
        A = _lifted_slices(T, "x", Fk)
        rmax = min(n2, T.dims[2])
        total = Fk.q ** n1
        if total <= budget:
            hist = np.zeros(rmax + 1, dtype=np.int64)
            chunk = 1 << 15
            for start in range(0, total, chunk):
                X = _x_block(Fk.q, n1, start, min(start + chunk, total))
                hist += _rank_histogram(A, Fk, X, rmax)
            z = sum(int(hist[r]) * Fk.q ** (n2 - r) for r in range(rmax + 1))
            counts.append(CountRecord(k=k, count=z, exact=True))
        else:
            rng = np.random.default_rng(seed ^ (k * 0x9E3779B9))
            hist = np.zeros(rmax + 1, dtype=np.int64)
            remaining = mc_samples
            while remaining > 0:
                m = min(remaining, 1 << 15)
                X = rng.integers(0, Fk.q, size=(m, n1), dtype=np.int64).astype(np.int32)
                hist += _rank_histogram(A, Fk, X, rmax)
                remaining -= m
            mean_fiber = sum(
                int(hist[r]) * Fk.q ** (n2 - r) for r in range(rmax + 1)
            ) / mc_samples
            counts.append(
                CountRecord(
                    k=k, count=mean_fiber * total, exact=False, samples=mc_samples
                )
            )
    return estimate_from_counts(T.field.q, n1 + n2, counts)
