"""Exact slice rank for small tensors, bounds, and the rank-chain verifier.

Exact slice rank uses the annihilator characterization: SR(T) <= c1 + c2 + c3
iff T vanishes identically on some triple of subspaces of those codimensions.
Subspace triples are searched in order of increasing codimension sum, so the
first annihilating triple found is a witness of minimality.

For antichain supports the vertex-cover route gives exact values beyond the
subspace-search scope (identity tensors, Levi-Civita, and their direct sums).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import analytic, geometric
from .errors import OutOfExactScope
from .fields import Field
from .tensor import Tensor3, slice_space

EXACT_DIM_LIMIT = 4
EXACT_Q_LIMIT = 3


# ---------------------------------------------------------------------------
# subspace enumeration (RREF canonical form)
# ---------------------------------------------------------------------------

_subspace_cache: dict = {}


def subspaces(F: Field, n: int):
    """All subspaces of F^n as {dim: [basis arrays in RREF]}."""
    key = (F, n)
    if key in _subspace_cache:
        return _subspace_cache[key]
    by_dim = {0: [np.zeros((0, n), dtype=np.int32)]}
    for d in range(1, n + 1):
        bases = []
        for pivots in itertools.combinations(range(n), d):
            free_pos = [
                (i, c)
                for i in range(d)
                for c in range(n)
                if c > pivots[i] and c not in pivots
            ]
            for values in itertools.product(range(F.q), repeat=len(free_pos)):
                B = np.zeros((d, n), dtype=np.int32)
                for i, pc in enumerate(pivots):
                    B[i, pc] = 1
                for (i, c), v in zip(free_pos, values):
                    B[i, c] = v
                bases.append(B)
        by_dim[d] = bases
    _subspace_cache[key] = by_dim
    return by_dim


def _restrict(T: Tensor3, U, V, W) -> np.ndarray:
    """Values T(u_a, v_b, w_c) over all basis triples, shape (d1, d2, d3)."""
    F = T.field
    E = T.entries
    A = np.zeros((U.shape[0],) + E.shape[1:], dtype=np.int32)
    for i in range(E.shape[0]):
        A = F.add[A, F.mul[U[:, i][:, None, None], E[i][None, :, :]]]
    B = np.zeros((U.shape[0], V.shape[0], E.shape[2]), dtype=np.int32)
    for j in range(E.shape[1]):
        B = F.add[B, F.mul[V[:, j][None, :, None], A[:, j, :][:, None, :]]]
    C = np.zeros((U.shape[0], V.shape[0], W.shape[0]), dtype=np.int32)
    for k in range(E.shape[2]):
        C = F.add[C, F.mul[W[:, k][None, None, :], B[:, :, k][:, :, None]]]
    return C


@dataclass
class SRResult:
    lo: int
    hi: int
    method: str  # annihilator_exact | vertex_cover | bounds_only
    witness: tuple | None = None  # (V1, V2, V3) bases for exact results
    three_gr_bound: int | None = None  # bound implied by the chain, never shrinks hi

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def value(self) -> int:
        if not self.exact:
            raise OutOfExactScope(f"slice rank only bounded in [{self.lo}, {self.hi}]")
        return self.lo

    def to_dict(self):
        return {
            "lo": self.lo,
            "hi": self.hi,
            "method": self.method,
            "exact": self.exact,
            "three_gr_bound": self.three_gr_bound,
        }


def slice_rank_exact(
    T: Tensor3,
    lower_bound: int = 0,
    dim_limit: int = EXACT_DIM_LIMIT,
    q_limit: int = EXACT_Q_LIMIT,
) -> SRResult:
    """Minimum codim sum over annihilating subspace triples, by exhaustion."""
    n1, n2, n3 = T.dims
    if max(T.dims) > dim_limit or T.field.q > q_limit:
        raise OutOfExactScope(
            f"dims {T.dims} / q = {T.field.q} outside exact scope "
            f"(dims <= {dim_limit}, q <= {q_limit})"
        )
    F = T.field
    subs = [subspaces(F, n) for n in T.dims]
    max_c = n1 + n2 + n3
    for total in range(max(lower_bound, 0), max_c + 1):
        for c1 in range(min(total, n1) + 1):
            for c2 in range(min(total - c1, n2) + 1):
                c3 = total - c1 - c2
                if c3 > n3:
                    continue
                for U in subs[0][n1 - c1]:
                    for V in subs[1][n2 - c2]:
                        for W in subs[2][n3 - c3]:
                            if not _restrict(T, U, V, W).any():
                                return SRResult(
                                    total, total, "annihilator_exact", (U, V, W)
                                )
    raise AssertionError("zero subspaces always annihilate")  # cannot happen


def check_witness(T: Tensor3, result: SRResult) -> bool:
    """Re-check an exact witness: T vanishes on it and codims sum to value."""
    if result.witness is None:
        return False
    U, V, W = result.witness
    codims = sum(n - B.shape[0] for n, B in zip(T.dims, (U, V, W)))
    return codims == result.value and not _restrict(T, U, V, W).any()


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def slice_rank_bounds(T: Tensor3, ar=None, gr=None) -> SRResult:
    """Interval [max(ceil AR, GR), min axis slice-span dim]."""
    lo = 0
    if ar is not None and math.isfinite(ar.value):
        lo = max(lo, math.ceil(ar.value - 1e-9))
    if gr is not None:
        lo = max(lo, gr.gr)
    hi = min(slice_space(T, axis).dim for axis in "xyz")
    return SRResult(
        lo,
        max(hi, lo) if hi < lo else hi,
        "bounds_only",
        three_gr_bound=3 * gr.gr if gr is not None else None,
    )


# ---------------------------------------------------------------------------
# vertex-cover method for antichain supports
# ---------------------------------------------------------------------------

class NotAntichain:
    """Sentinel: the support is not (recognizably) an antichain."""

    def __repr__(self):
        return "NotAntichain"


NOT_ANTICHAIN = NotAntichain()


def _support_components(support):
    """Connected components of the support hypergraph (vertices = (axis, idx))."""
    parent = {}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for e in support:
        verts = [(ax, e[ax]) for ax in range(3)]
        for v in verts:
            parent.setdefault(v, v)
        union(verts[0], verts[1])
        union(verts[1], verts[2])
    groups: dict = {}
    for e in support:
        groups.setdefault(find((0, e[0])), []).append(e)
    return list(groups.values())


def _is_antichain(triples) -> bool:
    for a in triples:
        for b in triples:
            if a != b and all(x <= y for x, y in zip(a, b)):
                return False
    return True


def _min_vertex_cover(edges) -> int:
    """Exact minimum vertex cover of a 3-partite 3-uniform hypergraph."""
    edges = [tuple((ax, e[ax]) for ax in range(3)) for e in edges]

    def matching_lb(es):
        used = set()
        m = 0
        for e in es:
            if not any(v in used for v in e):
                used.update(e)
                m += 1
        return m

    best = len(edges)  # one vertex per edge always covers

    def bb(es, chosen):
        nonlocal best
        if not es:
            best = min(best, chosen)
            return
        if chosen + matching_lb(es) >= best:
            return
        e = es[0]
        for v in e:
            rest = [f for f in es if v not in f]
            bb(rest, chosen + 1)

    bb(edges, 0)
    return best


def vertex_cover_sr(T: Tensor3):
    """SR via the cover number, valid when the support is an antichain.

    The support is accepted when every connected component is an antichain in
    the product order: components occupy disjoint index sets per axis, so the
    axes can always be reordered to make the union an antichain.
    """
    support = [tuple(int(v) for v in idx) for idx in zip(*np.nonzero(T.entries))]
    if not support:
        return 0
    components = _support_components(support)
    if not all(_is_antichain(c) for c in components):
        return NOT_ANTICHAIN
    return sum(_min_vertex_cover(c) for c in components)


# ---------------------------------------------------------------------------
# the rank-chain verifier
# ---------------------------------------------------------------------------

GR_AR_CONSTANT = 2.71
SR_AR_CONSTANT = 8.13


@dataclass
class ChainReport:
    sr: SRResult
    gr: geometric.GRReport
    ar: analytic.ARValue | None
    holds_sr_3gr: bool
    holds_gr_271ar: bool | None
    holds_sr_813ar: bool | None
    holds_ar_le_sr: bool | None
    holds_gr_le_sr: bool
    ratio_sr_gr: Fraction | None
    ar_skipped: bool = False

    @property
    def all_hold(self) -> bool:
        checks = [
            self.holds_sr_3gr,
            self.holds_gr_271ar,
            self.holds_sr_813ar,
            self.holds_ar_le_sr,
            self.holds_gr_le_sr,
        ]
        return all(c is not False for c in checks)

    def to_dict(self):
        return {
            "sr": self.sr.to_dict(),
            "gr": self.gr.to_dict(),
            "ar": self.ar.to_dict() if self.ar else None,
            "holds_sr_3gr": self.holds_sr_3gr,
            "holds_gr_271ar": self.holds_gr_271ar,
            "holds_sr_813ar": self.holds_sr_813ar,
            "holds_ar_le_sr": self.holds_ar_le_sr,
            "holds_gr_le_sr": self.holds_gr_le_sr,
            "ratio_sr_gr": str(self.ratio_sr_gr) if self.ratio_sr_gr is not None else None,
            "ar_skipped": self.ar_skipped,
        }


def slice_rank(T: Tensor3, ar=None, gr=None) -> SRResult:
    """Best available slice-rank determination: exact, vertex cover, or bounds."""
    bounds = slice_rank_bounds(T, ar=ar, gr=gr)
    vc = vertex_cover_sr(T)
    if not isinstance(vc, NotAntichain):
        return SRResult(vc, vc, "vertex_cover", three_gr_bound=bounds.three_gr_bound)
    try:
        res = slice_rank_exact(T, lower_bound=bounds.lo)
        res.three_gr_bound = bounds.three_gr_bound
        return res
    except OutOfExactScope:
        return bounds


def verify_rank_chain(
    T: Tensor3,
    kmax: int = 3,
    budget: int = geometric.ELIM_BUDGET,
    ar_budget: int = analytic.ENUM_BUDGET,
    mc_samples: int = geometric.MC_SAMPLES,
    seed: int = 0,
    cross_check: bool = False,
) -> ChainReport:
    """Compute AR, GR, SR and evaluate the inequality chain with its constants."""
    gr = geometric.geometric_rank(
        T, kmax=kmax, budget=budget, mc_samples=mc_samples, seed=seed,
        cross_check=cross_check,
    )
    ar_skipped = T.field.q == 2
    ar = None if ar_skipped else analytic.analytic_rank(T, budget=ar_budget)
    sr = slice_rank(T, ar=ar, gr=gr)
    if T.is_zero():
        return ChainReport(sr, gr, ar, True, True, True, True, True, None, ar_skipped)
    holds_sr_3gr = sr.hi <= 3 * gr.gr
    holds_gr_le_sr = gr.gr <= sr.hi
    if ar is None:
        holds_gr_271ar = holds_sr_813ar = holds_ar_le_sr = None
    else:
        holds_gr_271ar = gr.gr <= GR_AR_CONSTANT * ar.value + 1e-12
        holds_sr_813ar = sr.hi <= SR_AR_CONSTANT * ar.value + 1e-12
        holds_ar_le_sr = ar.value <= sr.hi + 1e-12
    ratio = Fraction(sr.value, gr.gr) if sr.exact and gr.gr > 0 else None
    return ChainReport(
        sr, gr, ar,
        holds_sr_3gr, holds_gr_271ar, holds_sr_813ar,
        holds_ar_le_sr, holds_gr_le_sr, ratio, ar_skipped,
    )
