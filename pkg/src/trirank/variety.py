"""Polynomial systems and variety dimension estimation over extension towers.

A polynomial is a sparse map from exponent vectors to nonzero field codes.
Dimension is estimated from point counts over F_{q^k} for k = 1..kmax, using
consecutive count slopes log_q(N_{k+1}/N_k); the leading constants (component
counts and degrees) cancel in the ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import (
    BudgetExceeded,
    NotOnVariety,
    PolySyntaxError,
    UnknownVariable,
    UnstableEstimate,
)
from .fields import Field

EXACT_POINT_BUDGET = 10 ** 8
MC_SAMPLES = 10 ** 6
SLOPE_MARGIN = 0.35


# ---------------------------------------------------------------------------
# sparse polynomials: dict {exponent tuple: nonzero code}
# ---------------------------------------------------------------------------

def poly_add(a, b, F: Field):
    out = dict(a)
    for e, c in b.items():
        s = F.add_codes(out.get(e, 0), c)
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def poly_neg(a, F: Field):
    return {e: F.neg_code(c) for e, c in a.items()}


def poly_mul(a, b, F: Field):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            s = F.add_codes(out.get(e, 0), F.mul_codes(ca, cb))
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


def poly_degree(a) -> int:
    return max((sum(e) for e in a), default=0)


def poly_partial(a, i: int, F: Field):
    """Formal partial derivative; exponents reduce mod p (d(x^p)/dx = 0)."""
    out = {}
    for e, c in a.items():
        if e[i] == 0:
            continue
        scalar = e[i] % F.p
        if scalar == 0:
            continue
        coeff = F.mul_codes(c, scalar)  # small residues are valid codes
        if not coeff:
            continue
        ne = list(e)
        ne[i] -= 1
        out[tuple(ne)] = coeff
    return out


class PolySystem:
    """A list of multivariate polynomials over a common field."""

    def __init__(self, field: Field, nvars: int, polys):
        self.field = field
        self.nvars = nvars
        self.polys = [dict(p) for p in polys]
        for p in self.polys:
            for e, c in p.items():
                if len(e) != nvars:
                    raise UnknownVariable("exponent vector length mismatch")
                if not 0 < c < field.q:
                    raise UnknownVariable("coefficient not a nonzero field code")

    @property
    def maxdeg(self) -> int:
        return max((poly_degree(p) for p in self.polys), default=0)

    def with_poly(self, p) -> "PolySystem":
        return PolySystem(self.field, self.nvars, self.polys + [p])


# ---------------------------------------------------------------------------
# parser: variables x1..xn, integer coefficients, + - * ^ ( ) ;
# ---------------------------------------------------------------------------

class _Tok:
    def __init__(self, kind, value, line, col):
        self.kind = kind
        self.value = value
        self.line = line
        self.col = col


def _tokenize(text):
    toks = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch in "+-*^();":
            toks.append(_Tok(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            toks.append(_Tok("INT", int(text[i:j]), line, col))
            col += j - i
            i = j
            continue
        if ch == "x":
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise PolySyntaxError("variable needs an index", line, col)
            toks.append(_Tok("VAR", int(text[i + 1 : j]), line, col))
            col += j - i
            i = j
            continue
        raise PolySyntaxError(f"unexpected character {ch!r}", line, col)
    toks.append(_Tok("EOF", None, line, col))
    return toks


class _Parser:
    def __init__(self, toks, field, nvars):
        self.toks = toks
        self.pos = 0
        self.field = field
        self.nvars = nvars

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind=None):
        tok = self.toks[self.pos]
        if kind is not None and tok.kind != kind:
            raise PolySyntaxError(f"expected {kind}, got {tok.kind}", tok.line, tok.col)
        self.pos += 1
        return tok

    def const(self, value):
        code = value % self.field.p  # integer coefficients live in the prime subfield
        return {(0,) * self.nvars: code} if code else {}

    def var(self, index, tok):
        if not 1 <= index <= self.nvars:
            raise UnknownVariable(
                f"x{index} out of range 1..{self.nvars} (line {tok.line}, col {tok.col})"
            )
        e = [0] * self.nvars
        e[index - 1] = 1
        return {tuple(e): 1}

    def parse_expr(self):
        sign = 1
        if self.peek().kind in "+-":
            sign = -1 if self.take().kind == "-" else 1
        acc = self.parse_term()
        if sign < 0:
            acc = poly_neg(acc, self.field)
        while self.peek().kind in "+-":
            op = self.take().kind
            t = self.parse_term()
            if op == "-":
                t = poly_neg(t, self.field)
            acc = poly_add(acc, t, self.field)
        return acc

    def parse_term(self):
        acc = self.parse_factor()
        while self.peek().kind == "*":
            self.take()
            acc = poly_mul(acc, self.parse_factor(), self.field)
        return acc

    def parse_factor(self):
        base = self.parse_atom()
        if self.peek().kind == "^":
            self.take()
            tok = self.take("INT")
            out = self.const(1)
            for _ in range(tok.value):
                out = poly_mul(out, base, self.field)
            return out
        return base

    def parse_atom(self):
        tok = self.peek()
        if tok.kind == "INT":
            self.take()
            return self.const(tok.value)
        if tok.kind == "VAR":
            self.take()
            return self.var(tok.value, tok)
        if tok.kind == "(":
            self.take()
            e = self.parse_expr()
            self.take(")")
            return e
        raise PolySyntaxError(f"unexpected token {tok.kind}", tok.line, tok.col)


def parse_poly_system(text: str, field: Field, nvars: int) -> PolySystem:
    toks = _tokenize(text)
    parser = _Parser(toks, field, nvars)
    polys = []
    while parser.peek().kind != "EOF":
        p = parser.parse_expr()
        if p:
            polys.append(p)
        if parser.peek().kind == ";":
            parser.take()
        elif parser.peek().kind != "EOF":
            tok = parser.peek()
            raise PolySyntaxError(f"unexpected token {tok.kind}", tok.line, tok.col)
    return PolySystem(field, nvars, polys)


# ---------------------------------------------------------------------------
# point counting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CountRecord:
    k: int
    count: float  # exact integer count, or MC estimate
    exact: bool
    samples: int | None = None


def _eval_zero_mask(S: PolySystem, Fk: Field, X: np.ndarray) -> np.ndarray:
    """Boolean mask of points (rows of X) where every polynomial vanishes."""
    if not S.polys:
        return np.ones(X.shape[0], dtype=bool)
    powtbl = Fk.pow_table(max(1, S.maxdeg))
    mask = np.ones(X.shape[0], dtype=bool)
    for p in S.polys:
        acc = np.zeros(X.shape[0], dtype=np.int32)
        for e, c in p.items():
            term = np.full(X.shape[0], int(S.field.lift_codes([c], Fk)[0]), dtype=np.int32)
            for i, ei in enumerate(e):
                if ei:
                    term = Fk.mul[term, powtbl[X[:, i], ei]]
            acc = Fk.add[acc, term]
        mask &= acc == 0
        if not mask.any():
            break
    return mask


def _point_block(qk: int, n: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    X = np.empty((idx.size, n), dtype=np.int32)
    for i in range(n):
        X[:, i] = idx % qk
        idx = idx // qk
    return X


def count_points(
    S: PolySystem,
    k: int,
    budget: int = EXACT_POINT_BUDGET,
    mc_samples: int = MC_SAMPLES,
    seed: int = 0,
    allow_sampling: bool = True,
) -> CountRecord:
    """Count common zeros in F_{q^k}^n, exactly if within budget."""
    Fk = S.field.extension(k)
    n = S.nvars
    total = Fk.q ** n
    if total <= budget:
        count = 0
        chunk = 1 << 18
        for start in range(0, total, chunk):
            X = _point_block(Fk.q, n, start, min(start + chunk, total))
            count += int(_eval_zero_mask(S, Fk, X).sum())
        return CountRecord(k=k, count=count, exact=True)
    if not allow_sampling:
        raise BudgetExceeded(f"{Fk.q}^{n} points exceed exact budget {budget}")
    rng = np.random.default_rng(seed ^ (k * 0x9E3779B9))
    hits = 0
    remaining = mc_samples
    while remaining > 0:
        m = min(remaining, 1 << 18)
        X = rng.integers(0, Fk.q, size=(m, n), dtype=np.int64).astype(np.int32)
        hits += int(_eval_zero_mask(S, Fk, X).sum())
        remaining -= m
    estimate = hits / mc_samples * total
    return CountRecord(k=k, count=estimate, exact=False, samples=mc_samples)


# ---------------------------------------------------------------------------
# dimension estimation
# ---------------------------------------------------------------------------

@dataclass
class DimEstimate:
    nvars: int
    dim: int
    codim: int
    counts: list = dc_field(default_factory=list)
    status: str = "unstable"  # stable | unstable | empty
    method: str = "exact_enumeration"  # or monte_carlo

    def to_dict(self):
        return {
            "nvars": self.nvars,
            "dim": self.dim,
            "codim": self.codim,
            "status": self.status,
            "method": self.method,
            "counts": [
                {"k": c.k, "count": c.count, "exact": c.exact, "samples": c.samples}
                for c in self.counts
            ],
        }


def exact_estimate(nvars: int, dim: int, counts=()) -> DimEstimate:
    """A DimEstimate known exactly (linear algebra, no tower needed)."""
    return DimEstimate(
        nvars=nvars,
        dim=dim,
        codim=nvars - dim if dim >= 0 else nvars,
        counts=list(counts),
        status="stable" if dim >= 0 else "empty",
    )


def estimate_from_counts(q: int, nvars: int, counts) -> DimEstimate:
    """Slope-based dimension estimate from tower counts (k = 1..kmax)."""
    counts = list(counts)
    method = "exact_enumeration" if all(c.exact for c in counts) else "monte_carlo"
    if all(c.count == 0 for c in counts):
        return DimEstimate(nvars, -1, nvars, counts, "empty", method)
    slopes = []
    for a, b in zip(counts, counts[1:]):
        if a.count > 0 and b.count > 0:
            slopes.append(math.log(b.count / a.count, q))
        else:
            slopes.append(None)
    if not slopes or slopes[-1] is None:
        return DimEstimate(nvars, -1, nvars, counts, "unstable", method)
    dim = min(max(round(slopes[-1]), 0), nvars)
    status = "unstable"
    good = [s for s in slopes[-2:] if s is not None]
    if len(good) == 2:
        r0, r1 = round(good[0]), round(good[1])
        if r0 == r1 and all(abs(s - r1) <= SLOPE_MARGIN for s in good):
            status = "stable"
    # exact-integer slopes (linear systems, full space) are stable on their own
    if all(s is not None and abs(s - round(s)) < 1e-9 for s in slopes) and len(
        {round(s) for s in slopes}
    ) == 1:
        status = "stable"
    if status == "stable" and method == "monte_carlo":
        # sampled counts only support codim <= 2 (relative error control)
        if nvars - dim > 2:
            status = "unstable"
    return DimEstimate(nvars, dim, nvars - dim, counts, status, method)


def estimate_dim(
    S: PolySystem,
    kmax: int,
    budget: int = EXACT_POINT_BUDGET,
    mc_samples: int = MC_SAMPLES,
    seed: int = 0,
) -> DimEstimate:
    if kmax < 2:
        raise UnstableEstimate("kmax must be >= 2")
    counts = [
        count_points(S, k, budget=budget, mc_samples=mc_samples, seed=seed)
        for k in range(1, kmax + 1)
    ]
    return estimate_from_counts(S.field.q, S.nvars, counts)


# ---------------------------------------------------------------------------
# Schwartz-Zippel bound check
# ---------------------------------------------------------------------------

@dataclass
class SZReport:
    holds: bool
    lhs: Fraction
    rhs: Fraction
    vacuous: bool
    degree: int
    q: int
    codim: int


def sz_check(S: PolySystem, est: DimEstimate) -> SZReport:
    """Check rational-point density against (d/q)^codim."""
    if est.status == "unstable":
        raise UnstableEstimate("sz_check requires a stable (or empty) estimate")
    first = est.counts[0] if est.counts else None
    if first is None or first.k != 1 or not first.exact:
        raise UnstableEstimate("sz_check requires an exact k=1 count")
    q = S.field.q
    n = S.nvars
    d = max(S.maxdeg, 1)
    codim = est.codim
    lhs = Fraction(int(first.count), q ** n)
    rhs = Fraction(d, q) ** codim
    vacuous = d >= q
    holds = True if vacuous else lhs <= rhs
    return SZReport(holds, lhs, rhs, vacuous, d, q, codim)


# ---------------------------------------------------------------------------
# Jacobian tangent space
# ---------------------------------------------------------------------------

def jacobian_tangent(S: PolySystem, point, point_field: Field | None = None) -> np.ndarray:
    """Kernel of the Jacobian of the given generators at a common zero.

    Returns a basis (rows) of the tangent space at the point, over the point's
    field.  Uses the supplied generators, which can overestimate the tangent
    space at non-radical presentations.
    """
    Fk = point_field if point_field is not None else S.field
    point = np.asarray(point, dtype=np.int32).reshape(1, -1)
    if point.shape[1] != S.nvars:
        raise NotOnVariety("point has wrong number of coordinates")
    lifted = PolySystem(
        Fk,
        S.nvars,
        [
            {e: int(S.field.lift_codes([c], Fk)[0]) for e, c in p.items()}
            for p in S.polys
        ],
    )
    if not bool(_eval_zero_mask(lifted, Fk, point)[0]):
        raise NotOnVariety("point is not a common zero of the system")
    J = np.zeros((len(lifted.polys), S.nvars), dtype=np.int32)
    for r, p in enumerate(lifted.polys):
        for i in range(S.nvars):
            dp = poly_partial(p, i, Fk)
            if dp:
                powtbl = Fk.pow_table(max(1, poly_degree(dp)))
                acc = 0
                for e, c in dp.items():
                    term = c
                    for j, ej in enumerate(e):
                        if ej:
                            term = Fk.mul_codes(term, int(powtbl[point[0, j], ej]))
                    acc = Fk.add_codes(acc, term)
                J[r, i] = acc
    return linalg.kernel_basis(J, Fk)
