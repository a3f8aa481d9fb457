"""3-tensors over finite fields and their three faces.

A tensor is stored densely as an (n1, n2, n3) array of field codes.  The same
object serves as a trilinear form, as a bilinear map (x, y) -> (f_1, ..., f_n3),
and as the matrix space spanned by its slices.

Axis convention: slices along the first (x) axis are n2 x n3 matrices, so
contracting with x gives the matrix sum_i x_i A_i.
"""

from __future__ import annotations

import random

import numpy as np

from . import linalg
from .errors import (
    BadParams,
    DimensionMismatch,
    FieldMismatch,
    SingularMatrix,
    TensorFormatError,
)
from .fields import Field, parse_field

AXES = ("x", "y", "z")


class Tensor3:
    """Immutable dense 3-tensor of field codes."""

    def __init__(self, field: Field, entries):
        entries = np.asarray(entries, dtype=np.int32)
        if entries.ndim != 3:
            raise DimensionMismatch("entries must be a 3-D array")
        if entries.size and (entries.min() < 0 or entries.max() >= field.q):
            raise FieldMismatch("entry code out of field range")
        self.field = field
        self.entries = entries
        self.entries.setflags(write=False)
        self.dims = entries.shape

    def __eq__(self, other):
        return (
            isinstance(other, Tensor3)
            and other.field == self.field
            and other.dims == self.dims
            and np.array_equal(other.entries, self.entries)
        )

    def __hash__(self):
        return hash((self.field, self.dims, self.entries.tobytes()))

    def __repr__(self):
        return f"Tensor3({self.field.designation()}, dims={self.dims})"

    def is_zero(self) -> bool:
        return not self.entries.any()

    def lift(self, target: Field) -> "Tensor3":
        return Tensor3(target, self.field.lift_codes(self.entries, target))


class MatrixSpace:
    """A linear subspace of m x n matrices, given by an independent basis."""

    def __init__(self, field: Field, shape, basis):
        self.field = field
        self.shape = tuple(shape)
        basis = np.asarray(basis, dtype=np.int32).reshape(-1, *self.shape)
        flat = basis.reshape(basis.shape[0], int(np.prod(self.shape)))
        if linalg.rank(flat, field) != basis.shape[0]:
            raise BadParams("basis matrices are not linearly independent")
        self.basis = basis
        self.basis.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def flat_basis(self) -> np.ndarray:
        return self.basis.reshape(self.dim, -1)

    def combine(self, coeffs) -> np.ndarray:
        """The matrix sum_j coeffs_j * B_j."""
        coeffs = np.asarray(coeffs, dtype=np.int32)
        acc = np.zeros(self.shape, dtype=np.int32)
        F = self.field
        for j in range(self.dim):
            acc = F.add[acc, F.mul[coeffs[j], self.basis[j]]]
        return acc

    def contains(self, M) -> bool:
        return linalg.in_row_space(
            np.asarray(M, dtype=np.int32).ravel(),
            linalg.row_space_basis(self.flat_basis(), self.field),
            self.field,
        )


class SliceTerm:
    """One slice-rank-1 summand: linear(direction) * bilinear(other two)."""

    def __init__(self, field: Field, direction: str, linear, bilinear, source: str = ""):
        if direction not in AXES:
            raise BadParams(f"direction must be one of {AXES}")
        self.field = field
        self.direction = direction
        self.linear = np.asarray(linear, dtype=np.int32)
        self.bilinear = np.asarray(bilinear, dtype=np.int32)
        self.source = source

    def dense(self, dims) -> np.ndarray:
        """The (n1, n2, n3) coefficient array of this term."""
        n1, n2, n3 = dims
        F = self.field
        if self.direction == "x":
            if self.linear.shape != (n1,) or self.bilinear.shape != (n2, n3):
                raise DimensionMismatch("slice term shape mismatch")
            return F.mul[self.linear[:, None, None], self.bilinear[None, :, :]]
        if self.direction == "y":
            if self.linear.shape != (n2,) or self.bilinear.shape != (n1, n3):
                raise DimensionMismatch("slice term shape mismatch")
            return F.mul[self.linear[None, :, None], self.bilinear[:, None, :]]
        if self.linear.shape != (n3,) or self.bilinear.shape != (n1, n2):
            raise DimensionMismatch("slice term shape mismatch")
        return F.mul[self.linear[None, None, :], self.bilinear[:, :, None]]


# ---------------------------------------------------------------------------
# core operations
# ---------------------------------------------------------------------------

def _check_vec(v, n, F: Field):
    v = np.asarray(v, dtype=np.int32)
    if v.shape != (n,):
        raise DimensionMismatch(f"vector of length {v.shape} does not match {n}")
    if v.size and (v.min() < 0 or v.max() >= F.q):
        raise FieldMismatch("vector code out of field range")
    return v


def contract(T: Tensor3, axis: str, v) -> np.ndarray:
    """The matrix sum_i v_i A_i, slicing along the given axis."""
    idx = AXES.index(axis)
    v = _check_vec(v, T.dims[idx], T.field)
    moved = np.moveaxis(T.entries, idx, 0)
    F = T.field
    acc = np.zeros(moved.shape[1:], dtype=np.int32)
    for i in range(moved.shape[0]):
        if v[i]:
            acc = F.add[acc, F.mul[v[i], moved[i]]]
    return acc


def contract_x(T: Tensor3, x) -> np.ndarray:
    return contract(T, "x", x)


def eval_trilinear(T: Tensor3, x, y, z) -> int:
    """Exact value of sum a_{ijk} x_i y_j z_k, as a field code."""
    M = contract_x(T, x)
    y = _check_vec(y, T.dims[1], T.field)
    z = _check_vec(z, T.dims[2], T.field)
    row = linalg.vec_mat(y, M, T.field)
    F = T.field
    acc = 0
    for j in range(len(z)):
        acc = F.add_codes(acc, F.mul_codes(int(row[j]), int(z[j])))
    return acc


def slices(T: Tensor3, axis: str) -> np.ndarray:
    idx = AXES.index(axis)
    return np.moveaxis(T.entries, idx, 0)


def slice_space(T: Tensor3, axis: str) -> MatrixSpace:
    """Span of the slices along an axis, with redundant slices removed."""
    sl = slices(T, axis)
    flat = sl.reshape(sl.shape[0], -1)
    basis = linalg.row_space_basis(flat, T.field)
    return MatrixSpace(T.field, sl.shape[1:], basis.reshape(-1, *sl.shape[1:]))


def gl_act(T: Tensor3, axis: str, M) -> Tensor3:
    """Transform one axis by an invertible matrix: new slices A'_i = sum_l M_il A_l."""
    idx = AXES.index(axis)
    M = np.asarray(M, dtype=np.int32)
    n = T.dims[idx]
    if M.shape != (n, n):
        raise DimensionMismatch(f"matrix shape {M.shape} does not match axis dim {n}")
    if linalg.inverse(M, T.field) is None:
        raise SingularMatrix("gl_act requires an invertible matrix")
    moved = np.moveaxis(T.entries, idx, 0)
    F = T.field
    out = np.zeros_like(moved)
    for i in range(n):
        for l in range(n):
            if M[i, l]:
                out[i] = F.add[out[i], F.mul[M[i, l], moved[l]]]
    return Tensor3(T.field, np.moveaxis(out, 0, idx))


def direct_sum(T: Tensor3, S: Tensor3) -> Tensor3:
    if T.field != S.field:
        raise FieldMismatch("direct sum requires a common field")
    n1, n2, n3 = T.dims
    m1, m2, m3 = S.dims
    out = np.zeros((n1 + m1, n2 + m2, n3 + m3), dtype=np.int32)
    out[:n1, :n2, :n3] = T.entries
    out[n1:, n2:, n3:] = S.entries
    return Tensor3(T.field, out)


def sub(T: Tensor3, S: Tensor3) -> Tensor3:
    if T.field != S.field:
        raise FieldMismatch("subtraction requires a common field")
    if T.dims != S.dims:
        raise DimensionMismatch("subtraction requires equal dims")
    F = T.field
    return Tensor3(F, F.add[T.entries, F.neg[S.entries]])


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def zero_tensor(field: Field, dims) -> Tensor3:
    return Tensor3(field, np.zeros(dims, dtype=np.int32))


def identity_tensor(field: Field, n: int) -> Tensor3:
    e = np.zeros((n, n, n), dtype=np.int32)
    for i in range(n):
        e[i, i, i] = 1
    return Tensor3(field, e)


def diagonal_tensor(field: Field, values) -> Tensor3:
    values = [v if isinstance(v, int) else v.code for v in values]
    n = len(values)
    e = np.zeros((n, n, n), dtype=np.int32)
    for i, v in enumerate(values):
        e[i, i, i] = v % field.q
    return Tensor3(field, e)


def levi_civita(field: Field) -> Tensor3:
    e = np.zeros((3, 3, 3), dtype=np.int32)
    one, minus = 1, field.neg_code(1)
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        e[i, j, k] = one
    for (i, j, k) in [(0, 2, 1), (2, 1, 0), (1, 0, 2)]:
        e[i, j, k] = minus
    return Tensor3(field, e)


def random_tensor(field: Field, dims, seed: int) -> Tensor3:
    rng = random.Random(seed)
    e = np.array(
        [rng.randrange(field.q) for _ in range(int(np.prod(dims)))], dtype=np.int32
    ).reshape(dims)
    return Tensor3(field, e)


def tk_family(field: Field, k: int) -> Tensor3:
    if k < 1:
        raise BadParams("k must be >= 1")
    T = levi_civita(field)
    out = T
    for _ in range(k - 1):
        out = direct_sum(out, T)
    return out


def gen_named(field: Field, name: str, **params) -> Tensor3:
    if name == "identity":
        return identity_tensor(field, int(params["n"]))
    if name == "levi_civita":
        return levi_civita(field)
    if name == "diagonal":
        return diagonal_tensor(field, params["values"])
    if name == "random":
        return random_tensor(field, tuple(params["dims"]), int(params["seed"]))
    if name == "tk_family":
        return tk_family(field, int(params["k"]))
    if name == "zero":
        return zero_tensor(field, tuple(params["dims"]))
    raise BadParams(f"unknown generator {name!r}")


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------

def dumps(T: Tensor3) -> str:
    """Canonical text serialization (sorted support, trimmed coefficients)."""
    n1, n2, n3 = T.dims
    lines = [f"tensor {T.field.designation()} {n1} {n2} {n3}"]
    for (i, j, k) in zip(*np.nonzero(T.entries)):
        coeffs = list(T.field.coeffs(int(T.entries[i, j, k])))
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        lines.append(f"{i} {j} {k} " + ",".join(str(c) for c in coeffs))
    return "\n".join(lines) + "\n"


def loads(text: str) -> Tensor3:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise TensorFormatError("empty tensor file")
    header = lines[0].split()
    if len(header) != 5 or header[0] != "tensor":
        raise TensorFormatError(f"bad header: {lines[0]!r}")
    field = parse_field(header[1])
    try:
        dims = tuple(int(t) for t in header[2:5])
    except ValueError:
        raise TensorFormatError(f"bad dims in header: {lines[0]!r}") from None
    if any(d < 0 for d in dims):
        raise TensorFormatError("negative dimension")
    entries = np.zeros(dims, dtype=np.int32)
    seen = set()
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 4:
            raise TensorFormatError(f"bad entry line: {ln!r}")
        try:
            i, j, k = int(parts[0]), int(parts[1]), int(parts[2])
            coeffs = [int(c) for c in parts[3].split(",")]
        except ValueError:
            raise TensorFormatError(f"bad entry line: {ln!r}") from None
        if not (0 <= i < dims[0] and 0 <= j < dims[1] and 0 <= k < dims[2]):
            raise TensorFormatError(f"index out of range: {ln!r}")
        if (i, j, k) in seen:
            raise TensorFormatError(f"duplicate index triple: {ln!r}")
        seen.add((i, j, k))
        if len(coeffs) > field.k:
            raise TensorFormatError(f"too many coefficients: {ln!r}")
        coeffs += [0] * (field.k - len(coeffs))
        entries[i, j, k] = field.elem(tuple(coeffs)).code
    return Tensor3(field, entries)


def load(path) -> Tensor3:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def dump(T: Tensor3, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(T))
