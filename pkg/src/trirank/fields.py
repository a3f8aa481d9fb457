"""Exact arithmetic in F_p and F_{p^k}.

Elements are represented by integer codes in [0, q).  The code of an element
with power-basis coefficients (c0, c1, ..., c_{k-1}) (low degree first) is
sum(c_i * p**i), so base-field scalars embed as their own residues.  All bulk
arithmetic goes through precomputed numpy tables, which keeps the enumeration
kernels in the rest of the package vectorizable.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

from .errors import (
    BudgetExceeded,
    DegreeOutOfBudget,
    DivisionByZero,
    FieldMismatch,
    NotPrime,
)

DEFAULT_MAX_Q = 3 ** 6


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# dense polynomial helpers over F_p (coefficient lists, low degree first)
# ---------------------------------------------------------------------------

def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a, m, p):
    # m monic
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        c = a[-1]
        if c:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - c * mi) % p
        a.pop()
    return _poly_trim(a)


def _is_irreducible(m, p):
    """Trial division by every monic polynomial of degree <= deg(m)/2."""
    deg = len(m) - 1
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for lower in itertools.product(range(p), repeat=d):
            divisor = list(lower) + [1]
            # remainder of m mod divisor
            if not _poly_mod(m, divisor, p):
                return False
    return True


def _lex_least_irreducible(p, k):
    """Lex-least monic irreducible of degree k over F_p (coeffs low-to-high)."""
    for lower in itertools.product(range(p), repeat=k):
        m = list(lower) + [1]
        if _is_irreducible(m, p):
            return tuple(m)
    raise AssertionError("no irreducible polynomial found")  # cannot happen


class Field:
    """A finite field F_{p^k} with table-driven exact arithmetic.

    Immutable after construction; safe to share across workers.
    """

    def __init__(self, p: int, k: int, max_q: int = DEFAULT_MAX_Q):
        if not _is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if not 1 <= k <= 6:
            raise DegreeOutOfBudget(f"extension degree {k} outside [1, 6]")
        q = p ** k
        if q > max_q:
            raise DegreeOutOfBudget(f"q = {p}^{k} = {q} exceeds budget {max_q}")
        self.p = p
        self.k = k
        self.q = q
        if k == 1:
            self.modulus = (0, 1)  # placeholder: elements are residues mod p
        else:
            self.modulus = _lex_least_irreducible(p, k)
        self._build_tables()

    # -- construction of arithmetic tables ---------------------------------

    def _code_to_coeffs(self, code):
        c = []
        for _ in range(self.k):
            code, r = divmod(code, self.p)
            c.append(r)
        return tuple(c)

    def _coeffs_to_code(self, coeffs):
        code = 0
        for c in reversed(coeffs):
            code = code * self.p + (c % self.p)
        return code

    def _mul_codes_slow(self, a, b):
        pa = list(self._code_to_coeffs(a))
        pb = list(self._code_to_coeffs(b))
        prod = _poly_mod(_poly_mul(pa, pb, self.p), list(self.modulus), self.p)
        prod += [0] * (self.k - len(prod))
        return self._coeffs_to_code(prod)

    def _build_tables(self):
        p, k, q = self.p, self.k, self.q
        digits = np.zeros((q, k), dtype=np.int64)
        codes = np.arange(q)
        rem = codes.copy()
        for i in range(k):
            digits[:, i] = rem % p
            rem //= p
        weights = p ** np.arange(k)
        # addition: digitwise mod p
        summed = (digits[:, None, :] + digits[None, :, :]) % p
        self.add = (summed * weights).sum(axis=2).astype(np.int32)
        self.neg = (((-digits) % p) * weights).sum(axis=1).astype(np.int32)
        # multiplication via a generator of the cyclic group
        g = self._find_generator()
        exp = np.zeros(q - 1, dtype=np.int64)
        exp[0] = 1
        for i in range(1, q - 1):
            exp[i] = self._mul_codes_slow(int(exp[i - 1]), g)
        log = np.zeros(q, dtype=np.int64)
        log[exp] = np.arange(q - 1)
        self._exp = exp
        self._log = log
        lsum = (log[1:, None] + log[None, 1:]) % (q - 1)
        mul = np.zeros((q, q), dtype=np.int32)
        mul[1:, 1:] = exp[lsum]
        self.mul = mul
        inv = np.zeros(q, dtype=np.int32)
        inv[1:] = exp[(-log[1:]) % (q - 1)]
        self.inv = inv
        # absolute trace, as a residue mod p
        tr = np.zeros(q, dtype=np.int64)
        for i in range(k):
            frob = np.zeros(q, dtype=np.int64)
            frob[1:] = exp[(log[1:] * pow(p, i)) % (q - 1)]
            tr = self.add[tr, frob]
        self.trace_res = (tr % p).astype(np.int32)  # prime-subfield codes are residues
        self._digits = digits
        for t in (self.add, self.neg, self.mul, self.inv, self.trace_res):
            t.setflags(write=False)
        self._pow_cache = {}

    def _find_generator(self):
        q = self.q
        order = q - 1
        prime_factors = set()
        n, d = order, 2
        while d * d <= n:
            while n % d == 0:
                prime_factors.add(d)
                n //= d
            d += 1
        if n > 1:
            prime_factors.add(n)
        for g in range(1, q):
            if all(self._pow_slow(g, order // f) != 1 for f in prime_factors):
                return g
        raise AssertionError("no generator found")

    def _pow_slow(self, a, e):
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul_codes_slow(result, base)
            base = self._mul_codes_slow(base, base)
            e >>= 1
        return result

    # -- element-level API --------------------------------------------------

    def elem(self, coeffs) -> "Elem":
        if isinstance(coeffs, int):
            coeffs = (coeffs,) + (0,) * (self.k - 1)
        coeffs = tuple(c % self.p for c in coeffs)
        if len(coeffs) != self.k:
            raise FieldMismatch(f"expected {self.k} coefficients, got {len(coeffs)}")
        return Elem(self, self._coeffs_to_code(coeffs))

    def from_code(self, code: int) -> "Elem":
        return Elem(self, int(code))

    def coeffs(self, code: int):
        return self._code_to_coeffs(int(code))

    def zero(self):
        return Elem(self, 0)

    def one(self):
        return Elem(self, 1)

    def add_codes(self, a, b):
        return int(self.add[a, b])

    def sub_codes(self, a, b):
        return int(self.add[a, self.neg[b]])

    def mul_codes(self, a, b):
        return int(self.mul[a, b])

    def neg_code(self, a):
        return int(self.neg[a])

    def inv_code(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0")
        return int(self.inv[a])

    def pow_code(self, a, e):
        if e == 0:
            return 1
        if a == 0:
            return 0
        return int(self._exp[(int(self._log[a]) * e) % (self.q - 1)])

    def pow_table(self, max_exp: int) -> np.ndarray:
        """(q, max_exp+1) table of a^e for all codes a and 0 <= e <= max_exp."""
        if max_exp not in self._pow_cache:
            tbl = np.zeros((self.q, max_exp + 1), dtype=np.int32)
            tbl[:, 0] = 1
            for e in range(1, max_exp + 1):
                tbl[:, e] = self.mul[tbl[:, e - 1], np.arange(self.q)]
            tbl.setflags(write=False)
            self._pow_cache[max_exp] = tbl
        return self._pow_cache[max_exp]

    def elements(self, budget: int | None = None):
        """All q elements in a fixed deterministic order, 0 first."""
        if budget is not None and self.q > budget:
            raise BudgetExceeded(f"q = {self.q} exceeds enumeration budget {budget}")
        return [Elem(self, c) for c in range(self.q)]

    def trace_code(self, a) -> int:
        """Absolute trace to F_p, as a residue in [0, p)."""
        return int(self.trace_res[a])

    def char_eval_code(self, a) -> complex:
        """chi(a) = exp(2*pi*i * trace(a) / p)."""
        return np.exp(2j * np.pi * self.trace_code(a) / self.p)

    def char_sum(self, codes) -> complex:
        """Sum of chi over an array of codes, via an exact residue histogram."""
        residues = self.trace_res[np.asarray(codes, dtype=np.int64)]
        counts = np.bincount(residues.ravel(), minlength=self.p)
        roots = np.exp(2j * np.pi * np.arange(self.p) / self.p)
        return complex(counts @ roots)

    # -- relationships ------------------------------------------------------

    def extension(self, m: int, max_q: int = DEFAULT_MAX_Q) -> "Field":
        """The degree-m extension.  Only prime base fields can be extended."""
        if m == 1:
            return self
        if self.k != 1:
            raise FieldMismatch("extension towers are only built over prime fields")
        return make_field(self.p, m, max_q=max_q)

    def lift_codes(self, codes, target: "Field"):
        """Re-express codes of this field as codes of target (base-field lift)."""
        if target is self or (target.p, target.k) == (self.p, self.k):
            return np.asarray(codes, dtype=np.int32)
        if self.k != 1 or target.p != self.p:
            raise FieldMismatch(
                f"cannot embed F_{self.p}^{self.k} into F_{target.p}^{target.k}"
            )
        return np.asarray(codes, dtype=np.int32)  # residues are valid codes

    def designation(self) -> str:
        return f"{self.p}^{self.k}"

    def __eq__(self, other):
        return (
            isinstance(other, Field)
            and (self.p, self.k, self.modulus) == (other.p, other.k, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __repr__(self):
        return f"Field({self.p}^{self.k})"


class Elem:
    """A field element: thin wrapper over an integer code."""

    __slots__ = ("field", "code")

    def __init__(self, field: Field, code: int):
        if not 0 <= code < field.q:
            raise FieldMismatch(f"code {code} out of range for {field!r}")
        self.field = field
        self.code = code

    @property
    def coeffs(self):
        return self.field.coeffs(self.code)

    def _check(self, other):
        if not isinstance(other, Elem) or other.field != self.field:
            raise FieldMismatch("operands from different fields")

    def __add__(self, other):
        self._check(other)
        return Elem(self.field, self.field.add_codes(self.code, other.code))

    def __sub__(self, other):
        self._check(other)
        return Elem(self.field, self.field.sub_codes(self.code, other.code))

    def __mul__(self, other):
        self._check(other)
        return Elem(self.field, self.field.mul_codes(self.code, other.code))

    def __neg__(self):
        return Elem(self.field, self.field.neg_code(self.code))

    def inverse(self):
        return Elem(self.field, self.field.inv_code(self.code))

    def __pow__(self, e):
        return Elem(self.field, self.field.pow_code(self.code, e))

    def trace(self) -> int:
        return self.field.trace_code(self.code)

    def char(self) -> complex:
        return self.field.char_eval_code(self.code)

    def __eq__(self, other):
        return (
            isinstance(other, Elem)
            and other.field == self.field
            and other.code == self.code
        )

    def __hash__(self):
        return hash((self.field, self.code))

    def __bool__(self):
        return self.code != 0

    def __repr__(self):
        if self.field.k == 1:
            return f"{self.code}"
        return f"Elem{self.coeffs}"


@functools.lru_cache(maxsize=None)
def _make_field_cached(p, k, max_q):
    return Field(p, k, max_q=max_q)


def make_field(p: int, k: int = 1, max_q: int = DEFAULT_MAX_Q) -> Field:
    """F_{p^k} with the lex-least monic irreducible modulus (deterministic)."""
    return _make_field_cached(p, k, max_q)


def parse_field(designation: str, max_q: int = DEFAULT_MAX_Q) -> Field:
    """Parse a 'p^k' (or bare 'p') field designation string."""
    text = designation.strip()
    if "^" in text:
        p_str, k_str = text.split("^", 1)
    else:
        p_str, k_str = text, "1"
    try:
        p, k = int(p_str), int(k_str)
    except ValueError:
        raise FieldMismatch(f"bad field designation {designation!r}") from None
    return make_field(p, k, max_q=max_q)
