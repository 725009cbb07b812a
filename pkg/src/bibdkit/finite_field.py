"""Exact arithmetic in GF(p^n).

Elements are polynomial coefficient vectors: a tuple of n integers in
[0, p), little-endian (index i holds the coefficient of x^i).  The field
fixes a monic irreducible modulus of degree n, chosen deterministically,
so two fields built from the same (p, n) are interchangeable.

Multiplication and inversion run on discrete-log tables built lazily from
a generator of the multiplicative group; the tables are an internal detail
and everything observable stays in the coefficient representation.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Optional

from .errors import CeilingError, ValidationError

# Fields larger than this cannot be enumerated element-by-element in
# reasonable time/memory, which all downstream geometry relies on.
FIELD_ORDER_CEILING = 1 << 16

# tuple of n ints in [0, p), little-endian polynomial coefficients
FieldElement = tuple

_INDEX_TABLE_CEILING = 1 << 10  # dense q x q tables only below this order


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m < 4:
        return True
    if m % 2 == 0:
        return False
    d = 3
    while d * d <= m:
        if m % d == 0:
            return False
        d += 2
    return True


# ---------------------------------------------------------------------------
# polynomial arithmetic over GF(p), coefficients little-endian, no padding

def _poly_trim(a: list) -> list:
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
    # m monic; reduce a modulo m in place on a copy
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * mi) % p
        a.pop()
    return _poly_trim(a)


def _poly_divides(d, a, p):
    """True if monic d divides a over GF(p)."""
    inv_lead = pow(d[-1], p - 2, p)
    d = [(c * inv_lead) % p for c in d]  # make monic
    return not _poly_mod(a, d, p)


def _is_irreducible(poly, p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    deg = len(poly) - 1
    if deg < 1:
        return False
    if poly[0] == 0 and deg > 1:
        return False  # divisible by x
    for d in range(1, deg // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            divisor = list(tail) + [1]
            if _poly_divides(divisor, poly, p):
                return False
    return True


def _smallest_irreducible(p: int, n: int) -> tuple:
    """Lexicographically smallest (on coefficient tuples) monic irreducible."""
    for tail in itertools.product(range(p), repeat=n):
        candidate = list(tail) + [1]
        if _is_irreducible(candidate, p):
            return tuple(candidate)
    raise ValidationError(f"no irreducible polynomial of degree {n} over GF({p})")


# ---------------------------------------------------------------------------


class FiniteField:
    """GF(p^n) with a fixed monic irreducible modulus.

    Immutable after construction; every operation is pure, so instances are
    safe to share across threads.
    """

    def __init__(self, p: int, n: int = 1, modulus: Optional[Iterable[int]] = None):
        if not is_prime(p):
            raise ValidationError(f"not prime: {p}")
        if n < 1:
            raise ValidationError(f"extension degree must be positive, got {n}")
        q = p ** n
        if q > FIELD_ORDER_CEILING:
            raise CeilingError(f"field too large: {p}^{n} > {FIELD_ORDER_CEILING}")
        self.p = p
        self.n = n
        self.q = q
        if modulus is None:
            modulus = _smallest_irreducible(p, n)
        else:
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != n + 1 or modulus[-1] != 1:
                raise ValidationError("modulus must be monic of degree n")
            if not _is_irreducible(list(modulus), p):
                raise ValidationError(f"modulus {modulus} is reducible over GF({p})")
        self.modulus = modulus

        # element i <-> i-th coefficient tuple in lexicographic order;
        # itertools.product varies the last position fastest, which is
        # exactly tuple-lex order, with the zero element first.
        self.elements = [c for c in itertools.product(range(p), repeat=n)]
        self.index = {e: i for i, e in enumerate(self.elements)}
        self.zero = self.elements[0]
        self.one = (1,) + (0,) * (n - 1)  # little-endian: constant coeff first

        self._log = None  # element index -> discrete log (None slot for 0)
        self._exp = None  # discrete log -> element index
        self._idx_add = None
        self._idx_mul = None

    # -- representation helpers ------------------------------------------------

    def __repr__(self):
        return f"FiniteField(p={self.p}, n={self.n})"

    def __eq__(self, other):
        return (
            isinstance(other, FiniteField)
            and (self.p, self.n, self.modulus) == (other.p, other.n, other.modulus)
        )

    def __hash__(self):
        return hash((self.p, self.n, self.modulus))

    def check_element(self, a) -> FieldElement:
        a = tuple(a)
        if a not in self.index:
            raise ValidationError(f"{a!r} is not an element of {self!r}")
        return a

    def element_index(self, a: FieldElement) -> int:
        return self.index[a]

    def element_at(self, i: int) -> FieldElement:
        return self.elements[i]

    # -- arithmetic --------------------------------------------------------

    def add(self, a: FieldElement, b: FieldElement) -> FieldElement:
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub(self, a: FieldElement, b: FieldElement) -> FieldElement:
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def neg(self, a: FieldElement) -> FieldElement:
        p = self.p
        return tuple((-x) % p for x in a)

    def mul(self, a: FieldElement, b: FieldElement) -> FieldElement:
        log, exp = self._log_tables()
        ia, ib = self.index[a], self.index[b]
        if ia == 0 or ib == 0:
            return self.zero
        return self.elements[exp[(log[ia] + log[ib]) % (self.q - 1)]]

    def inv(self, a: FieldElement) -> FieldElement:
        ia = self.index[a]
        if ia == 0:
            raise ValidationError("zero inverse")
        log, exp = self._log_tables()
        return self.elements[exp[(-log[ia]) % (self.q - 1)]]

    def pow(self, a: FieldElement, e: int) -> FieldElement:
        if e < 0:
            return self.pow(self.inv(a), -e)
        ia = self.index[a]
        if ia == 0:
            return self.one if e == 0 else self.zero
        log, exp = self._log_tables()
        return self.elements[exp[(log[ia] * e) % (self.q - 1)]]

    # -- internal tables ---------------------------------------------------

    def _mul_poly(self, a: FieldElement, b: FieldElement) -> FieldElement:
        prod = _poly_mod(_poly_mul(list(a), list(b), self.p), list(self.modulus), self.p)
        return tuple(prod) + (0,) * (self.n - len(prod))

    def _log_tables(self):
        if self._log is None:
            g = self._find_generator()
            exp = [0] * (self.q - 1)
            log = [None] * self.q
            cur = self.one
            for e in range(self.q - 1):
                i = self.index[cur]
                exp[e] = i
                log[i] = e
                cur = self._mul_poly(cur, g)
            self._log, self._exp = log, exp
        return self._log, self._exp

    def _find_generator(self) -> FieldElement:
        order = self.q - 1
        factors = []
        m = order
        d = 2
        while d * d <= m:
            if m % d == 0:
                factors.append(d)
                while m % d == 0:
                    m //= d
            d += 1
        if m > 1:
            factors.append(m)
        for cand in self.elements[1:]:
            if all(self._pow_poly(cand, order // f) != self.one for f in factors):
                return cand
        raise AssertionError("multiplicative group has no generator")  # unreachable

    def _pow_poly(self, a: FieldElement, e: int) -> FieldElement:
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self._mul_poly(result, base)
            base = self._mul_poly(base, base)
            e >>= 1
        return result

    def index_add_table(self):
        """Dense q x q addition table on element indices, for inner loops."""
        if self._idx_add is None:
            if self.q > _INDEX_TABLE_CEILING:
                raise CeilingError(f"index tables unavailable for q={self.q}")
            els = self.elements
            idx = self.index
            self._idx_add = [
                [idx[self.add(a, b)] for b in els] for a in els
            ]
        return self._idx_add

    def index_mul_table(self):
        """Dense q x q multiplication table on element indices."""
        if self._idx_mul is None:
            if self.q > _INDEX_TABLE_CEILING:
                raise CeilingError(f"index tables unavailable for q={self.q}")
            els = self.elements
            idx = self.index
            self._idx_mul = [
                [idx[self.mul(a, b)] for b in els] for a in els
            ]
        return self._idx_mul


def make_field(p: int, n: int = 1) -> FiniteField:
    """Build GF(p^n) with the lexicographically smallest irreducible modulus."""
    return FiniteField(p, n)


def make_field_of_order(q: int) -> FiniteField:
    """Build GF(q) from the field order alone (q must be a prime power)."""
    if q < 2:
        raise ValidationError(f"not a prime power: {q}")
    m = q
    p = None
    d = 2
    while d * d <= m:
        if m % d == 0:
            p = d
            break
        d += 1
    if p is None:
        p = m
    n = 0
    while m % p == 0 and m > 1:
        m //= p
        n += 1
    if m != 1:
        raise ValidationError(f"not a prime power: {q}")
    return make_field(p, n)


def field_arith(f: FiniteField, op: str, a, b=None) -> FieldElement:
    """Dispatch one field operation by name: add, sub, mul, inv, neg."""
    a = f.check_element(a)
    if op in ("add", "sub", "mul"):
        if b is None:
            raise ValidationError(f"binary op {op!r} needs two operands")
        b = f.check_element(b)
        return getattr(f, op)(a, b)
    if op in ("neg", "inv"):
        if b is not None:
            raise ValidationError(f"unary op {op!r} takes one operand")
        return getattr(f, op)(a)
    raise ValidationError(f"unknown field operation {op!r}")


def enumerate_elements(f: FiniteField) -> list:
    """All q elements exactly once, zero first, in the field's fixed order."""
    return list(f.elements)
