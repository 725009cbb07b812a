"""Points, m-flats, and subspace counting in F_q^n.

A point is a tuple of n field elements.  An m-flat is a coset of an
m-dimensional linear subspace, stored canonically: the basis is the unique
reduced row-echelon basis of the subspace, and the base point is the
lexicographically smallest point of the flat (equivalently, the unique
point whose pivot-column coordinates are all zero).  Canonical storage
makes equal flats compare equal as plain tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

from .errors import CeilingError, ValidationError
from .finite_field import FiniteField

# q^n above this is not enumerable point-by-point in reasonable time
ENUMERATION_CEILING = 1 << 16

Point = Tuple  # tuple of n FieldElements
Vector = Tuple  # same shape as Point, used for directions


def q_binomial(n: int, m: int, q: int) -> int:
    """Gaussian binomial: the number of m-dim subspaces of F_q^n, exactly."""
    if m < 0 or m > n or q < 2:
        raise ValidationError(f"invalid parameters: n={n}, m={m}, q={q}")
    num = 1
    den = 1
    for i in range(m):
        num *= q ** n - q ** i
        den *= q ** m - q ** i
    assert num % den == 0
    return num // den


@dataclass(frozen=True)
class GeometryParams:
    """Ambient description: m-flats of F_q^n."""

    q: int
    n: int
    m: int

    def __post_init__(self):
        if self.q < 2:
            raise ValidationError(f"invalid parameters: q={self.q}")
        if self.n < 1 or not 0 <= self.m < self.n:
            raise ValidationError(
                f"invalid parameters: need 0 <= m < n, got n={self.n}, m={self.m}"
            )

    def check_field(self, f: FiniteField):
        if f.q != self.q:
            raise ValidationError(f"field order {f.q} does not match q={self.q}")
        if self.q ** self.n > ENUMERATION_CEILING:
            raise CeilingError(f"enumeration ceiling exceeded: {self.q}^{self.n}")


@dataclass(frozen=True)
class Flat:
    """Canonical affine subspace: base point plus reduced echelon basis."""

    base: Point
    basis: Tuple[Vector, ...]
    m: int

    def __post_init__(self):
        if self.m != len(self.basis):
            raise ValidationError("flat dimension does not match basis length")


# ---------------------------------------------------------------------------
# vector helpers on element tuples

def vec_add(u, v, f: FiniteField):
    return tuple(f.add(a, b) for a, b in zip(u, v))

def vec_sub(u, v, f: FiniteField):
    return tuple(f.sub(a, b) for a, b in zip(u, v))

def vec_scale(s, u, f: FiniteField):
    return tuple(f.mul(s, a) for a in u)

def zero_vector(n: int, f: FiniteField):
    return (f.zero,) * n


def enumerate_points(n: int, f: FiniteField) -> List[Point]:
    """All q^n points in lexicographic coordinate order."""
    return [pt for pt in itertools.product(f.elements, repeat=n)]


def point_index(pt: Point, f: FiniteField) -> int:
    """Position of pt in enumerate_points order (coordinate 0 most significant)."""
    code = 0
    for coord in pt:
        code = code * f.q + f.index[coord]
    return code


def _rref(rows: Sequence[Vector], f: FiniteField) -> Tuple[Tuple[Vector, ...], Tuple[int, ...]]:
    """Reduced row echelon form; raises if the rows are dependent."""
    work = [list(r) for r in rows]
    n = len(work[0]) if work else 0
    pivots = []
    rank = 0
    for col in range(n):
        pivot_row = None
        for i in range(rank, len(work)):
            if work[i][col] != f.zero:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        work[rank], work[pivot_row] = work[pivot_row], work[rank]
        inv = f.inv(work[rank][col])
        work[rank] = [f.mul(inv, c) for c in work[rank]]
        for i in range(len(work)):
            if i != rank and work[i][col] != f.zero:
                coef = work[i][col]
                work[i] = [f.sub(a, f.mul(coef, b)) for a, b in zip(work[i], work[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(work):
            break
    if rank < len(work):
        raise ValidationError("basis vectors are linearly dependent")
    return tuple(tuple(r) for r in work), tuple(pivots)


def canonical_flat(base: Point, basis: Sequence[Vector], f: FiniteField) -> Flat:
    """Canonicalize an arbitrary (base, basis) description of a flat."""
    rows, pivots = _rref(basis, f)
    # zero out the pivot coordinates of the base point; the result is the
    # lexicographically smallest point of the flat
    b = list(base)
    for row, col in zip(rows, pivots):
        coef = b[col]
        if coef != f.zero:
            b = [f.sub(a, f.mul(coef, c)) for a, c in zip(b, row)]
    return Flat(base=tuple(b), basis=rows, m=len(rows))


def flat_points(fl: Flat, f: FiniteField) -> List[Point]:
    """All q^m points of the flat, in a fixed deterministic order."""
    pts = [fl.base]
    for row in fl.basis:
        scaled = [vec_scale(s, row, f) for s in f.elements]
        pts = [vec_add(p, sr, f) for sr in scaled for p in pts]
    return pts


def flat_contains(fl: Flat, x: Point, f: FiniteField) -> bool:
    """Membership test by exact elimination against the echelon basis."""
    v = list(vec_sub(x, fl.base, f))
    rows, pivots = _rref(fl.basis, f) if fl.basis else ((), ())
    for row, col in zip(rows, pivots):
        coef = v[col]
        if coef != f.zero:
            v = [f.sub(a, f.mul(coef, c)) for a, c in zip(v, row)]
    return all(c == f.zero for c in v)


def line_through_origin(x: Point, f: FiniteField) -> Flat:
    """The 1-flat {s*x}, canonicalized."""
    if all(c == f.zero for c in x):
        raise ValidationError("zero direction")
    return canonical_flat(zero_vector(len(x), f), [x], f)


# ---------------------------------------------------------------------------
# enumeration of all m-flats, duplicate-free by construction

def _echelon_patterns(n: int, m: int) -> Iterator[Tuple[Tuple[int, ...], List[Tuple[int, int]]]]:
    # every m-dim subspace has a unique reduced echelon basis; the free
    # cells are the entries right of a pivot and outside pivot columns
    for pivots in itertools.combinations(range(n), m):
        pivot_set = set(pivots)
        free_cells = [
            (i, c)
            for i, p_i in enumerate(pivots)
            for c in range(p_i + 1, n)
            if c not in pivot_set
        ]
        yield pivots, free_cells


def _iter_flat_data(g: GeometryParams, f: FiniteField):
    """Yield (rep_ivec, rows_ivec, span_ivecs) per flat, on element indices."""
    n, m, q = g.n, g.m, f.q
    if m == 0:
        one_span = [(0,) * n]
        for rep in itertools.product(range(q), repeat=n):
            yield rep, (), one_span
        return
    addt = f.index_add_table()
    mult = f.index_mul_table()
    one_idx = f.index[f.one]
    for pivots, free_cells in _echelon_patterns(n, m):
        non_pivots = [c for c in range(n) if c not in pivots]
        for values in itertools.product(range(q), repeat=len(free_cells)):
            rows = [[0] * n for _ in range(m)]
            for i, col in enumerate(pivots):
                rows[i][col] = one_idx
            for (i, c), v in zip(free_cells, values):
                rows[i][c] = v
            rows = [tuple(r) for r in rows]
            # span of the subspace, built row by row
            span = [(0,) * n]
            for row in rows:
                scaled = [tuple(mult[s][c] for c in row) for s in range(q)]
                span = [
                    tuple(addt[v[i]][sr[i]] for i in range(n))
                    for sr in scaled
                    for v in span
                ]
            # coset representatives: zero in pivot columns, free elsewhere
            for rep_vals in itertools.product(range(q), repeat=len(non_pivots)):
                rep = [0] * n
                for c, v in zip(non_pivots, rep_vals):
                    rep[c] = v
                yield tuple(rep), rows, span


def _ivec_to_point(iv, f: FiniteField) -> Point:
    els = f.elements
    return tuple(els[i] for i in iv)


def enumerate_flats(g: GeometryParams, f: FiniteField) -> List[Flat]:
    """Every m-flat of F_q^n exactly once, in a fixed deterministic order."""
    g.check_field(f)
    flats = [
        Flat(
            base=_ivec_to_point(rep, f),
            basis=tuple(_ivec_to_point(r, f) for r in rows),
            m=g.m,
        )
        for rep, rows, _ in _iter_flat_data(g, f)
    ]
    expected = q_binomial(g.n + 1, g.m + 1, g.q) - q_binomial(g.n, g.m + 1, g.q)
    assert len(flats) == expected, "flat enumeration disagrees with subspace count"
    return flats


def enumerate_flat_blocks(g: GeometryParams, f: FiniteField) -> List[Tuple[int, ...]]:
    """Point-index sets of every m-flat, aligned with enumerate_flats order."""
    g.check_field(f)
    n, q = g.n, f.q
    weights = [q ** (n - 1 - i) for i in range(n)]
    if g.m == 0:
        blocks = []
        for rep, _, _ in _iter_flat_data(g, f):
            blocks.append((sum(w * v for w, v in zip(weights, rep)),))
        return blocks
    addt = f.index_add_table()
    blocks = []
    for rep, _, span in _iter_flat_data(g, f):
        block = sorted(
            sum(w * addt[a][b] for w, a, b in zip(weights, rep, sv))
            for sv in span
        )
        blocks.append(tuple(block))
    return blocks
