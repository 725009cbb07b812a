"""Triangle areas over F_q^2 and the distinct-areas experiment.

The area of an ordered triple (a, b, c) is the determinant of
[[1, 1, 1], [a_x, b_x, c_x], [a_y, b_y, c_y]], an element of F_q.  After
translating a common vertex z to the origin, the area of the triangle
(z, a, b) equals perp(a) . b with perp((x, y)) = (-y, x), which turns
counting distinct areas into counting distinct dot products; the
experiment pipeline below exploits exactly that reduction.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import HypothesisUnmetError, ValidationError
from .finite_field import FiniteField, make_field, make_field_of_order
from .geometry import Point, vec_sub

Rational = Fraction  # epsilons accepted as int/float/Fraction and made exact


@dataclass(frozen=True)
class PlanePointSet:
    """A set of distinct points of F_q^2."""

    field: FiniteField
    points: Tuple[Point, ...]

    def __post_init__(self):
        seen = set()
        for pt in self.points:
            if len(pt) != 2:
                raise ValidationError(f"not a plane point: {pt!r}")
            self.field.check_element(pt[0])
            self.field.check_element(pt[1])
            if pt in seen:
                raise ValidationError(f"duplicate point {pt!r}")
            seen.add(pt)

    def __len__(self):
        return len(self.points)

    @property
    def origin(self) -> Point:
        return (self.field.zero, self.field.zero)


@dataclass(frozen=True)
class DotProductHistogram:
    """nu(d) = number of pairs (a, b) in F x G with a . b = d, for every d."""

    field: FiniteField
    counts: Dict

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class DistinctAreasResult:
    z: Point
    t: int
    delta: Fraction
    lines_used: int
    num_distinct_areas: int
    constant: Fraction
    guarantee: float


def dot(a: Point, b: Point, f: FiniteField):
    return f.add(f.mul(a[0], b[0]), f.mul(a[1], b[1]))


def perp(a: Point, f: FiniteField) -> Point:
    """Rotate by a quarter turn: (x, y) -> (-y, x)."""
    return (f.neg(a[1]), a[0])


def triangle_area(a: Point, b: Point, c: Point, f: FiniteField):
    """Determinant of [[1,1,1],[a_x,b_x,c_x],[a_y,b_y,c_y]] in F_q."""
    minor_a = f.sub(f.mul(b[0], c[1]), f.mul(c[0], b[1]))
    minor_b = f.sub(f.mul(a[0], c[1]), f.mul(c[0], a[1]))
    minor_c = f.sub(f.mul(a[0], b[1]), f.mul(b[0], a[1]))
    return f.add(f.sub(minor_a, minor_b), minor_c)


# ---------------------------------------------------------------------------
# lines through the origin

def origin_line_directions(f: FiniteField) -> List[Point]:
    """Canonical representatives of the q+1 directions of the plane."""
    dirs = [(f.zero, f.one)]
    dirs.extend((f.one, e) for e in f.elements)
    return sorted(dirs)


def canonical_direction(v: Point, f: FiniteField) -> Point:
    """Scale a nonzero vector so its first nonzero coordinate is one."""
    if v[0] != f.zero:
        return (f.one, f.mul(f.inv(v[0]), v[1]))
    if v[1] != f.zero:
        return (f.zero, f.one)
    raise ValidationError("zero direction")


def origin_line_points(direction: Point, f: FiniteField) -> List[Point]:
    return [(f.mul(s, direction[0]), f.mul(s, direction[1])) for s in f.elements]


def max_origin_line_overlap(F: PlanePointSet) -> int:
    """max over nonzero x of |F intersect {s*x}|."""
    f = F.field
    per_line: Dict[Point, int] = {}
    for pt in F.points:
        if pt == F.origin:
            continue
        d = canonical_direction(pt, f)
        per_line[d] = per_line.get(d, 0) + 1
    return max(per_line.values(), default=0)


# ---------------------------------------------------------------------------
# dot-product multiplicities

def dot_product_histogram(F: PlanePointSet, G: PlanePointSet) -> DotProductHistogram:
    """Exact nu(d) for all d, by iterating every pair of F x G."""
    f = F.field
    if G.field != f:
        raise ValidationError("point sets live over different fields")
    if F.origin in F.points:
        raise ValidationError("origin in F")
    counts = {e: 0 for e in f.elements}
    for a in F.points:
        for b in G.points:
            counts[dot(a, b, f)] += 1
    return DotProductHistogram(field=f, counts=counts)


def nu_square_check(F: PlanePointSet, G: PlanePointSet) -> Tuple[int, Fraction]:
    """(sum of nu(d)^2, its upper bound |F|^2|G|^2/q + q|F||G| max|F ∩ l_x|)."""
    hist = dot_product_histogram(F, G)
    lhs = sum(v * v for v in hist.counts.values())
    q = F.field.q
    nf, ng = len(F), len(G)
    rhs = Fraction(nf * nf * ng * ng, q) + q * nf * ng * max_origin_line_overlap(F)
    return lhs, rhs


# ---------------------------------------------------------------------------
# rich lines through a common vertex

def center_point_constant(epsilon, t: int) -> Fraction:
    """Guaranteed fraction of q rich lines through the best vertex.

    Equals t*eps^2 / ((1+eps) * (eps^2(t-1) + 1 + eps)); at eps = 1 this is
    t / (2(t+1)), minimized at t = 2 where it is 1/3.
    """
    e = Fraction(epsilon)
    if e <= 0:
        raise ValidationError("epsilon must be positive")
    return (t * e ** 2) / ((1 + e) * (e ** 2 * (t - 1) + 1 + e))


def _direction_buckets(P: PlanePointSet, z: Point) -> Dict[Point, List[Point]]:
    f = P.field
    buckets: Dict[Point, List[Point]] = {}
    for pt in P.points:
        if pt == z:
            continue
        d = canonical_direction(vec_sub(pt, z, f), f)
        buckets.setdefault(d, []).append(pt)
    return buckets


def rich_line_vertex(P: PlanePointSet, t: int, epsilon) -> Tuple[Point, int]:
    """The point of P on the most t-rich lines, and how many such lines.

    A line is t-rich when it holds at least t points of P; only the q+1
    lines through the returned vertex are counted.
    """
    if t < 2:
        raise ValidationError("t must be an integer >= 2")
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValidationError("epsilon must be positive")
    q = P.field.q
    if len(P) < (1 + eps) * (t - 1) * q:
        raise HypothesisUnmetError(
            f"point set too small: {len(P)} < (1+eps)(t-1)q"
        )
    best_z = None
    best_count = -1
    for z in sorted(P.points):
        buckets = _direction_buckets(P, z)
        count = sum(1 for pts in buckets.values() if len(pts) + 1 >= t)
        if count > best_count:
            best_z, best_count = z, count
    return best_z, best_count


def distinct_areas_experiment(P: PlanePointSet, epsilon) -> DistinctAreasResult:
    """Count distinct triangle areas at a well-chosen common vertex.

    Pipeline: pick the richness threshold t maximizing the final constant,
    locate a vertex z on many t-rich lines, keep exactly t-1 points of P
    on each of ceil(c'q) of those lines, translate z to the origin, and
    count distinct perp(a) . b over the kept points.  The reported count
    is guaranteed to reach constant * q.
    """
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValidationError("epsilon must be positive")
    f = P.field
    q = f.q
    size = len(P)
    if size < (1 + eps) * q:
        raise HypothesisUnmetError(f"point set too small: {size} < (1+eps)q")

    best = None  # (constant, t, delta, cprime)
    t = 2
    while True:
        delta = Fraction(size, (t - 1) * q) - 1
        if delta <= 0:
            break
        cprime = center_point_constant(delta, t)
        constant = ((t - 1) * cprime ** 2) / ((t - 1) * cprime ** 2 + 1)
        if best is None or constant > best[0]:
            best = (constant, t, delta, cprime)
        t += 1
    constant, t, delta, cprime = best

    z, count = rich_line_vertex(P, t, delta)
    need = math.ceil(cprime * q)
    assert count >= need, "rich-line guarantee failed; this should be impossible"

    buckets = _direction_buckets(P, z)
    rich_dirs = sorted(d for d, pts in buckets.items() if len(pts) + 1 >= t)
    chosen = rich_dirs[:need]
    translated = []
    for d in chosen:
        for pt in sorted(buckets[d])[: t - 1]:
            translated.append(vec_sub(pt, z, f))
    areas = {dot(perp(a, f), b, f) for a in translated for b in translated}
    return DistinctAreasResult(
        z=z,
        t=t,
        delta=delta,
        lines_used=need,
        num_distinct_areas=len(areas),
        constant=constant,
        guarantee=float(constant * q),
    )


# ---------------------------------------------------------------------------
# exploratory search for point sets missing a triangle area

def triangle_areas_of_set(points: Sequence[Point], f: FiniteField) -> set:
    """Areas over all ordered triples (computed as +-det over 3-subsets)."""
    areas = set()
    for a, b, c in combinations(points, 3):
        d = triangle_area(a, b, c, f)
        areas.add(d)
        areas.add(f.neg(d))
    return areas


def missing_areas_of_set(points: Sequence[Point], f: FiniteField) -> Tuple:
    present = triangle_areas_of_set(points, f)
    return tuple(e for e in f.elements if e not in present)


def missing_area_search(
    q: int, size: int, budget: int, seed: int
) -> List[Tuple[Tuple[Point, ...], Tuple]]:
    """Annealed swap search for size-point sets whose triangles miss an area.

    Purely exploratory: returns every witness found (possibly none), each
    as (sorted point tuple, missing area values).  Deterministic per seed.
    """
    if size < 3:
        raise ValidationError("size must be at least 3")
    f = make_field_of_order(q)
    universe = [(x, y) for x in f.elements for y in f.elements]
    if size > len(universe):
        raise ValidationError("size exceeds number of points in the plane")
    rng = random.Random(seed)
    witnesses: Dict[frozenset, Tuple] = {}

    def score_of(pts) -> Tuple:
        missing = missing_areas_of_set(pts, f)
        if missing:
            witnesses.setdefault(frozenset(pts), missing)
        return missing

    state = rng.sample(universe, size)
    score = len(score_of(state))
    evals = 1
    since_accept = 0
    while evals < budget:
        if since_accept > 30:
            state = rng.sample(universe, size)
            score = len(score_of(state))
            evals += 1
            since_accept = 0
            continue
        idx = rng.randrange(size)
        replacement = rng.choice(universe)
        if replacement in state:
            since_accept += 1
            continue
        candidate = list(state)
        candidate[idx] = replacement
        cand_score = len(score_of(candidate))
        evals += 1
        temperature = max(0.01, 1.0 - evals / budget)
        worse_by = score - cand_score
        if cand_score >= score or rng.random() < math.exp(-worse_by / temperature):
            state, score = candidate, cand_score
            since_accept = 0
        else:
            since_accept += 1
    return sorted(
        (tuple(sorted(pts)), missing) for pts, missing in witnesses.items()
    )


# ---------------------------------------------------------------------------
# point-set file format:
#   fq2 <p> <n>
#   one point per line: 2n integers, the coefficient vectors of x then y

def write_points(ps: PlanePointSet, stream) -> None:
    f = ps.field
    stream.write(f"fq2 {f.p} {f.n}\n")
    for (x, y) in ps.points:
        stream.write(" ".join(str(c) for c in tuple(x) + tuple(y)) + "\n")


def read_points(stream) -> PlanePointSet:
    header = None
    rows: List[Tuple[int, ...]] = []
    for raw in stream:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 3 or parts[0] != "fq2":
                raise ValidationError(f"malformed point-set header: {raw.strip()!r}")
            try:
                header = (int(parts[1]), int(parts[2]))
            except ValueError as exc:
                raise ValidationError(f"malformed point-set header: {raw.strip()!r}") from exc
            continue
        try:
            rows.append(tuple(int(c) for c in line.split()))
        except ValueError as exc:
            raise ValidationError(f"malformed point line: {raw.strip()!r}") from exc
    if header is None:
        raise ValidationError("empty point-set file")
    p, n = header
    f = make_field(p, n)
    points = []
    for row in rows:
        if len(row) != 2 * n:
            raise ValidationError(f"point line has {len(row)} values, expected {2 * n}")
        points.append((tuple(row[:n]), tuple(row[n:])))
    return PlanePointSet(field=f, points=tuple(points))


def load_points(path) -> PlanePointSet:
    with open(path, "r", encoding="utf-8") as fh:
        return read_points(fh)


def save_points(ps: PlanePointSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_points(ps, fh)


def random_plane_points(
    f: FiniteField, size: int, seed: int, avoid_origin: bool = False
) -> PlanePointSet:
    """Uniform sample of `size` distinct plane points, seeded."""
    universe = [(x, y) for x in f.elements for y in f.elements]
    if avoid_origin:
        universe = [pt for pt in universe if pt != (f.zero, f.zero)]
    if size > len(universe):
        raise ValidationError("size exceeds number of available points")
    rng = random.Random(seed)
    return PlanePointSet(field=f, points=tuple(rng.sample(universe, size)))
