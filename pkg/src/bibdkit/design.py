"""Balanced incomplete block designs: storage, validation, incidence queries.

A design is a point set {0, ..., |X|-1} together with a list of k-subsets
(blocks) such that every point lies in r blocks, every pair of distinct
points lies in lambda blocks, and no block is the whole point set.
Construction always validates; an invalid design cannot exist.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import CeilingError, ValidationError
from .finite_field import FiniteField, make_field_of_order
from .geometry import GeometryParams, Point, enumerate_flat_blocks, enumerate_points, q_binomial

# companion bitmasks make |block ∩ P| a popcount; skip them for huge designs
_BITSET_CEILING = 4096
# guard against runaway flat enumerations (total incidences)
_INCIDENCE_CEILING = 20_000_000


@dataclass(frozen=True)
class DesignParams:
    """The five numeric parameters of an (r, k, lambda)-design."""

    num_points: int
    num_blocks: int
    r: int
    k: int
    lam: int

    def validate(self):
        if self.r * self.num_points != self.k * self.num_blocks:
            raise ValidationError(
                f"parameter relation r|X| = k|B| fails: "
                f"{self.r}*{self.num_points} != {self.k}*{self.num_blocks}"
            )
        if self.lam * (self.num_points - 1) != self.r * (self.k - 1):
            raise ValidationError(
                f"parameter relation lambda(|X|-1) = r(k-1) fails for {self}"
            )
        if self.k >= self.num_points:
            raise ValidationError("degenerate block: a block contains all points")


@dataclass(frozen=True)
class SubsetPair:
    """A subset of point indices and a subset of block indices."""

    P: FrozenSet[int]
    L: FrozenSet[int]

    def check(self, d: "Design"):
        if self.P and not (0 <= min(self.P) and max(self.P) < d.params.num_points):
            raise ValidationError("point index out of range")
        if self.L and not (0 <= min(self.L) and max(self.L) < d.params.num_blocks):
            raise ValidationError("block index out of range")


@dataclass(frozen=True)
class Design:
    """A validated design.  Use from_block_list / from_affine_geometry."""

    params: DesignParams
    blocks: Tuple[Tuple[int, ...], ...]
    point_labels: Optional[Tuple[Point, ...]] = None
    block_masks: Optional[Tuple[int, ...]] = field(default=None, repr=False)

    def incidence_matrix(self) -> np.ndarray:
        """0/1 point-by-block matrix N with N[i, j] = 1 iff point i in block j."""
        n_mat = np.zeros((self.params.num_points, self.params.num_blocks), dtype=np.float32)
        for j, blk in enumerate(self.blocks):
            n_mat[list(blk), j] = 1.0
        return n_mat

    def point_mask(self, pts: Iterable[int]) -> int:
        mask = 0
        for i in pts:
            mask |= 1 << i
        return mask


def _infer_params(num_points: int, blocks: Sequence[Sequence[int]]) -> DesignParams:
    if num_points < 2:
        raise ValidationError("a design needs at least two points")
    if not blocks:
        raise ValidationError("not block-uniform: design has no blocks")

    sizes = {len(set(b)) for b in blocks}
    if any(len(set(b)) != len(b) for b in blocks):
        raise ValidationError("block contains repeated points")
    if len(sizes) != 1:
        raise ValidationError(f"not block-uniform: block sizes {sorted(sizes)}")
    k = sizes.pop()
    if k >= num_points:
        raise ValidationError("degenerate block: a block contains all points")

    degree = [0] * num_points
    for b in blocks:
        for x in b:
            if not 0 <= x < num_points:
                raise ValidationError(f"point index {x} out of range")
            degree[x] += 1
    degrees = set(degree)
    if len(degrees) != 1:
        raise ValidationError(f"not point-regular: point degrees {sorted(degrees)}")
    r = degrees.pop()

    # pair coverage via the Gram matrix N N^T; its off-diagonal entries are
    # exactly the pair counts (values stay far below 2^24, so float32 is exact)
    n_mat = np.zeros((num_points, len(blocks)), dtype=np.float32)
    for j, b in enumerate(blocks):
        n_mat[list(b), j] = 1.0
    gram = (n_mat @ n_mat.T).astype(np.int64)
    if not np.array_equal(np.diag(gram), np.full(num_points, r, dtype=np.int64)):
        raise ValidationError("not point-regular: Gram diagonal mismatch")
    off = gram[~np.eye(num_points, dtype=bool)]
    lam_values = np.unique(off)
    if len(lam_values) != 1:
        raise ValidationError(
            f"not pair-balanced: pair coverage varies over {lam_values.tolist()}"
        )
    lam = int(lam_values[0])

    params = DesignParams(num_points, len(blocks), r, k, lam)
    params.validate()
    return params


def _finish(params: DesignParams, blocks, point_labels=None) -> Design:
    blocks = tuple(tuple(sorted(b)) for b in blocks)
    masks = None
    if params.num_points <= _BITSET_CEILING:
        masks = tuple(sum(1 << i for i in b) for b in blocks)
    return Design(params=params, blocks=blocks, point_labels=point_labels, block_masks=masks)


def from_block_list(num_points: int, blocks: Sequence[Sequence[int]]) -> Design:
    """Validate an explicit block list and infer (r, k, lambda) by counting."""
    params = _infer_params(num_points, blocks)
    return _finish(params, blocks)


def affine_design_params(g: GeometryParams) -> DesignParams:
    """Design parameters of the points/m-flats design of F_q^n, in closed form."""
    q, n, m = g.q, g.n, g.m
    num_points = q ** n
    num_blocks = q_binomial(n + 1, m + 1, q) - q_binomial(n, m + 1, q)
    r = q_binomial(n, m, q)
    k = q ** m
    lam = q_binomial(n - 1, m - 1, q) if m >= 1 else 0
    params = DesignParams(num_points, num_blocks, r, k, lam)
    params.validate()
    return params


def from_affine_geometry(g: GeometryParams, f: Optional[FiniteField] = None) -> Design:
    """The design whose points are F_q^n and whose blocks are its m-flats."""
    expected = affine_design_params(g)
    if expected.num_blocks * expected.k > _INCIDENCE_CEILING:
        raise CeilingError(
            f"design too large: {expected.num_blocks} blocks of size {expected.k}"
        )
    if f is None:
        f = make_field_of_order(g.q)
    g.check_field(f)
    blocks = enumerate_flat_blocks(g, f)
    params = _infer_params(expected.num_points, blocks)
    if params != expected:
        raise ValidationError(
            f"enumerated design {params} does not match closed form {expected}"
        )
    labels = tuple(enumerate_points(g.n, f))
    return _finish(params, blocks, point_labels=labels)


# ---------------------------------------------------------------------------
# incidence statistics

def incidence_count(d: Design, s: SubsetPair) -> int:
    """Number of (point, block) incidences between s.P and s.L."""
    s.check(d)
    pmask = d.point_mask(s.P)
    if d.block_masks is not None:
        return sum((d.block_masks[j] & pmask).bit_count() for j in s.L)
    pset = set(s.P)
    return sum(len(pset.intersection(d.blocks[j])) for j in s.L)


def rich_blocks(d: Design, P: Iterable[int], t: int) -> FrozenSet[int]:
    """Indices of blocks containing at least t points of P."""
    if t < 1:
        raise ValidationError("richness threshold t must be >= 1")
    if d.block_masks is not None:
        pmask = d.point_mask(P)
        return frozenset(
            j
            for j, bmask in enumerate(d.block_masks)
            if (bmask & pmask).bit_count() >= t
        )
    pset = set(P)
    return frozenset(
        j for j, blk in enumerate(d.blocks) if len(pset.intersection(blk)) >= t
    )


def rich_points(d: Design, L: Iterable[int], t: int) -> FrozenSet[int]:
    """Indices of points lying in at least t blocks of L."""
    if t < 1:
        raise ValidationError("richness threshold t must be >= 1")
    degree = [0] * d.params.num_points
    for j in L:
        for x in d.blocks[j]:
            degree[x] += 1
    return frozenset(x for x, deg in enumerate(degree) if deg >= t)


# ---------------------------------------------------------------------------
# text file format:
#   bibd <|X|> <|B|> <r> <k> <lambda>
#   one line per block: k space-separated 0-based point indices
#   '#' starts a comment

def write_design(d: Design, stream) -> None:
    p = d.params
    stream.write(f"bibd {p.num_points} {p.num_blocks} {p.r} {p.k} {p.lam}\n")
    for blk in d.blocks:
        stream.write(" ".join(str(i) for i in blk) + "\n")


def design_to_text(d: Design) -> str:
    buf = io.StringIO()
    write_design(d, buf)
    return buf.getvalue()


def read_design(stream) -> Design:
    """Parse and re-validate; rejects designs that contradict their header."""
    header = None
    blocks: List[Tuple[int, ...]] = []
    for raw in stream:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 6 or parts[0] != "bibd":
                raise ValidationError(f"malformed design header: {raw.strip()!r}")
            try:
                header = tuple(int(x) for x in parts[1:])
            except ValueError as exc:
                raise ValidationError(f"malformed design header: {raw.strip()!r}") from exc
            continue
        try:
            blocks.append(tuple(int(x) for x in line.split()))
        except ValueError as exc:
            raise ValidationError(f"malformed block line: {raw.strip()!r}") from exc
    if header is None:
        raise ValidationError("empty design file")
    num_points, num_blocks, r, k, lam = header
    d = from_block_list(num_points, blocks)
    declared = DesignParams(num_points, num_blocks, r, k, lam)
    if d.params != declared:
        raise ValidationError(
            f"design file header {declared} does not match content {d.params}"
        )
    return d


def design_from_text(text: str) -> Design:
    return read_design(io.StringIO(text))


def load_design(path) -> Design:
    with open(path, "r", encoding="utf-8") as fh:
        return read_design(fh)


def save_design(d: Design, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_design(d, fh)
