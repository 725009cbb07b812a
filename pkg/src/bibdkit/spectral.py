"""Bipartite point-block spectra and the expander mixing inequality.

The bipartite adjacency matrix of a design has a fully explicit spectrum:
+-sqrt(rk) once each, +-sqrt(r - lambda) with multiplicity |X| - 1 each,
and 0 with multiplicity |B| - |X|.  This module produces that closed-form
spectrum, cross-checks it against a dense symmetric eigensolver, verifies
the Gram identity N N^T = (r - lambda) I + lambda J, and evaluates both
sides of the mixing inequality for vertex subsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .errors import CeilingError, ValidationError
from .design import Design, DesignParams

_EIGENSOLVER_CEILING = 4000


@dataclass(frozen=True)
class BipartiteGraphView:
    """A biregular bipartite graph; for a design: left = points, right = blocks."""

    num_left: int
    num_right: int
    left_degree: int
    right_degree: int
    right_neighbors: Tuple[frozenset, ...]

    def __post_init__(self):
        if self.left_degree * self.num_left != self.right_degree * self.num_right:
            raise ValidationError(
                "not biregular: left_degree*|L| != right_degree*|R|"
            )
        if len(self.right_neighbors) != self.num_right:
            raise ValidationError("adjacency length does not match num_right")
        if any(len(nb) != self.right_degree for nb in self.right_neighbors):
            raise ValidationError("right vertex with wrong degree")
        left_deg = [0] * self.num_left
        for nb in self.right_neighbors:
            for i in nb:
                left_deg[i] += 1
        if any(deg != self.left_degree for deg in left_deg):
            raise ValidationError("left vertex with wrong degree")

    @classmethod
    def from_design(cls, d: Design) -> "BipartiteGraphView":
        p = d.params
        return cls(
            num_left=p.num_points,
            num_right=p.num_blocks,
            left_degree=p.r,
            right_degree=p.k,
            right_neighbors=tuple(frozenset(b) for b in d.blocks),
        )

    @property
    def edge_count(self) -> int:
        return self.left_degree * self.num_left

    def edges_between(self, S: Iterable[int], T: Iterable[int]) -> int:
        sset = set(S)
        return sum(len(self.right_neighbors[j] & sset) for j in T)


@dataclass(frozen=True)
class SpectrumReport:
    """Closed-form and (optionally) numeric spectrum of the adjacency matrix."""

    theoretical: Tuple[Tuple[float, int], ...]  # (eigenvalue, multiplicity)
    mu: float                                   # normalized second eigenvalue
    mu_squared: Fraction                        # exact value of mu^2
    numeric: Optional[Tuple[float, ...]] = None
    max_abs_deviation: Optional[float] = None

    def theoretical_sorted(self) -> List[float]:
        out: List[float] = []
        for value, mult in self.theoretical:
            out.extend([value] * mult)
        out.sort()
        return out


def theoretical_spectrum(p: DesignParams) -> SpectrumReport:
    """Exact adjacency spectrum from the design parameters alone."""
    p.validate()
    if p.num_blocks < p.num_points:
        raise ValidationError(
            f"Fisher violation: |B|={p.num_blocks} < |X|={p.num_points}"
        )
    top = math.sqrt(p.r * p.k)
    mid = math.sqrt(p.r - p.lam)
    pairs = {}
    for value, mult in (
        (top, 1),
        (-top, 1),
        (mid, p.num_points - 1),
        (-mid, p.num_points - 1),
        (0.0, p.num_blocks - p.num_points),
    ):
        if mult > 0:
            pairs[value] = pairs.get(value, 0) + mult
    theoretical = tuple(sorted(pairs.items(), reverse=True))
    mu_squared = Fraction(p.r - p.lam, p.r * p.k)
    return SpectrumReport(
        theoretical=theoretical,
        mu=math.sqrt(mu_squared),
        mu_squared=mu_squared,
    )


def adjacency_matrix(d: Design) -> np.ndarray:
    """Symmetric (|X|+|B|) x (|X|+|B|) bipartite adjacency matrix."""
    n_mat = d.incidence_matrix().astype(np.float64)
    x, b = n_mat.shape
    a_mat = np.zeros((x + b, x + b), dtype=np.float64)
    a_mat[:x, x:] = n_mat
    a_mat[x:, :x] = n_mat.T
    return a_mat


def numeric_spectrum(d: Design) -> SpectrumReport:
    """Dense eigensolve of the adjacency matrix, matched to the closed form."""
    p = d.params
    size = p.num_points + p.num_blocks
    if size > _EIGENSOLVER_CEILING:
        raise CeilingError(f"matrix size {size} exceeds eigensolver ceiling")
    report = theoretical_spectrum(p)
    eigenvalues = np.linalg.eigvalsh(adjacency_matrix(d))
    numeric = tuple(float(v) for v in eigenvalues)  # ascending
    theo = report.theoretical_sorted()
    deviation = max(abs(a - b) for a, b in zip(numeric, theo))
    return SpectrumReport(
        theoretical=report.theoretical,
        mu=report.mu,
        mu_squared=report.mu_squared,
        numeric=numeric,
        max_abs_deviation=deviation,
    )


def gram_matrix(d: Design) -> np.ndarray:
    """N N^T as exact integers (entry (i, j) counts blocks containing i and j)."""
    n_mat = d.incidence_matrix().astype(np.float64)
    return np.rint(n_mat @ n_mat.T).astype(np.int64)


def gram_identity_holds(d: Design) -> bool:
    """Entrywise check of N N^T = (r - lambda) I + lambda J."""
    p = d.params
    expected = np.full((p.num_points, p.num_points), p.lam, dtype=np.int64)
    np.fill_diagonal(expected, p.r)
    return bool(np.array_equal(gram_matrix(d), expected))


def mixing_check(
    g: BipartiteGraphView,
    S: Iterable[int],
    T: Iterable[int],
    mu: float,
) -> Tuple[float, float]:
    """Both sides of |e(S,T)/e(G) - alpha*beta| <= mu*sqrt(ab(1-a)(1-b)).

    The left side is computed in exact rational arithmetic before the final
    float conversion, so the comparison needs only a hair of float slack.
    """
    sset = frozenset(S)
    tset = frozenset(T)
    alpha = Fraction(len(sset), g.num_left)
    beta = Fraction(len(tset), g.num_right)
    edges = g.edges_between(sset, tset)
    lhs = abs(Fraction(edges, g.edge_count) - alpha * beta)
    radicand = alpha * beta * (1 - alpha) * (1 - beta)
    rhs = mu * math.sqrt(radicand)
    return float(lhs), rhs
