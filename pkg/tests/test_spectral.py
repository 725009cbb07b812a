import math
import random
from fractions import Fraction

import numpy as np
import pytest

from bibdkit import (
    BipartiteGraphView,
    DesignParams,
    ValidationError,
    gram_identity_holds,
    mixing_check,
    numeric_spectrum,
    theoretical_spectrum,
)
from bibdkit.errors import CeilingError
from bibdkit.spectral import adjacency_matrix, gram_matrix


def test_theoretical_spectrum_fano(fano):
    rep = theoretical_spectrum(fano.params)
    expected = {
        3.0: 1,
        -3.0: 1,
        math.sqrt(2): 6,
        -math.sqrt(2): 6,
    }
    assert dict(rep.theoretical) == expected
    assert rep.mu == pytest.approx(math.sqrt(2) / 3, abs=1e-15)
    assert rep.mu_squared == Fraction(2, 9)


def test_theoretical_spectrum_ag23(ag23):
    rep = theoretical_spectrum(ag23.params)
    assert rep.mu == pytest.approx(0.5, abs=1e-15)
    assert rep.mu_squared == Fraction(3, 12)
    assert dict(rep.theoretical) == {
        math.sqrt(12): 1,
        -math.sqrt(12): 1,
        math.sqrt(3): 8,
        -math.sqrt(3): 8,
        0.0: 3,
    }


def test_theoretical_spectrum_ag22(ag22):
    rep = theoretical_spectrum(ag22.params)
    assert dict(rep.theoretical) == {
        math.sqrt(6): 1,
        -math.sqrt(6): 1,
        math.sqrt(2): 3,
        -math.sqrt(2): 3,
        0.0: 2,
    }


def test_theoretical_multiplicities_sum(fano, ag22, ag23, ag32_m1, ag32_m2):
    for d in (fano, ag22, ag23, ag32_m1, ag32_m2):
        rep = theoretical_spectrum(d.params)
        total = sum(mult for _, mult in rep.theoretical)
        assert total == d.params.num_points + d.params.num_blocks
        assert 0 <= rep.mu <= 1


def test_fisher_violation_detected():
    # arithmetically consistent parameters with fewer blocks than points;
    # no such design exists, and the spectrum formula must refuse them
    bad = DesignParams(25, 20, 8, 10, 3)
    bad.validate()
    with pytest.raises(ValidationError, match="Fisher violation"):
        theoretical_spectrum(bad)


def test_numeric_spectrum_fano(fano):
    rep = numeric_spectrum(fano)
    assert rep.max_abs_deviation < 1e-9
    assert len(rep.numeric) == 14


def test_numeric_spectrum_fixtures(ag22, ag23, ag32_m1, ag32_m2):
    for d in (ag22, ag23, ag32_m1, ag32_m2):
        rep = numeric_spectrum(d)
        assert rep.max_abs_deviation < 1e-8


def test_numeric_spectrum_symmetry_about_zero(ag23):
    rep = numeric_spectrum(ag23)
    values = sorted(rep.numeric)
    negated = sorted(-v for v in values)
    assert all(abs(a - b) < 1e-8 for a, b in zip(values, negated))


def test_largest_eigenvalue_is_sqrt_rk(fano, ag23):
    for d in (fano, ag23):
        rep = numeric_spectrum(d)
        assert max(rep.numeric) == pytest.approx(
            math.sqrt(d.params.r * d.params.k), abs=1e-8
        )


def test_gram_identity(fano, ag22, ag23):
    for d in (fano, ag22, ag23):
        assert gram_identity_holds(d)


def test_gram_matrix_values(fano):
    g = gram_matrix(fano)
    assert g.shape == (7, 7)
    assert np.all(np.diag(g) == 3)
    off = g[~np.eye(7, dtype=bool)]
    assert np.all(off == 1)


def test_ntn_and_nnt_share_nonzero_spectrum(ag23):
    n_mat = ag23.incidence_matrix().astype(np.float64)
    left = np.linalg.eigvalsh(n_mat @ n_mat.T)
    right = np.linalg.eigvalsh(n_mat.T @ n_mat)
    left_nonzero = sorted(v for v in left if abs(v) > 1e-8)
    right_nonzero = sorted(v for v in right if abs(v) > 1e-8)
    assert len(left_nonzero) == len(right_nonzero)
    assert all(abs(a - b) < 1e-8 for a, b in zip(left_nonzero, right_nonzero))


def test_adjacency_matrix_shape_and_degrees(fano):
    a = adjacency_matrix(fano)
    assert a.shape == (14, 14)
    assert np.array_equal(a, a.T)
    assert np.all(a.sum(axis=0) == 3)  # r = k = 3 for the Fano plane


def test_eigensolver_ceiling():
    big = DesignParams(4096, 4096, 3, 3, 3)  # only the size gate matters here

    class Fake:
        params = big

    with pytest.raises(CeilingError):
        numeric_spectrum(Fake())


def test_graph_view_from_design(fano):
    g = BipartiteGraphView.from_design(fano)
    assert g.edge_count == 21
    assert g.left_degree == 3 and g.right_degree == 3
    assert g.edges_between(range(7), range(7)) == 21


def test_graph_view_validation():
    with pytest.raises(ValidationError, match="biregular"):
        BipartiteGraphView(
            num_left=3,
            num_right=2,
            left_degree=2,
            right_degree=2,
            right_neighbors=(frozenset({0, 1}), frozenset({1, 2})),
        )
    with pytest.raises(ValidationError, match="degree"):
        BipartiteGraphView(
            num_left=2,
            num_right=2,
            left_degree=2,
            right_degree=2,
            right_neighbors=(frozenset({0, 1}), frozenset({0})),
        )


def test_mixing_check_trivial_subsets(fano):
    g = BipartiteGraphView.from_design(fano)
    mu = theoretical_spectrum(fano.params).mu
    assert mixing_check(g, range(7), range(7), mu) == (0.0, 0.0)
    lhs, rhs = mixing_check(g, [], range(3), mu)
    assert lhs == 0.0 and rhs == 0.0


def test_mixing_check_fano_block_meets_with_equality(fano):
    # S = points of one block, T = that block: both sides equal 4/49
    g = BipartiteGraphView.from_design(fano)
    mu = theoretical_spectrum(fano.params).mu
    lhs, rhs = mixing_check(g, fano.blocks[0], [0], mu)
    assert lhs == pytest.approx(4 / 49, abs=1e-15)
    assert rhs == pytest.approx(4 / 49, abs=1e-12)
    assert lhs <= rhs + 1e-12


def test_mixing_check_random_subsets(fano, ag23):
    for d in (fano, ag23):
        g = BipartiteGraphView.from_design(d)
        mu = theoretical_spectrum(d.params).mu
        rng = random.Random(13)
        for _ in range(2000):
            s = rng.sample(range(g.num_left), rng.randint(0, g.num_left))
            t = rng.sample(range(g.num_right), rng.randint(0, g.num_right))
            lhs, rhs = mixing_check(g, s, t, mu)
            assert lhs <= rhs + 1e-12
