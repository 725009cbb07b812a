import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bibdkit import (
    BipartiteGraphView,
    GeometryParams,
    RichnessQuery,
    ValidationError,
    affine_design_params,
    ff_corollary_bounds,
    from_block_list,
    graph_rich_bound,
    incidence_bound,
    rich_block_bound,
    rich_point_bound,
    tightness_search,
    verify_bound,
    verify_bound_exhaustive,
    verify_bound_sampled,
)
from bibdkit.bounds import (
    design_rich_block_constant,
    design_rich_point_constant,
    graph_rich_constant,
    min_subset_size,
)
from tests.conftest import FANO_BLOCKS


def q22():
    return RichnessQuery.make(2, 2)


def q12():
    return RichnessQuery.make(1, 2)


def test_richness_query_validation():
    with pytest.raises(ValidationError):
        RichnessQuery.make(0, 2)
    with pytest.raises(ValidationError):
        RichnessQuery.make(-1, 2)
    with pytest.raises(ValidationError):
        RichnessQuery.make(1, 1)


def test_incidence_bound_fano(fano):
    expected, allowance = incidence_bound(fano.params, 3, 1)
    assert expected == Fraction(9, 7)
    assert allowance == pytest.approx(math.sqrt(6), abs=1e-15)


def test_incidence_bound_trivial(fano):
    expected, allowance = incidence_bound(fano.params, 0, 5)
    assert expected == 0 and allowance == 0.0
    expected, _ = incidence_bound(fano.params, 7, 7)
    assert expected == 21  # r|X|


def test_incidence_bound_range_check(fano):
    with pytest.raises(ValidationError):
        incidence_bound(fano.params, 8, 1)


def test_verify_incidence_collinear_triple(fano):
    report = verify_bound(fano, "incidence", P=fano.blocks[0], L=[0])
    assert report.measured == 3
    assert report.satisfied and report.hypothesis_met
    assert report.slack_ratio == pytest.approx((12 / 7) / math.sqrt(6), abs=1e-12)
    assert report.slack_ratio == pytest.approx(0.700, abs=1e-3)


def test_verify_incidence_full_sets(fano):
    report = verify_bound(fano, "incidence", P=range(7), L=range(7))
    assert report.measured == 21
    assert report.slack_ratio == 0.0


def test_rich_block_bound_fano(fano):
    min_size, guaranteed = rich_block_bound(fano.params, q22())
    assert min_size == 7
    assert design_rich_block_constant(fano.params, q22()) == Fraction(2, 3)
    assert guaranteed == Fraction(14, 3)
    report = verify_bound(fano, "rich-blocks", P=range(7), query=q22())
    assert report.measured == 7 and report.satisfied and report.hypothesis_met


def test_rich_block_bound_ag23(ag23):
    min_size, guaranteed = rich_block_bound(ag23.params, q12())
    assert min_size == 6
    assert design_rich_block_constant(ag23.params, q12()) == Fraction(2, 5)
    assert guaranteed == Fraction(24, 5)


def test_rich_point_bound_fano(fano):
    min_size, guaranteed = rich_point_bound(fano.params, q22())
    assert min_size == 7
    assert design_rich_point_constant(fano.params, q22()) == Fraction(2, 3)
    assert guaranteed == Fraction(14, 3)
    report = verify_bound(fano, "rich-points", L=range(7), query=q22())
    assert report.measured == 7 and report.satisfied


def test_rich_point_bound_ag23(ag23):
    _, guaranteed = rich_point_bound(ag23.params, q12())
    assert design_rich_point_constant(ag23.params, q12()) == Fraction(1, 3)
    assert guaranteed == 3


def test_constants_tend_to_one_as_epsilon_grows(fano):
    huge = RichnessQuery.make(Fraction(10 ** 9), 2)
    assert 1 - design_rich_block_constant(fano.params, huge) < 1e-8
    assert 1 - design_rich_point_constant(fano.params, huge) < 1e-8
    assert 1 - graph_rich_constant(Fraction(2, 9), 3, huge) < 1e-8


def test_rich_block_constant_strictly_increasing_in_epsilon(fano, ag23):
    grid = [Fraction(1, 10), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(7)]
    for params in (fano.params, ag23.params):
        values = [
            design_rich_block_constant(params, RichnessQuery.make(e, 2)) for e in grid
        ]
        assert all(a < b for a, b in zip(values, values[1:]))


def test_graph_bound_reproduces_design_bound_exactly(fano, ag23, ag32_m2):
    for d in (fano, ag23, ag32_m2):
        p = d.params
        g = BipartiteGraphView.from_design(d)
        mu2 = Fraction(p.r - p.lam, p.r * p.k)
        for eps, t in [(1, 2), (2, 3), (Fraction(1, 2), 2), (Fraction(5, 3), 4)]:
            query = RichnessQuery.make(eps, t)
            g_min, g_guaranteed = graph_rich_bound(g, mu2, query)
            d_min, d_guaranteed = rich_block_bound(p, query)
            assert g_min == d_min
            assert g_guaranteed == d_guaranteed


def test_complete_bipartite_has_constant_one():
    k22 = BipartiteGraphView(
        num_left=2,
        num_right=2,
        left_degree=2,
        right_degree=2,
        right_neighbors=(frozenset({0, 1}), frozenset({0, 1})),
    )
    min_size, guaranteed = graph_rich_bound(k22, 0, q12())
    assert min_size == 2
    assert guaranteed == 2
    # direct count: with S = L, every right vertex has 2 >= t neighbors in S
    assert all(len(nb) >= 2 for nb in k22.right_neighbors)


def test_ff_corollary_rich_flats():
    g = GeometryParams(q=3, n=2, m=1)
    out = ff_corollary_bounds(g, "rich_flats", q12())
    assert out["constant_asymptotic"] == Fraction(1, 3)
    assert out["guaranteed_asymptotic"] == 3  # (1/3) * 3^((m+1)(n-m))
    assert out["constant_exact"] == Fraction(2, 5)
    assert out["guaranteed_exact"] == Fraction(24, 5)
    assert out["min_P_size"] == 6


def test_ff_corollary_rich_points_hyperplane_case():
    # m = n-1 makes the q-power term q^0 = 1
    g = GeometryParams(q=5, n=2, m=1)
    out = ff_corollary_bounds(g, "rich_points", q12())
    assert out["constant_asymptotic"] == Fraction(1, 3)


def test_ff_corollary_rich_points_lines_in_space():
    g = GeometryParams(q=3, n=3, m=1)
    out = ff_corollary_bounds(g, "rich_points", q12())
    assert out["constant_asymptotic"] == Fraction(1, 7)
    assert out["guaranteed_asymptotic"] == Fraction(27, 7)


def test_ff_corollary_incidence():
    g = GeometryParams(q=3, n=2, m=1)
    out = ff_corollary_bounds(g, "incidence", size_p=3, size_l=4)
    assert out["density"] == Fraction(1, 3)
    assert out["exact_variance"] == 3  # r - lambda = 4 - 1
    assert out["asymptotic_variance"] == 3
    assert out["expected"] == Fraction(3 * 4 * 4, 12)
    assert out["allowance_exact"] == pytest.approx(math.sqrt(3 * 12))


def test_ff_corollary_unknown_name():
    with pytest.raises(ValidationError):
        ff_corollary_bounds(GeometryParams(q=3, n=2, m=1), "nope", q12())
    with pytest.raises(ValidationError, match="richness query"):
        ff_corollary_bounds(GeometryParams(q=3, n=2, m=1), "rich_flats")


def test_verify_sampled_fano_incidence_never_violates(fano):
    reports = verify_bound_sampled(fano, "incidence", budget=1000, seed=7)
    assert len(reports) == 1000
    assert not any(r.is_violation() for r in reports)


def test_hypothesis_unmet_is_not_a_violation(ag23):
    report = verify_bound(ag23, "rich-blocks", P=range(3), query=q12())
    assert not report.hypothesis_met
    assert not report.is_violation()


def test_verify_exhaustive_rich_blocks_ag23(ag23):
    reports = verify_bound_exhaustive(ag23, "rich-blocks", size_p=6, query=q12())
    assert len(reports) == 84
    assert all(r.hypothesis_met and r.satisfied for r in reports)


def test_verify_sampled_is_deterministic(fano):
    a = verify_bound_sampled(fano, "incidence", budget=50, seed=3)
    b = verify_bound_sampled(fano, "incidence", budget=50, seed=3)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]


def test_verify_bound_argument_validation(fano):
    with pytest.raises(ValidationError, match="unknown bound"):
        verify_bound(fano, "nonsense", P=range(2))
    with pytest.raises(ValidationError, match="richness query"):
        verify_bound(fano, "rich-blocks", P=range(7))
    with pytest.raises(ValidationError):
        verify_bound_sampled(fano, "incidence", budget=0, seed=1)


def test_tightness_search_incidence(fano):
    report = tightness_search(fano, "incidence", budget=400, seed=1)
    assert report.hypothesis_met
    assert 0.0 <= report.slack_ratio <= 1.0
    again = tightness_search(fano, "incidence", budget=400, seed=1)
    assert report.to_dict() == again.to_dict()


def test_tightness_search_rich_points(ag23):
    report = tightness_search(ag23, "rich-points", budget=300, seed=5, query=q12())
    assert report.hypothesis_met
    assert report.slack_ratio >= 1.0  # the theorem says measured >= bound
    assert report.parameters["search_seed"] == 5


def test_min_subset_size_formula(fano):
    assert min_subset_size(fano.params, q22()) == Fraction(3 * 7, 3) * 1
    assert min_subset_size(fano.params, RichnessQuery.make(Fraction(1, 2), 3)) == (
        Fraction(3, 2) * 2 * Fraction(7, 3)
    )


@settings(max_examples=80, deadline=None)
@given(
    P=st.frozensets(st.integers(0, 6)),
    L=st.frozensets(st.integers(0, 6)),
)
def test_incidence_theorem_is_never_violated(P, L):
    d = from_block_list(7, FANO_BLOCKS)
    report = verify_bound(d, "incidence", P=P, L=L)
    assert report.satisfied


def test_consistency_identity_sample():
    rng = random.Random(42)
    pools = [
        affine_design_params(GeometryParams(q=q, n=n, m=m))
        for q in (2, 3, 4, 5)
        for n in (2, 3)
        for m in range(1, n)
    ]
    for _ in range(20):
        p = rng.choice(pools)
        eps = Fraction(rng.randint(1, 50), rng.randint(1, 50))
        t = rng.randint(2, 8)
        query = RichnessQuery.make(eps, t)
        mu2 = Fraction(p.r - p.lam, p.r * p.k)
        assert graph_rich_constant(mu2, p.k, query) == design_rich_block_constant(
            p, query
        )
