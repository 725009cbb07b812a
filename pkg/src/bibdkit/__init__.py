"""Block designs over finite geometries: construction, spectra, incidence bounds."""

from .errors import CeilingError, HypothesisUnmetError, ValidationError
from .finite_field import (
    FiniteField,
    enumerate_elements,
    field_arith,
    make_field,
    make_field_of_order,
)
from .geometry import (
    Flat,
    GeometryParams,
    canonical_flat,
    enumerate_flats,
    enumerate_points,
    flat_contains,
    flat_points,
    line_through_origin,
    q_binomial,
)
from .design import (
    Design,
    DesignParams,
    SubsetPair,
    affine_design_params,
    from_affine_geometry,
    from_block_list,
    incidence_count,
    load_design,
    rich_blocks,
    rich_points,
    save_design,
)
from .spectral import (
    BipartiteGraphView,
    SpectrumReport,
    gram_identity_holds,
    mixing_check,
    numeric_spectrum,
    theoretical_spectrum,
)
from .bounds import (
    BoundReport,
    RichnessQuery,
    ff_corollary_bounds,
    graph_rich_bound,
    incidence_bound,
    rich_block_bound,
    rich_point_bound,
    tightness_search,
    verify_bound,
    verify_bound_exhaustive,
    verify_bound_sampled,
)
from .triangles import (
    DistinctAreasResult,
    DotProductHistogram,
    PlanePointSet,
    distinct_areas_experiment,
    dot_product_histogram,
    missing_area_search,
    nu_square_check,
    rich_line_vertex,
    triangle_area,
)

__version__ = "0.1.0"
