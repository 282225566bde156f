"""Hausdorff dimension of the boundary of the Levy dragon.

The boundary of ``F^k(T0)`` is counted through 15-bit neighbourhood types
whose evolution under subdivision is a finite linear system; the dimension
is ``ln(lambda) / ln(sqrt 2)`` where ``lambda`` is the Perron root of that
system's primitive core block.

>>> from levy_boundary import stable_set
>>> len(stable_set())
752
"""
from ._kernels import BACKEND
from .dragon import (
    OccupancySet,
    boundary_count_geometric,
    covered_counts,
    ifs_map,
    iterate,
    neighborhood_type,
    render,
    type_census,
)
from .lattice import (
    DyadicPoint,
    LatticeTriangle,
    Star,
    T0,
    exterior_children,
    n0,
    star,
    star_membership_index,
    subdivide,
)
from .spectral import (
    SpectralReport,
    TransitionMatrix,
    block_partition,
    boundary_growth_series,
    build_matrix,
    check_permutation,
    dimension_from_growth,
    power_method,
    primitivity_exponent,
    rigorous_bounds,
    spectral_report,
)
from .typedyn import (
    TypeCensus,
    TypeClassification,
    boundary_count,
    child_types,
    classify,
    evolve,
    seed_census,
    stable_set,
)

__version__ = "0.1.0"
