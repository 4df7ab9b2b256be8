"""Fitzpatrick functions of monotone operators in ``R^n x R^n``: exact evaluation,
coupling-gap estimates, convex-hull projections and discrete conjugation."""
from .core import (
    DEFAULT_TOL,
    INF,
    DimensionError,
    IndeterminateError,
    PairedPoint,
    TolerancePolicy,
    WeightedNorm,
    coupling,
    pair_dot,
    pp,
    weighted_norm,
    xadd,
    xscale,
)
from .opmodel import (
    CubicOperator,
    LinearMonotoneOperator,
    LinePiece,
    NotMonotoneError,
    PointPiece,
    PolygonalOperator,
    RayPiece,
    SegmentPiece,
    domain_hull,
    graph_hull,
    is_monotone,
    piece_inf_coupling,
    piece_sup_affine_quadratic,
    range_hull,
)
from .hull import (
    HullGenerators,
    ProjectionError,
    ProjectionResult,
    lemma_argmin_sigma_check,
    membership,
    project,
    separating_direction,
    support_value,
)
from .fitz import (
    SlackReport,
    boundary_point,
    estimate_m2,
    estimate_m3,
    estimate_m4,
    estimate_m7,
    estimate_main,
    fitzpatrick,
    gap,
    monotonically_related_gap,
    negative_coupling_witness,
    ni_falsify,
    projection_inclusion,
    affine_hull_shift,
    r1_implications,
    segment_probe,
    support_shifted,
    tplus_contains,
)
from .conjugate import (
    GridFunction,
    biconjugate,
    brute_conjugate,
    fast_conjugate,
    fenchel_young_check,
)

__version__ = "0.1.0"
