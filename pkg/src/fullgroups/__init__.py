"""Computational workbench for cocycles, marked colorings and walk probes
on finitely generated group actions."""

__version__ = "0.1.0"

from .cayley import (
    Ball,
    ExhaustiveEscapeOracle,
    GeodesicSegment,
    LinearEscapeOracle,
    build_ball,
    escape_constant,
    geodesics_between,
    growth_sequence,
)
from .coloring import (
    ColoredBall,
    Placement,
    RangePlan,
    audit_conditions,
    build_range_plan,
    coloring_from_dict,
    coloring_to_dict,
    construct_coloring,
    enumerate_delta_words,
    find_marked_copies,
    tight_range_plan,
    verify_3proper,
    verify_P1,
    verify_P2,
)
from .dynamics import (
    Configuration,
    Pattern,
    free_witness,
    involution_apply,
    pattern_at,
    pattern_language,
    shift_period_scan,
    word_apply,
)
from .epset import EPSet
from .groups import (
    Finite,
    FiniteGroupTable,
    FiniteIndex,
    FreeBackend,
    GeneratingSet,
    GroupElement,
    VirtZBackend,
    VirtZData,
    ZdBackend,
    dihedral_infinite,
    group_spec_dict,
    integers_as_even_extension,
    klein_cross_extension,
    load_group_spec,
    standard_generators,
    subgroup_classify,
)
from .orbits import (
    LineAffineAction,
    OrbitModel,
    OrbitPoint,
    PiecewiseElement,
    cocycle,
    defect_bound,
    halfline_A,
    line_action,
    model_from_dict,
    model_to_dict,
    piecewise_from_dict,
    piecewise_to_dict,
    stabilizer_orbit_probe,
    translate_defect,
)
from .walks import (
    ActionGraph,
    WalkStats,
    cayley_graph_source,
    decay_classify,
    free_radial_source,
    schreier_graph,
    srw_estimate,
    walk_csv,
)
