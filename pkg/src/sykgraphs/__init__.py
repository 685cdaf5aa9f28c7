"""Combinatorics engine for stranded SYK Feynman graphs: building,
transforming and exhaustively enumerating them, computing the 1/N degree,
recognizing melonic graphs, and machine-checking melonic dominance."""

from .canonical import SizeGuardError, canonical_key
from .core import (
    DegreeReport,
    FaceSet,
    InvalidGraphError,
    Slot,
    StrandedGraph,
    UnderlyingGraph,
    build_graph,
    degree,
    face_line_sets,
    from_involutions,
    g_min,
    is_connected_g0,
    trace_faces,
    underlying_g0,
)
from .enumeration import (
    BudgetExceededError,
    EnumerationReport,
    classify_all,
    count_raw_structures,
    enumerate_graphs,
    random_graph,
    random_graph_rng,
    raw_cardinality,
    verify_theorem,
)
from .graphio import (
    GraphParseError,
    graph_from_dict,
    graph_to_dict,
    graph_to_dot,
    load_graph,
    save_graph,
)
from .melons import (
    MelonError,
    MelonSite,
    ReductionCertificate,
    find_melons,
    generate_melonic,
    is_melonic,
    melonic_insert,
    remove_melon,
    star_glue,
)
from .surgery import (
    CommonFacePair,
    ContractionError,
    CutReport,
    SurgeryError,
    WitnessRecord,
    analyze_cut,
    common_face_pairs,
    contract_disorder_line,
    reglue_gain_face,
    witness_audit,
    witness_non_maximal,
)

__version__ = "0.1.0"
