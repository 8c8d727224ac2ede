"""Desk-scale laboratory for ends of groups and degree-one cohomology."""

from .serre_graphs import GeometricEdge, Path, SerreGraph, random_graph
from .qlinalg import (
    FreeModuleBasis,
    SparseMatrixQ,
    augmentation_matrix,
    delta_matrix,
    rank_kernel_cokernel,
    verify_short_exact,
)
from .group_backends import BallEnumeration, FiniteGroup, RewritingGroup, ball_enumerate
from .bass_serre import (
    Certificate,
    GraphOfFiniteGroups,
    HalfTreeSplitting,
    PiOne,
    PiOneElement,
    exactness_on_truncation,
    splitting_classify,
    tree_truncation,
    validate,
)
from .cayley_abels import GeneratingPair, RoughCayleyTruncation, Subgroup, build, coset_canonical, trivial_subgroup
from .ends_cuts import Cut, EndsEstimate, classify_ends, escaping_components, find_cut
from .ai_cohomology import (
    AIWitness,
    DerivationValues,
    LevelMap,
    check_almost_invariance,
    compose_level_maps,
    cut_from_witness,
    derivation_from_witness,
    dh1_nonvanishing_certificate,
    eta_map,
    right_saturate,
    witness_from_splitting,
)
from .theorem_lab import (
    CatalogEntry,
    Scales,
    default_catalog,
    run_catalog,
    verify_equivalence,
    verify_resolution_evidence,
)
from .errors import BudgetExceeded, GenerationError

__all__ = [name for name in dir() if not name.startswith("_")]
