"""simploc: symbolic calculator for truncating invariants of simple varieties."""

from .coeff import CoefficientTable, FgAbGroup, builtin_table, snf
from .dsl import classify, example_library, validate
from .engine import (
    compute_degree0,
    compute_graded,
    parshin_check,
    refute_membership_b,
    ring_degree0,
    sod_count,
    verify_comparison,
)
from .group_rep import GroupDatum, augment, elementary_symmetric_class, representation_ring
from .schubert import (
    CoweightDatum,
    FiniteSchubertDatum,
    affine_cell_count,
    affine_schubert_tree,
    cell_count_finite,
    finite_schubert_tree,
    minuscule_decomposition,
)
from .script import parse, print_script, print_tree

__all__ = [
    "CoefficientTable",
    "CoweightDatum",
    "FgAbGroup",
    "FiniteSchubertDatum",
    "GroupDatum",
    "affine_cell_count",
    "affine_schubert_tree",
    "augment",
    "builtin_table",
    "cell_count_finite",
    "classify",
    "compute_degree0",
    "compute_graded",
    "elementary_symmetric_class",
    "example_library",
    "finite_schubert_tree",
    "minuscule_decomposition",
    "parse",
    "parshin_check",
    "print_script",
    "print_tree",
    "refute_membership_b",
    "representation_ring",
    "ring_degree0",
    "snf",
    "sod_count",
    "validate",
    "verify_comparison",
]
