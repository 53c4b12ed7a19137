"""Exact computations with integral representations of finite groups.

Cohomology of finite modules and lattices, coflasque decompositions over
cyclic p-groups, and certified permutation presentations of finite modules.
"""

from .coflasque import DecompositionCertificate, decompose, is_in_Ck, level
from .cohomology import cohomology, connecting_map, is_coflasque, is_projective, is_projective_cyclic
from .groups import FiniteGroup, Subgroup, cyclic, dihedral, direct_product, from_permutations
from .linalg import IntegerMatrix, hermite_form, smith_normal_form
from .modules import FiniteModule, Lattice, ModuleMap, PermutationStructure, PresentedModule
from .presentation import (
    ObstructionReport,
    PresentationCertificate,
    PresentationRefused,
    emit_invariant_matrix,
    has_presentation_criterion,
    obstruction,
    permutation_resolution,
    verify_presentation,
)

__version__ = "0.1.0"

__all__ = [
    "DecompositionCertificate", "FiniteGroup", "FiniteModule", "IntegerMatrix", "Lattice",
    "ModuleMap", "ObstructionReport", "PermutationStructure", "PresentationCertificate",
    "PresentationRefused", "PresentedModule", "Subgroup", "cohomology", "connecting_map",
    "cyclic", "decompose", "dihedral", "direct_product", "emit_invariant_matrix",
    "from_permutations", "has_presentation_criterion", "hermite_form", "is_coflasque",
    "is_in_Ck", "is_projective", "is_projective_cyclic", "level", "obstruction",
    "permutation_resolution", "smith_normal_form", "verify_presentation",
]
