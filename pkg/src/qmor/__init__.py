"""qmor: exact workbench for quantum families of morphisms.

Builds the finitely presented universal algebra of all morphisms from
a presented algebra B to a finite-dimensional C, together with its
structure maps, and verifies the defining identities symbolically with
a classical finite-set oracle and a numerical representation search.
"""

from .scalars import GaussianRational, gq
from .fd_algebra import (
    FdAlgebra,
    FdElement,
    Functional,
    StarHom,
    check_slice_identity,
    direct_sum,
    make_algebra,
    make_hom,
    slice_map,
    tensor,
    tensor_elem,
)
from .star_presentation import (
    EqualityVerdict,
    FreeStarAlgebra,
    FreeStarPoly,
    GenDecl,
    Presentation,
    abelianize,
    enumerate_characters,
    normal_form,
    presentation_equal,
)
from .qmor_builder import (
    MorPresentation,
    PresentedHom,
    build_mor,
    canonical_phi,
    check_functor_laws,
    check_recovery,
    induced_mor,
)
from .structure_maps import (
    check_coassociativity,
    check_exp_law,
    check_mor_surjective,
    composition_map,
    direct_sum_split,
    exp_law_maps,
    tensor_split,
)
from .rep_search import MatrixModel, commutator_witness, find_representation

__version__ = "0.1.0"

__all__ = [
    "EqualityVerdict",
    "FdAlgebra",
    "FdElement",
    "FreeStarAlgebra",
    "FreeStarPoly",
    "Functional",
    "GaussianRational",
    "GenDecl",
    "MatrixModel",
    "MorPresentation",
    "Presentation",
    "PresentedHom",
    "StarHom",
    "abelianize",
    "build_mor",
    "canonical_phi",
    "check_coassociativity",
    "check_exp_law",
    "check_functor_laws",
    "check_mor_surjective",
    "check_recovery",
    "check_slice_identity",
    "commutator_witness",
    "composition_map",
    "direct_sum",
    "direct_sum_split",
    "enumerate_characters",
    "exp_law_maps",
    "find_representation",
    "gq",
    "induced_mor",
    "make_algebra",
    "make_hom",
    "normal_form",
    "presentation_equal",
    "slice_map",
    "tensor",
    "tensor_elem",
    "tensor_split",
]
