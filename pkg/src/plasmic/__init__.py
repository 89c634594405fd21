"""Finite plasmas, F_1-modules and the plasmic nerve."""

from ._bits import BudgetExceeded
from .f1mod import (
    CheckResult,
    ModuleError,
    ModuleMorphism,
    TabulatedModule,
    check_functoriality,
    corepresented_module,
    enumerate_module_morphisms,
    f1_module,
    generated_submodule,
    gl_n,
    psi_truncate,
    wedge_sum,
)
from .finstar import PointedMap, compose, enumerate_pointed_maps, generator, preimage
from .matroid import (
    MatroidError,
    PointedMatroid,
    build_matroid,
    classify_matroid,
    embedding_check,
    enumerate_matroid_morphisms,
    pg_f2,
    pi_plasma,
)
from .nerve import (
    adjunction_check,
    adjunction_unit,
    corepresentability_check,
    eilenberg_maclane,
    nerve_action,
    nerve_level,
    nerve_module,
    nerve_of_morphism,
    segal_check,
)
from .plasma import (
    Plasma,
    PlasmaError,
    PlasmaMorphism,
    PropertyReport,
    build_plasma,
    check_properties,
    classify_maps_to_linear_tree,
    enumerate_morphisms,
)
from .simplicial import (
    DeltaMap,
    beta,
    beta_degen,
    beta_face,
    partial_monoid_classifying,
    span_pullback_count,
    two_segal_check,
    underlying_simplicial,
)

__version__ = "0.1.0"
