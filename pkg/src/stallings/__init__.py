"""Stallings graphs for subgroups of free groups, mod-p homology of covers,
separability in finite p-groups, and extension of partial automorphisms of
finite hypertournaments."""

from .words import Word, cyclic_reduce, empty_word, maximal_root, reduce
from .graphs import (
    GraphMorphism,
    LabeledGraph,
    SubgroupGraph,
    canonical_form,
    component_ranks,
    contains,
    core,
    cycle_basis,
    fold,
    make_graph,
    rank,
    subgroup_graph,
    to_wedge_morphism,
    trace,
    wedge_graph,
)
from .fiber import (
    FiberProduct,
    MalnormalityResult,
    RootClosureResult,
    component_pi1,
    fiber_product,
    fiber_product_over,
    is_l_root_closed,
    is_malnormal,
)
from .homology import (
    ChainComplex,
    FpMatrix,
    GerstenReport,
    TwistedMatrix,
    chain_complex,
    gersten_check,
    h1_basis,
    induced_h1_map,
    one_minus_t_factor,
    one_minus_t_valuation,
    tw_convolve,
)
from .covers import (
    CoverDescription,
    CoverGraph,
    CoverTower,
    build_cover,
    cover_tower,
    pullback,
    check_disconnected_embedding,
    pullback_as_fiber_product,
    surjective_cocycle,
    tower_pullbacks,
)
from .separability import (
    Constraint,
    FiniteQuotient,
    SeparationWitness,
    constraint_satisfied,
    direct_product,
    prime_factors,
    separate_coset_system,
    separate_from_cyclic,
    separate_maximal_cyclic,
    verify_witness,
)
from .hypertournaments import (
    ExtensionResult,
    Hypertournament,
    PartialAutomorphismFamily,
    eppa_extend,
    family_graph,
    is_subtadpole,
    make_family,
    make_hypertournament,
    orbit_structure,
    validate,
    verify_extension,
)
from .serialize import (
    extension_from_dict,
    extension_to_dict,
    family_from_list,
    family_to_list,
    graph_from_dict,
    graph_to_dict,
    hypertournament_from_dict,
    hypertournament_to_dict,
    subgroup_from_dict,
    witness_to_dict,
)
from .verify import VerificationReport, verify_counterexample
from .suite import SuiteReport, run_property_suite
from .errors import (
    ForcedCycleError,
    InputError,
    NotInjectiveError,
    NotPartialIsomorphismError,
    NotSubtadpoleError,
    PreconditionError,
    ResourceCapError,
    RootClosureError,
    SearchCapError,
    StallingsError,
)

__version__ = "0.1.0"

__all__ = [
    "Word",
    "reduce",
    "empty_word",
    "cyclic_reduce",
    "maximal_root",
    "LabeledGraph",
    "GraphMorphism",
    "SubgroupGraph",
    "make_graph",
    "wedge_graph",
    "fold",
    "core",
    "subgroup_graph",
    "trace",
    "contains",
    "cycle_basis",
    "canonical_form",
    "rank",
    "component_ranks",
    "to_wedge_morphism",
    "FiberProduct",
    "MalnormalityResult",
    "RootClosureResult",
    "fiber_product",
    "fiber_product_over",
    "component_pi1",
    "is_malnormal",
    "is_l_root_closed",
    "FpMatrix",
    "TwistedMatrix",
    "ChainComplex",
    "GerstenReport",
    "chain_complex",
    "h1_basis",
    "induced_h1_map",
    "gersten_check",
    "one_minus_t_valuation",
    "one_minus_t_factor",
    "tw_convolve",
    "CoverDescription",
    "CoverGraph",
    "CoverTower",
    "build_cover",
    "pullback",
    "check_disconnected_embedding",
    "pullback_as_fiber_product",
    "surjective_cocycle",
    "cover_tower",
    "tower_pullbacks",
    "Constraint",
    "FiniteQuotient",
    "SeparationWitness",
    "separate_from_cyclic",
    "separate_maximal_cyclic",
    "constraint_satisfied",
    "direct_product",
    "prime_factors",
    "separate_coset_system",
    "verify_witness",
    "Hypertournament",
    "PartialAutomorphismFamily",
    "ExtensionResult",
    "make_hypertournament",
    "make_family",
    "family_graph",
    "is_subtadpole",
    "orbit_structure",
    "validate",
    "eppa_extend",
    "verify_extension",
    "graph_to_dict",
    "graph_from_dict",
    "subgroup_from_dict",
    "hypertournament_to_dict",
    "hypertournament_from_dict",
    "family_to_list",
    "family_from_list",
    "witness_to_dict",
    "extension_to_dict",
    "extension_from_dict",
    "VerificationReport",
    "verify_counterexample",
    "SuiteReport",
    "run_property_suite",
    "StallingsError",
    "InputError",
    "PreconditionError",
    "NotInjectiveError",
    "NotPartialIsomorphismError",
    "NotSubtadpoleError",
    "RootClosureError",
    "ForcedCycleError",
    "SearchCapError",
    "ResourceCapError",
]
