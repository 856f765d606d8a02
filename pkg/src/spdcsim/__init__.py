"""Simulator and analysis toolkit for multi-crystal photon-pair experiments.

Builds quantum states from sequences of down-conversion crystals, mode
and phase shifters, misalignment splitters, and path relabelings;
applies n-fold coincidence post-selection; and verifies the resulting
entangled states, generation efficiencies, and path-length feasibility.
"""

from .analysis import (
    EfficiencyReport,
    SchmidtRankVector,
    efficiency_formula,
    efficiency_report,
    efficiency_simulated,
    fidelity,
    ghz_layout,
    ghz_target,
    round_robin_matchings,
    schmidt_rank_vector,
    two_photon_builder,
    w_target,
)
from .coherence import (
    CoherenceReport,
    CoherenceSpec,
    Constraint,
    check_coherence,
    check_constraints,
)
from .dsl import ExperimentParseError, ParseIssue, SourceSpan, parse, serialize
from .elements import (
    Crystal,
    Element,
    Misalignment,
    ModeShifter,
    MultimodeCrystal,
    PhaseShifter,
    Relabel,
    apply_element,
)
from .experiment import (
    Experiment,
    PostSelectionResult,
    post_select,
    post_select_pattern,
    run,
    success_fraction,
    with_uniform_misalignment,
)
from .fock import ModeLabel, StateVector, parse_state, vacuum
from .search import (
    ElementPool,
    FidelityTarget,
    SearchConfig,
    SearchHit,
    SrvTarget,
    evaluate,
    random_setup,
    search,
)

__version__ = "0.1.0"

__all__ = [
    "Crystal",
    "CoherenceReport",
    "CoherenceSpec",
    "Constraint",
    "EfficiencyReport",
    "Element",
    "ElementPool",
    "Experiment",
    "ExperimentParseError",
    "FidelityTarget",
    "Misalignment",
    "ModeLabel",
    "ModeShifter",
    "MultimodeCrystal",
    "ParseIssue",
    "PhaseShifter",
    "PostSelectionResult",
    "Relabel",
    "SchmidtRankVector",
    "SearchConfig",
    "SearchHit",
    "SourceSpan",
    "SrvTarget",
    "StateVector",
    "apply_element",
    "check_coherence",
    "check_constraints",
    "efficiency_formula",
    "efficiency_report",
    "efficiency_simulated",
    "evaluate",
    "fidelity",
    "ghz_layout",
    "ghz_target",
    "parse",
    "parse_state",
    "post_select",
    "post_select_pattern",
    "random_setup",
    "round_robin_matchings",
    "run",
    "schmidt_rank_vector",
    "search",
    "serialize",
    "success_fraction",
    "two_photon_builder",
    "vacuum",
    "w_target",
    "with_uniform_misalignment",
]
