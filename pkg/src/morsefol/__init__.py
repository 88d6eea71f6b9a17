"""Combinatorial kernel for Morse foliations of the 3-sphere as decorated block graphs."""

from .classify import Certificate, StabilityVerdict, Witness, classify, is_stable, verify_certificate
from .detect import (
    Component, CycleWitness, ExpansionState, SpotClassification, classify_spots,
    completely_expand, expand_ball, find_anti_vanishing_cycles, find_bubbles,
    find_components, find_trivial_pairs, find_truncated_bubbles, find_vanishing_cycles,
)
from .errors import (
    CannotComplete, CannotExpand, DuplicateId, FoliationError, InvalidAssembly, InvalidLevel,
    InvalidSite, InvalidSpec, MultiSingularLeaf, NotATrivialPair, NotClosed, NothingToSplit,
    NotNormalized, OrientationMismatch, ParseError, TheoremViolation, TrichotomyViolation,
    UnsupportedAmbient,
)
from .gen import GenSpec, generate, generate_random
from .iso import isomorphic
from .model import (
    Assembly, Block, BlockKind, Direction, Gluing, GluingKind, LeafDescriptor,
    Singularity, Spot, index_sum, leaves, validate,
)
from .rewrites import (
    RewriteStep, complete_truncated_component, connected_sum, corrective_movement,
    eliminate_bubble, eliminate_trivial_pair, eliminate_truncated_bubble, morse_mod_A,
    morse_mod_B, normalize, replay, split_singular_leaf,
)

__version__ = "0.1.0"

__all__ = [
    "Assembly", "Block", "BlockKind", "Certificate", "Component", "CycleWitness", "Direction",
    "ExpansionState", "GenSpec", "Gluing", "GluingKind", "LeafDescriptor", "RewriteStep",
    "Singularity", "Spot", "SpotClassification", "StabilityVerdict", "Witness",
    "classify", "classify_spots", "complete_truncated_component", "completely_expand",
    "connected_sum", "corrective_movement", "eliminate_bubble", "eliminate_trivial_pair",
    "eliminate_truncated_bubble", "expand_ball", "find_anti_vanishing_cycles", "find_bubbles",
    "find_components", "find_trivial_pairs", "find_truncated_bubbles", "find_vanishing_cycles",
    "generate", "generate_random", "index_sum", "is_stable", "isomorphic", "leaves",
    "morse_mod_A", "morse_mod_B", "normalize", "replay", "split_singular_leaf", "validate",
    "verify_certificate",
    "CannotComplete", "CannotExpand", "DuplicateId", "FoliationError", "InvalidAssembly",
    "InvalidLevel", "InvalidSite", "InvalidSpec", "MultiSingularLeaf", "NotATrivialPair",
    "NotClosed", "NothingToSplit", "NotNormalized", "OrientationMismatch", "ParseError",
    "TheoremViolation", "TrichotomyViolation", "UnsupportedAmbient",
]
