"""Decide non-interference properties of Place/Transition nets.

The package is layered: :mod:`nicheck.net` (data model and firing rule),
:mod:`nicheck.reach` (three-valued reachability), :mod:`nicheck.lts`
(explicit-state oracle), :mod:`nicheck.constructions` (derived check nets),
:mod:`nicheck.deciders` (the security checks) and :mod:`nicheck.cli`.
"""

from .coverability import CoverabilityTree, is_bounded, karp_miller
from .deciders import (
    CheckReport,
    Status,
    check,
    check_bini,
    check_bndc,
    check_ini,
    check_ndc,
    check_sbndc,
    cross_validate,
)
from .errors import (
    ConfigurationError,
    FiringError,
    NicheckError,
    OracleOverflow,
    StructuralError,
    UsageError,
    WitnessError,
)
from .net import (
    Level,
    Marking,
    NetSystem,
    Transition,
    compose,
    enabled,
    fire,
    fire_sequence,
    observable_projection,
    restrict,
)
from .reach import Atom, Limits, Outcome, ProofKind, Rel, TargetSet, Verdict, decide_reach, satisfies
from .textformat import NetParseError, parse_net, serialize_net

__version__ = "0.1.0"

__all__ = [
    "Atom", "CheckReport", "ConfigurationError", "CoverabilityTree", "FiringError", "Level",
    "Limits", "Marking", "NetParseError", "NetSystem", "NicheckError", "OracleOverflow",
    "Outcome", "ProofKind", "Rel", "Status", "StructuralError", "TargetSet", "Transition",
    "UsageError", "Verdict", "WitnessError", "check", "check_bini", "check_bndc", "check_ini",
    "check_ndc", "check_sbndc", "compose", "cross_validate", "decide_reach", "enabled", "fire",
    "fire_sequence", "is_bounded", "karp_miller", "observable_projection", "parse_net",
    "restrict", "satisfies", "serialize_net",
]
