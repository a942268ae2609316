"""Top-level module containing the main types and checks."""

from __future__ import annotations

from .action import CutoffFunction, OneForm, extended_actions_invariance
from .common import (
    CheckReport,
    ContainmentError,
    ContractError,
    InputError,
    ParameterError,
    QisoError,
    RangeError,
    ShapeError,
    SizeError,
    StructuralError,
)
from .cqgrep import RepresentedGenerators, check_generator_relations
from .isometry import Corepresentation, assemble_U, verify_corep_conditions
from .smtriple import YukawaSet, build_triple
from .triple import FiniteRealSpectralTriple, KOSigns, check_axioms

__all__ = (
    "CheckReport",
    "ContainmentError",
    "ContractError",
    "Corepresentation",
    "CutoffFunction",
    "FiniteRealSpectralTriple",
    "InputError",
    "KOSigns",
    "OneForm",
    "ParameterError",
    "QisoError",
    "RangeError",
    "RepresentedGenerators",
    "ShapeError",
    "SizeError",
    "StructuralError",
    "YukawaSet",
    "assemble_U",
    "build_triple",
    "check_axioms",
    "check_generator_relations",
    "extended_actions_invariance",
    "verify_corep_conditions",
)
