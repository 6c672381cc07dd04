"""Artin glueing and adjoint split extensions of finite presheaf toposes."""

from .category import Adjunction, LexCategory, LexFunctor, NatTrans, ProbeSet
from .errors import ArtinGlueError, LawViolation, ParseError, UnresolvedName
from .extensions import AdjointSplitExtension, ExtMorphism, extension_verify, gamma_functor, gamma_inverse, glueing_extension
from .glueing import GlueingCategory, glue_construct, phi, phi_inverse, pullback_representation_check
from .laws import Report, check_laws
from .presheaf import FiniteBaseCategory, Presheaf, PresheafMor, PresheafTopos
from .scenario import parse_scenario
from .subtopos import closed_reflection, cokernel_of, kernel_of, open_reflection

__all__ = [
    "AdjointSplitExtension",
    "Adjunction",
    "ArtinGlueError",
    "ExtMorphism",
    "FiniteBaseCategory",
    "GlueingCategory",
    "LawViolation",
    "LexCategory",
    "LexFunctor",
    "NatTrans",
    "ParseError",
    "Presheaf",
    "PresheafMor",
    "PresheafTopos",
    "ProbeSet",
    "Report",
    "UnresolvedName",
    "check_laws",
    "closed_reflection",
    "cokernel_of",
    "extension_verify",
    "gamma_functor",
    "gamma_inverse",
    "glue_construct",
    "glueing_extension",
    "kernel_of",
    "open_reflection",
    "parse_scenario",
    "phi",
    "phi_inverse",
    "pullback_representation_check",
]
