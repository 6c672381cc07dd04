"""Exception hierarchy shared by every module."""

from __future__ import annotations


class ArtinGlueError(Exception):
    """Base class; ``witness`` carries whatever object exhibits the failure."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class DomainMismatch(ArtinGlueError):
    pass


class ShapeMismatch(ArtinGlueError):
    pass


class NonCone(ArtinGlueError):
    pass


class NonCocone(ArtinGlueError):
    pass


class BoundaryMismatch(ArtinGlueError):
    pass


class NotLimitClosed(ArtinGlueError):
    pass


class NotSubterminal(ArtinGlueError):
    pass


class NotZeroComposite(ArtinGlueError):
    pass


class NotLex(ArtinGlueError):
    pass


class NotAnExtension(ArtinGlueError):
    pass


class NotIso(ArtinGlueError):
    pass


class NotNatural(ArtinGlueError):
    pass


class NotGlueingForm(ArtinGlueError):
    pass


class InvalidMorphism(ArtinGlueError):
    pass


class EndMismatch(ArtinGlueError):
    pass


class ParseError(ArtinGlueError):
    def __init__(self, message: str, line: int = 0, column: int = 0, witness=None):
        super().__init__(f"{line}:{column}: {message}", witness)
        self.line = line
        self.column = column


class UnresolvedName(ParseError):
    pass


class LawViolation(ParseError):
    pass
