"""Exception hierarchy shared by all checkers."""

from __future__ import annotations


class RiskOrderError(Exception):
    """Base class for every error raised by this package."""


class DomainMismatch(RiskOrderError, ValueError):
    """Two objects are defined on different sets of alternatives."""


class ParseError(RiskOrderError, ValueError):
    """Malformed instance text.

    ``path`` is a dotted field path into the JSON document (``$`` is the root),
    ``line`` the 1-based source line when the JSON decoder reports one.
    """

    def __init__(self, message: str, path: str = "$", line: int | None = None):
        self.path = path
        self.line = line
        where = path if line is None else f"{path} (line {line})"
        super().__init__(f"{where}: {message}")


class InvariantError(RiskOrderError, ValueError):
    """Well-formed input that violates a domain invariant."""

    def __init__(self, invariant: str, path: str | None = None):
        self.invariant = invariant
        self.path = path
        super().__init__(invariant if path is None else f"{path}: {invariant}")


class CycleError(InvariantError):
    """Declared relation is not antisymmetric once closed."""

    def __init__(self, a: str, b: str):
        self.pair = (a, b)
        super().__init__(f"antisymmetry violated: {a!r} and {b!r} are mutually comparable")


class DegenerateDenominator(RiskOrderError, ArithmeticError):
    """Compression ratio has a zero denominator in v (ordinal equivalence fails)."""

    def __init__(self, x: str, y: str, z: str):
        self.triple = (x, y, z)
        super().__init__(f"v({y}) = v({x}) on a triple with u({x}) < u({y}) < u({z})")


class TransformError(RiskOrderError):
    """No increasing convex transform maps v onto u."""


class NotWellDefined(TransformError):
    def __init__(self, x: str, y: str):
        self.x, self.y = x, y
        super().__init__(f"v({x}) = v({y}) but u({x}) != u({y})")


class NotIncreasing(TransformError):
    def __init__(self, x: str, y: str):
        self.x, self.y = x, y
        super().__init__(f"v({x}) < v({y}) but u({x}) >= u({y})")


class NotConvex(TransformError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"chord slopes decrease at knot {index}")


class OutOfDomain(RiskOrderError, ValueError):
    pass


class NotSingleCrossing(RiskOrderError, ValueError):
    """Ratio form requested on a family with a non-single-crossing member."""


class EmptyFamily(RiskOrderError, ValueError):
    pass


class UnknownAlternative(RiskOrderError, KeyError):
    pass


class UnsupportedPoset(RiskOrderError, ValueError):
    pass


class TheoremViolation(RiskOrderError):
    """Two routes that must agree by theorem disagreed: an implementation bug.

    ``instance`` holds the offending input so callers can dump a reproducer.
    """

    def __init__(self, detail: str, instance=None):
        self.detail = detail
        self.instance = instance
        super().__init__(detail)
