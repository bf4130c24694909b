"""Deciding whether ``u`` is less risk-averse than ``v``.

Three exact routes are provided and must agree on every input:

* :func:`check_lra_definition` quantifies over all lotteries directly, by
  solving two linear programs per reference alternative;
* :func:`check_lra_pratt` checks ordinal equivalence plus the compression
  inequality on every ``u``-ordered triple;
* :func:`build_transform` constructs an increasing convex ``phi`` with
  ``u = phi o v`` or reports why none exists.

:func:`check_lra_grid` is a brute-force oracle over a finite lottery grid.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Literal, Sequence, Union

from .core import (
    Lottery,
    UtilityTable,
    as_rational,
    expected_value,
    format_rational,
    rational_to_json,
)
from .errors import (
    DegenerateDenominator,
    DomainMismatch,
    InvariantError,
    NotConvex,
    NotIncreasing,
    NotWellDefined,
    OutOfDomain,
    TransformError,
)
from .simplex import grid_points, maximize_on_slice

Part = Literal["weak", "strict"]
Route = Literal["definition", "pratt", "transform", "grid"]

_fmt = format_rational


# ---------------------------------------------------------------------------
# Witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrdinalViolation:
    """``u(x) >= u(y)`` with ``v(x) < v(y)``, or ``u(x) > u(y)`` with ``v(x) <= v(y)``."""

    x: str
    y: str

    def verify(self, u: UtilityTable, v: UtilityTable) -> bool:
        x, y = self.x, self.y
        return (u[x] >= u[y] and v[x] < v[y]) or (u[x] > u[y] and v[x] <= v[y])

    def explain(self, u: UtilityTable, v: UtilityTable) -> str:
        x, y = self.x, self.y
        if u[x] >= u[y] and v[x] < v[y]:
            rel_u, rel_v = ">=", "<"
        else:
            rel_u, rel_v = ">", "<="
        return (
            f"ordinal violation at ({x}, {y}): u({x}) = {_fmt(u[x])} {rel_u} u({y}) = {_fmt(u[y])}"
            f" but v({x}) = {_fmt(v[x])} {rel_v} v({y}) = {_fmt(v[y])}"
        )

    def to_json(self) -> dict[str, Any]:
        return {"kind": "ordinal", "x": self.x, "y": self.y}


@dataclass(frozen=True)
class CompressionViolation:
    """``u(x) < u(y) < u(z)`` and u's gain ratio falls short of v's."""

    x: str
    y: str
    z: str

    def ratios(self, u: UtilityTable, v: UtilityTable) -> tuple[Fraction, Fraction]:
        x, y, z = self.x, self.y, self.z
        return (u[z] - u[y]) / (u[y] - u[x]), (v[z] - v[y]) / (v[y] - v[x])

    def verify(self, u: UtilityTable, v: UtilityTable) -> bool:
        x, y, z = self.x, self.y, self.z
        if not (u[x] < u[y] < u[z]) or v[y] == v[x]:
            return False
        ru, rv = self.ratios(u, v)
        return ru < rv

    def explain(self, u: UtilityTable, v: UtilityTable) -> str:
        x, y, z = self.x, self.y, self.z
        ru, rv = self.ratios(u, v)
        return (
            f"compression violation at ({x}, {y}, {z}): "
            f"(u({z})-u({y}))/(u({y})-u({x})) = {_fmt(ru)} < "
            f"(v({z})-v({y}))/(v({y})-v({x})) = {_fmt(rv)}"
        )

    def to_json(self) -> dict[str, Any]:
        return {"kind": "compression", "x": self.x, "y": self.y, "z": self.z}


@dataclass(frozen=True)
class LotteryViolation:
    """A sure alternative ``y`` and lottery ``p`` on which the implication fails.

    weak:   ``u(y) >= E_p[u]`` but ``v(y) < E_p[v]``
    strict: ``u(y) >  E_p[u]`` but ``v(y) <= E_p[v]``
    """

    y: str
    p: Lottery
    part: Part

    def verify(self, u: UtilityTable, v: UtilityTable) -> bool:
        eu, ev = expected_value(u, self.p), expected_value(v, self.p)
        if self.part == "weak":
            return u[self.y] >= eu and v[self.y] < ev
        return u[self.y] > eu and v[self.y] <= ev

    def explain(self, u: UtilityTable, v: UtilityTable) -> str:
        y = self.y
        eu, ev = expected_value(u, self.p), expected_value(v, self.p)
        rel_u, rel_v = (">=", "<") if self.part == "weak" else (">", "<=")
        lot = ", ".join(f"{x}: {_fmt(self.p[x])}" for x in self.p.support)
        return (
            f"lottery violation ({self.part} part) at y = {y}, p = {{{lot}}}: "
            f"u({y}) = {_fmt(u[y])} {rel_u} E_p[u] = {_fmt(eu)} "
            f"but v({y}) = {_fmt(v[y])} {rel_v} E_p[v] = {_fmt(ev)}"
        )

    def to_json(self) -> dict[str, Any]:
        return {"kind": "lottery", "y": self.y, "p": self.p.to_json(), "part": self.part}


LraWitness = Union[OrdinalViolation, CompressionViolation, LotteryViolation]


def witness_from_json(doc: dict[str, Any], u: UtilityTable) -> LraWitness:
    kind = doc["kind"]
    if kind == "ordinal":
        return OrdinalViolation(doc["x"], doc["y"])
    if kind == "compression":
        return CompressionViolation(doc["x"], doc["y"], doc["z"])
    if kind == "lottery":
        p = Lottery(u.domain, {x: as_rational(w) for x, w in doc["p"].items()})
        return LotteryViolation(doc["y"], p, doc["part"])
    raise ValueError(f"unknown witness kind {kind!r}")


@dataclass(frozen=True)
class RiskOrderVerdict:
    holds: bool
    route: Route
    witness: LraWitness | None = None

    def __post_init__(self):
        if self.holds != (self.witness is None):
            raise ValueError("a witness is present exactly when the verdict fails")

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict[str, Any]:
        return {
            "holds": self.holds,
            "route": self.route,
            "witness": None if self.witness is None else self.witness.to_json(),
        }

    @classmethod
    def from_json(cls, doc: dict[str, Any], u: UtilityTable) -> RiskOrderVerdict:
        w = doc.get("witness")
        return cls(doc["holds"], doc["route"], None if w is None else witness_from_json(w, u))


def _same_domain(u: UtilityTable, v: UtilityTable) -> None:
    if u.domain != v.domain:
        raise DomainMismatch("u and v are over different alternatives")


# ---------------------------------------------------------------------------
# Route (A): the definition, by linear programming over the simplex
# ---------------------------------------------------------------------------


def check_lra_definition(u: UtilityTable, v: UtilityTable) -> RiskOrderVerdict:
    """Decide the lottery-quantified definition exactly.

    For each sure alternative ``y`` (in input order):

    * weak part fails iff ``max{E_p[v] : E_p[u] <= u(y)} > v(y)``;
    * strict part fails iff ``min{E_p[u] : E_p[v] >= v(y)} < u(y)``.

    Both programs contain the point mass on ``y``.  The witness is the
    optimising lottery of the first failing program.
    """
    _same_domain(u, v)
    labels = u.domain.labels
    uu, vv = u.as_tuple(), v.as_tuple()
    neg_u = [-a for a in uu]
    neg_v = [-b for b in vv]
    for k, y in enumerate(labels):
        best = maximize_on_slice(vv, uu, uu[k])
        if best[0] > vv[k]:
            return RiskOrderVerdict(False, "definition", LotteryViolation(y, _lottery(u, best[1]), "weak"))
        # min E_p[u] s.t. E_p[v] >= v(y)  <=>  -max(-E_p[u]) s.t. -E_p[v] <= -v(y)
        best = maximize_on_slice(neg_u, neg_v, -vv[k])
        if -best[0] < uu[k]:
            return RiskOrderVerdict(False, "definition", LotteryViolation(y, _lottery(u, best[1]), "strict"))
    return RiskOrderVerdict(True, "definition")


def _lottery(u: UtilityTable, vertex) -> Lottery:
    labels = u.domain.labels
    return Lottery(u.domain, dict(zip(labels, vertex.dense(len(labels)))))


def check_lra_grid(u: UtilityTable, v: UtilityTable, denom_bound: int) -> RiskOrderVerdict:
    """Brute-force oracle: every lottery with weights in ``(1/denom_bound) Z``.

    Exponential in ``|X|``; meant for tests on at most five alternatives.
    For each ``(y, p)`` the strict implication is tested before the weak one.
    """
    _same_domain(u, v)
    if denom_bound < 1:
        raise ValueError("denom_bound must be a positive integer")
    labels = u.domain.labels
    uu, vv = u.as_tuple(), v.as_tuple()
    points = [
        (p, sum(a * w for a, w in zip(uu, p)), sum(b * w for b, w in zip(vv, p)))
        for p in grid_points(len(labels), denom_bound)
    ]
    for k, y in enumerate(labels):
        for p, eu, ev in points:
            part: Part | None = None
            if uu[k] > eu and vv[k] <= ev:
                part = "strict"
            elif uu[k] >= eu and vv[k] < ev:
                part = "weak"
            if part is not None:
                lot = Lottery(u.domain, dict(zip(labels, p)))
                return RiskOrderVerdict(False, "grid", LotteryViolation(y, lot, part))
    return RiskOrderVerdict(True, "grid")


# ---------------------------------------------------------------------------
# Route (C): ordinal equivalence and compression
# ---------------------------------------------------------------------------


def check_ordinal_equivalence(u: UtilityTable, v: UtilityTable) -> RiskOrderVerdict:
    _same_domain(u, v)
    labels = u.domain.labels
    for x in labels:
        for y in labels:
            if x == y:
                continue
            w = OrdinalViolation(x, y)
            if w.verify(u, v):
                return RiskOrderVerdict(False, "pratt", w)
    return RiskOrderVerdict(True, "pratt")


def check_compression(u: UtilityTable, v: UtilityTable) -> RiskOrderVerdict:
    """Compression inequality over every triple with ``u(x) < u(y) < u(z)``.

    Raises :class:`DegenerateDenominator` if ``v(y) == v(x)`` on such a triple,
    which only happens when ordinal equivalence already fails.
    """
    _same_domain(u, v)
    labels = u.domain.labels
    for x in labels:
        for y in labels:
            if not u[x] < u[y]:
                continue
            for z in labels:
                if not u[y] < u[z]:
                    continue
                if v[y] == v[x]:
                    raise DegenerateDenominator(x, y, z)
                lhs = (u[z] - u[y]) / (u[y] - u[x])
                rhs = (v[z] - v[y]) / (v[y] - v[x])
                if lhs < rhs:
                    return RiskOrderVerdict(False, "pratt", CompressionViolation(x, y, z))
    return RiskOrderVerdict(True, "pratt")


def check_lra_pratt(u: UtilityTable, v: UtilityTable) -> RiskOrderVerdict:
    ordinal = check_ordinal_equivalence(u, v)
    if not ordinal.holds:
        return ordinal
    return check_compression(u, v)


# ---------------------------------------------------------------------------
# Route (B): piecewise-linear transform synthesis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PLTransform:
    """Increasing convex piecewise-linear map given by its knots ``(t, value)``."""

    knots: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        knots = tuple((as_rational(t), as_rational(val)) for t, val in self.knots)
        object.__setattr__(self, "knots", knots)
        if not knots:
            raise InvariantError("transform needs at least one knot")
        for (t0, a0), (t1, a1) in zip(knots, knots[1:]):
            if not t0 < t1:
                raise InvariantError("knot coordinates must be strictly increasing")
            if not a0 < a1:
                raise InvariantError("knot values must be strictly increasing")
        slopes = self.slopes
        for i in range(1, len(slopes)):
            if slopes[i] < slopes[i - 1]:
                raise InvariantError(f"chord slopes decrease at knot {i}")

    @property
    def domain(self) -> tuple[Fraction, Fraction]:
        return self.knots[0][0], self.knots[-1][0]

    @property
    def slopes(self) -> list[Fraction]:
        return [(a1 - a0) / (t1 - t0) for (t0, a0), (t1, a1) in zip(self.knots, self.knots[1:])]

    def __call__(self, t) -> Fraction:
        return apply_transform(self, t)

    def to_json(self) -> dict[str, Any]:
        return {
            "knots": [[rational_to_json(t), rational_to_json(a)] for t, a in self.knots],
            "slopes": [rational_to_json(s) for s in self.slopes],
        }


def build_transform(u: UtilityTable, v: UtilityTable) -> PLTransform:
    """Interpolate ``(v(x), u(x))`` into an increasing convex transform.

    Raises a :class:`TransformError` subclass when ``u`` is not less
    risk-averse than ``v``: :class:`NotWellDefined` for a tie in ``v`` not
    matched in ``u``, :class:`NotIncreasing` for an order reversal, and
    :class:`NotConvex` for the first knot at which chord slopes drop.
    """
    _same_domain(u, v)
    labels = u.domain.labels
    for i, x in enumerate(labels):
        for y in labels[i + 1:]:
            if v[x] == v[y] and u[x] != u[y]:
                raise NotWellDefined(x, y)
    for x in labels:
        for y in labels:
            if v[x] < v[y] and u[x] >= u[y]:
                raise NotIncreasing(x, y)
    points = sorted({v[x]: u[x] for x in labels}.items())
    for i in range(1, len(points) - 1):
        (t0, a0), (t1, a1), (t2, a2) = points[i - 1], points[i], points[i + 1]
        if (a2 - a1) / (t2 - t1) < (a1 - a0) / (t1 - t0):
            raise NotConvex(i)
    return PLTransform(tuple(points))


def transform_failure_witness(u: UtilityTable, v: UtilityTable, err: TransformError) -> LraWitness:
    """Translate a transform failure into the equivalent ordinal/compression witness."""
    if isinstance(err, NotWellDefined):
        x, y = err.x, err.y
        return OrdinalViolation(x, y) if u[x] > u[y] else OrdinalViolation(y, x)
    if isinstance(err, NotIncreasing):
        return OrdinalViolation(err.x, err.y)
    if isinstance(err, NotConvex):
        ts = sorted({v[x] for x in u.domain})
        pick = [next(x for x in u.domain if v[x] == t) for t in ts[err.index - 1: err.index + 2]]
        return CompressionViolation(*pick)
    raise TypeError(f"unexpected transform error {err!r}")


def check_lra_transform(u: UtilityTable, v: UtilityTable) -> RiskOrderVerdict:
    try:
        build_transform(u, v)
    except TransformError as err:
        return RiskOrderVerdict(False, "transform", transform_failure_witness(u, v, err))
    return RiskOrderVerdict(True, "transform")


def apply_transform(phi: PLTransform, t) -> Fraction:
    t = as_rational(t)
    lo, hi = phi.domain
    if not lo <= t <= hi:
        raise OutOfDomain(f"{_fmt(t)} lies outside [{_fmt(lo)}, {_fmt(hi)}]")
    ts = [k[0] for k in phi.knots]
    i = bisect_left(ts, t)
    if ts[i] == t:
        return phi.knots[i][1]
    (t0, a0), (t1, a1) = phi.knots[i - 1], phi.knots[i]
    return a0 + (a1 - a0) * (t - t0) / (t1 - t0)


def compose_table(phi: PLTransform, v: UtilityTable) -> UtilityTable:
    """``phi o v`` as a utility table."""
    return UtilityTable(v.domain, {x: apply_transform(phi, v[x]) for x in v.domain})


ROUTES = {
    "definition": check_lra_definition,
    "pratt": check_lra_pratt,
    "transform": check_lra_transform,
}


def check_lra_all(u: UtilityTable, v: UtilityTable, routes: Sequence[str] = ("definition", "pratt", "transform")) -> dict[str, RiskOrderVerdict]:
    return {name: ROUTES[name](u, v) for name in routes}
