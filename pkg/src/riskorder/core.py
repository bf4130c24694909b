"""Exact scalars, alternatives, lotteries, posets and the JSON instance format.

Every scalar is a :class:`fractions.Fraction`.  Floats are rejected at every
entry point so that weak and strict inequalities are decided exactly.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Iterator, Mapping, Sequence, Union

from .errors import CycleError, DomainMismatch, InvariantError, ParseError

Rational = Fraction
RationalLike = Union[int, Fraction, str]

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def as_rational(value: RationalLike) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string; floats and bools are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def parse_rational(text: str, path: str = "$") -> Fraction:
    m = _RATIONAL_RE.match(text.strip())
    if m is None:
        raise ParseError(f"not a rational: {text!r}", path)
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}", path)
    return Fraction(num, den)


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rational_to_json(x: Fraction) -> int | str:
    """Integers stay JSON numbers; everything else becomes ``"p/q"``."""
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Alternatives, utility tables, lotteries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Alternatives:
    """Ordered, non-empty set of opaque labels.  Order is iteration order only."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise InvariantError("alternatives must be non-empty")
        if not all(isinstance(x, str) for x in labels):
            raise InvariantError("alternative labels must be strings")
        if len(set(labels)) != len(labels):
            raise InvariantError("alternative labels must be pairwise distinct")

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, x: object) -> bool:
        return x in self.labels

    def index(self, x: str) -> int:
        return self.labels.index(x)


def _as_alternatives(domain: Alternatives | Iterable[str]) -> Alternatives:
    return domain if isinstance(domain, Alternatives) else Alternatives(tuple(domain))


def _total_map(domain: Sequence[str], values: Mapping[str, RationalLike], what: str) -> dict[str, Fraction]:
    keys = set(values)
    if keys != set(domain):
        missing = [x for x in domain if x not in keys]
        extra = sorted(keys - set(domain))
        raise InvariantError(
            f"{what} must be defined for exactly the domain labels "
            f"(missing {missing}, extra {extra})"
        )
    return {x: as_rational(values[x]) for x in domain}


@dataclass(frozen=True, eq=True)
class UtilityTable:
    """A function from alternatives to exact rationals."""

    domain: Alternatives
    values: Mapping[str, Fraction]

    def __post_init__(self):
        domain = _as_alternatives(self.domain)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "values", _total_map(domain.labels, self.values, "utility values"))

    @classmethod
    def from_values(cls, labels: Iterable[str], values: Iterable[RationalLike]) -> UtilityTable:
        labels = tuple(labels)
        values = tuple(values)
        if len(labels) != len(values):
            raise InvariantError("one value per label required")
        return cls(Alternatives(labels), dict(zip(labels, values)))

    def __getitem__(self, x: str) -> Fraction:
        return self.values[x]

    def as_tuple(self) -> tuple[Fraction, ...]:
        return tuple(self.values[x] for x in self.domain)

    def affine(self, scale: RationalLike, shift: RationalLike = 0) -> UtilityTable:
        a, b = as_rational(scale), as_rational(shift)
        return UtilityTable(self.domain, {x: a * w + b for x, w in self.values.items()})

    def to_json(self) -> dict[str, int | str]:
        return {x: rational_to_json(self.values[x]) for x in self.domain}


@dataclass(frozen=True, eq=True)
class Lottery:
    """Probability weights over a finite set of alternatives."""

    domain: Alternatives
    weights: Mapping[str, Fraction]

    def __post_init__(self):
        domain = _as_alternatives(self.domain)
        object.__setattr__(self, "domain", domain)
        weights = _total_map(domain.labels, self.weights, "lottery weights")
        if any(w < 0 for w in weights.values()):
            raise InvariantError("lottery weights must be nonnegative")
        total = sum(weights.values(), Fraction(0))
        if total != 1:
            raise InvariantError(f"weights sum ≠ 1 (sum is {format_rational(total)})")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def point_mass(cls, domain: Alternatives | Iterable[str], x: str) -> Lottery:
        domain = _as_alternatives(domain)
        return cls(domain, {z: Fraction(int(z == x)) for z in domain})

    @classmethod
    def from_support(cls, domain: Alternatives | Iterable[str], weights: Mapping[str, RationalLike]) -> Lottery:
        """Build from a partial map; unnamed alternatives get weight zero."""
        domain = _as_alternatives(domain)
        return cls(domain, {z: as_rational(weights.get(z, 0)) for z in domain})

    def __getitem__(self, x: str) -> Fraction:
        return self.weights[x]

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(x for x in self.domain if self.weights[x] > 0)

    def mix(self, alpha: RationalLike, other: Lottery) -> Lottery:
        """``alpha * self + (1 - alpha) * other``."""
        if self.domain != other.domain:
            raise DomainMismatch("lotteries over different alternatives")
        a = as_rational(alpha)
        if not 0 <= a <= 1:
            raise InvariantError("mixing weight must lie in [0, 1]")
        return Lottery(self.domain, {x: a * self.weights[x] + (1 - a) * other.weights[x] for x in self.domain})

    def to_json(self) -> dict[str, int | str]:
        return {x: rational_to_json(self.weights[x]) for x in self.domain}


def expected_value(u: UtilityTable, p: Lottery) -> Fraction:
    if u.domain != p.domain:
        raise DomainMismatch("utility table and lottery are over different alternatives")
    return sum((u.values[x] * p.weights[x] for x in u.domain), Fraction(0))


# ---------------------------------------------------------------------------
# Posets
# ---------------------------------------------------------------------------


def transitive_closure(declared: Iterable[tuple[str, str]], elements: Sequence[str]) -> frozenset[tuple[str, str]]:
    """Reflexive-transitive closure of ``declared`` over ``elements``.

    Raises :class:`CycleError` when two distinct elements end up mutually
    comparable.
    """
    elements = list(elements)
    pos = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    reach = [[i == j for j in range(n)] for i in range(n)]
    for a, b in declared:
        if a not in pos or b not in pos:
            raise InvariantError(f"relation endpoint not in elements: ({a!r}, {b!r})")
        reach[pos[a]][pos[b]] = True
    for k in range(n):
        rk = reach[k]
        for i in range(n):
            if reach[i][k]:
                ri = reach[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True
    for i in range(n):
        for j in range(i + 1, n):
            if reach[i][j] and reach[j][i]:
                raise CycleError(elements[i], elements[j])
    return frozenset((elements[i], elements[j]) for i in range(n) for j in range(n) if reach[i][j])


@dataclass(frozen=True)
class Poset:
    """Finite poset given by an arbitrary acyclic relation, closed on construction."""

    elements: tuple[str, ...]
    declared_relation: frozenset[tuple[str, str]] = frozenset()
    comparability: frozenset[tuple[str, str]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        if not elements:
            raise InvariantError("poset must be non-empty")
        if not all(isinstance(e, str) for e in elements):
            raise InvariantError("poset elements must be strings")
        if len(set(elements)) != len(elements):
            raise InvariantError("poset elements must be pairwise distinct")
        declared = frozenset((a, b) for a, b in self.declared_relation)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "declared_relation", declared)
        object.__setattr__(self, "comparability", transitive_closure(declared, elements))

    @classmethod
    def chain(cls, elements: Sequence[str]) -> Poset:
        elements = tuple(elements)
        return cls(elements, frozenset(zip(elements, elements[1:])))

    def leq(self, a: str, b: str) -> bool:
        return (a, b) in self.comparability

    def strict_pairs(self) -> list[tuple[str, str]]:
        """All ``(t, t')`` with ``t <= t'`` and ``t != t'``, ordered by element index."""
        return [
            (a, b)
            for a in self.elements
            for b in self.elements
            if a != b and (a, b) in self.comparability
        ]

    def restrict(self, subset: Sequence[str]) -> Poset:
        """Induced subposet on ``subset`` (kept in the given order)."""
        keep = set(subset)
        rel = frozenset((a, b) for a, b in self.comparability if a in keep and b in keep and a != b)
        return Poset(tuple(subset), rel)

    def to_json(self) -> dict[str, Any]:
        rel = sorted(self.declared_relation, key=lambda ab: (self.elements.index(ab[0]), self.elements.index(ab[1])))
        return {"elements": list(self.elements), "relation": [list(ab) for ab in rel]}


# ---------------------------------------------------------------------------
# Functions on posets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=True)
class ParamFunction:
    """A rational-valued function on the elements of a poset."""

    params: Poset
    values: Mapping[str, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "values", _total_map(self.params.elements, self.values, "function values"))

    def __getitem__(self, theta: str) -> Fraction:
        return self.values[theta]

    def __sub__(self, other: ParamFunction) -> ParamFunction:
        if self.params != other.params:
            raise DomainMismatch("functions on different posets")
        return ParamFunction(self.params, {t: self.values[t] - other.values[t] for t in self.params.elements})

    def scaled(self, c: RationalLike) -> ParamFunction:
        c = as_rational(c)
        return ParamFunction(self.params, {t: c * w for t, w in self.values.items()})

    def on(self, params: Poset) -> ParamFunction:
        """Same values on another poset over (a subset of) the same elements."""
        return ParamFunction(params, {t: self.values[t] for t in params.elements})

    def to_json(self) -> dict[str, int | str]:
        return {t: rational_to_json(self.values[t]) for t in self.params.elements}


@dataclass(frozen=True)
class FunctionFamily:
    """Named functions sharing one poset.  Member order is iteration order."""

    params: Poset
    members: tuple[tuple[str, ParamFunction], ...] = ()

    def __post_init__(self):
        members = tuple((name, fn) for name, fn in self.members)
        object.__setattr__(self, "members", members)
        names = [name for name, _ in members]
        if len(set(names)) != len(names):
            raise InvariantError("family member names must be distinct")
        for name, fn in members:
            if fn.params != self.params:
                raise InvariantError(f"member {name!r} is defined on a different poset")

    @classmethod
    def from_values(cls, params: Poset, members: Mapping[str, Mapping[str, RationalLike]]) -> FunctionFamily:
        return cls(params, tuple((name, ParamFunction(params, vals)) for name, vals in members.items()))

    def __len__(self) -> int:
        return len(self.members)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.members)

    def member(self, name: str) -> ParamFunction:
        for n, fn in self.members:
            if n == name:
                return fn
        raise KeyError(name)

    def on(self, params: Poset) -> FunctionFamily:
        return FunctionFamily(params, tuple((n, fn.on(params)) for n, fn in self.members))

    def to_json(self) -> dict[str, Any]:
        return {"poset": self.params.to_json(), "functions": {n: fn.to_json() for n, fn in self.members}}


@dataclass(frozen=True, eq=True)
class ParamUtilityTable:
    """``U : X x Theta -> Q`` stored as ``values[(x, theta)]``."""

    alternatives: Alternatives
    params: Poset
    values: Mapping[tuple[str, str], Fraction]

    def __post_init__(self):
        alts = _as_alternatives(self.alternatives)
        object.__setattr__(self, "alternatives", alts)
        vals = {}
        for x in alts:
            for t in self.params.elements:
                if (x, t) not in self.values:
                    raise InvariantError(f"U is not defined at ({x!r}, {t!r})")
                vals[(x, t)] = as_rational(self.values[(x, t)])
        if len(self.values) != len(vals):
            raise InvariantError("U has entries outside alternatives x poset elements")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_rows(cls, alternatives: Iterable[str], params: Poset, rows: Mapping[str, Mapping[str, RationalLike]]) -> ParamUtilityTable:
        alts = Alternatives(tuple(alternatives))
        vals = {}
        for x in alts:
            if x not in rows:
                raise InvariantError(f"U has no row for alternative {x!r}")
            row = rows[x]
            extra = set(row) - set(params.elements)
            if extra:
                raise InvariantError(f"U row {x!r} has values for unknown elements {sorted(extra)}")
            for t in params.elements:
                if t not in row:
                    raise InvariantError(f"U is not defined at ({x!r}, {t!r})")
                vals[(x, t)] = row[t]
        extra_rows = set(rows) - set(alts.labels)
        if extra_rows:
            raise InvariantError(f"U has rows for unknown alternatives {sorted(extra_rows)}")
        return cls(alts, params, vals)

    def slice(self, theta: str) -> UtilityTable:
        """``U(., theta)`` as a utility table."""
        return UtilityTable(self.alternatives, {x: self.values[(x, theta)] for x in self.alternatives})

    def row(self, x: str) -> ParamFunction:
        """``U(x, .)`` as a function on the poset."""
        return ParamFunction(self.params, {t: self.values[(x, t)] for t in self.params.elements})

    def to_json(self) -> dict[str, Any]:
        return {
            "alternatives": list(self.alternatives.labels),
            "poset": self.params.to_json(),
            "U": {x: {t: rational_to_json(self.values[(x, t)]) for t in self.params.elements} for x in self.alternatives},
        }


# ---------------------------------------------------------------------------
# Instances and the JSON format
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UtilityPair:
    u: UtilityTable
    v: UtilityTable
    lotteries: tuple[Lottery, ...] = ()

    def __post_init__(self):
        if self.u.domain != self.v.domain:
            raise DomainMismatch("u and v are over different alternatives")
        for p in self.lotteries:
            if p.domain != self.u.domain:
                raise DomainMismatch("lottery over different alternatives")

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"alternatives": list(self.u.domain.labels), "u": self.u.to_json(), "v": self.v.to_json()}
        if self.lotteries:
            out["lotteries"] = [p.to_json() for p in self.lotteries]
        return out


@dataclass(frozen=True)
class FamilyInstance:
    family: FunctionFamily

    def to_json(self) -> dict[str, Any]:
        return self.family.to_json()


@dataclass(frozen=True)
class ParamInstance:
    table: ParamUtilityTable

    def to_json(self) -> dict[str, Any]:
        return self.table.to_json()


Instance = Union[UtilityPair, FamilyInstance, ParamInstance]


def _no_duplicate_keys(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for k, v in pairs:
        if k in out:
            raise ParseError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _reject_float(text: str):
    raise ParseError(f"non-exact number {text}; write rationals as integers or \"p/q\" strings")


def _rational_field(value: Any, path: str) -> Fraction:
    if isinstance(value, bool):
        raise ParseError("boolean where a rational was expected", path)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value, path)
    raise ParseError(f"expected integer or \"p/q\" string, got {type(value).__name__}", path)


def _expect(value: Any, kind: type, path: str, what: str):
    if not isinstance(value, kind):
        raise ParseError(f"expected {what}", path)
    return value


def _check_keys(obj: dict, required: set[str], optional: set[str], path: str) -> None:
    unknown = set(obj) - required - optional
    if unknown:
        raise ParseError(f"unknown field(s) {sorted(unknown)}", path)
    missing = required - set(obj)
    if missing:
        raise ParseError(f"missing field(s) {sorted(missing)}", path)


def _label_list(value: Any, path: str) -> list[str]:
    _expect(value, list, path, "a list of strings")
    for i, x in enumerate(value):
        _expect(x, str, f"{path}[{i}]", "a string label")
    return value


def _rational_map(value: Any, path: str) -> dict[str, Fraction]:
    _expect(value, dict, path, "an object mapping labels to rationals")
    return {k: _rational_field(w, f"{path}.{k}") for k, w in value.items()}


def _parse_poset(value: Any, path: str) -> Poset:
    _expect(value, dict, path, "a poset object")
    _check_keys(value, {"elements", "relation"}, set(), path)
    elements = _label_list(value["elements"], f"{path}.elements")
    rel = _expect(value["relation"], list, f"{path}.relation", "a list of pairs")
    pairs = []
    for i, pair in enumerate(rel):
        p = f"{path}.relation[{i}]"
        if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(e, str) for e in pair)):
            raise ParseError("expected a pair of element labels", p)
        pairs.append((pair[0], pair[1]))
    return _with_path(lambda: Poset(tuple(elements), frozenset(pairs)), path)


def _with_path(build, path: str):
    try:
        return build()
    except InvariantError as exc:
        if exc.path is None:
            exc.path = path
            exc.args = (f"{path}: {exc.invariant}",)
        raise


def instance_from_json(doc: Any) -> Instance:
    """Validate an already-decoded JSON document into a domain instance."""
    _expect(doc, dict, "$", "a JSON object")
    if "functions" in doc:
        _check_keys(doc, {"poset", "functions"}, set(), "$")
        params = _parse_poset(doc["poset"], "$.poset")
        funcs = _expect(doc["functions"], dict, "$.functions", "an object of functions")
        members = []
        for name, vals in funcs.items():
            p = f"$.functions.{name}"
            fn = _with_path(lambda: ParamFunction(params, _rational_map(vals, p)), p)
            members.append((name, fn))
        return FamilyInstance(FunctionFamily(params, tuple(members)))
    if "U" in doc:
        _check_keys(doc, {"alternatives", "poset", "U"}, set(), "$")
        alts = _label_list(doc["alternatives"], "$.alternatives")
        params = _parse_poset(doc["poset"], "$.poset")
        rows_raw = _expect(doc["U"], dict, "$.U", "an object of rows")
        rows = {x: _rational_map(r, f"$.U.{x}") for x, r in rows_raw.items()}
        table = _with_path(lambda: ParamUtilityTable.from_rows(alts, params, rows), "$.U")
        return ParamInstance(table)
    if "u" in doc or "v" in doc:
        _check_keys(doc, {"alternatives", "u", "v"}, {"lotteries"}, "$")
        alts = _with_path(lambda: Alternatives(tuple(_label_list(doc["alternatives"], "$.alternatives"))), "$.alternatives")
        u = _with_path(lambda: UtilityTable(alts, _rational_map(doc["u"], "$.u")), "$.u")
        v = _with_path(lambda: UtilityTable(alts, _rational_map(doc["v"], "$.v")), "$.v")
        lotteries = []
        raw = _expect(doc.get("lotteries", []), list, "$.lotteries", "a list of lotteries")
        for i, lot in enumerate(raw):
            p = f"$.lotteries[{i}]"
            lotteries.append(_with_path(lambda: Lottery(alts, _rational_map(lot, p)), p))
        return UtilityPair(u, v, tuple(lotteries))
    raise ParseError("cannot tell instance kind: expected fields u/v, functions, or U")


def parse_instance(text: bytes | str) -> Instance:
    """Decode UTF-8 JSON text into a validated :data:`Instance`."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc.reason}") from None
    try:
        doc = json.loads(text, object_pairs_hook=_no_duplicate_keys, parse_float=_reject_float, parse_constant=_reject_float)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    return instance_from_json(doc)


def dump_json(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
