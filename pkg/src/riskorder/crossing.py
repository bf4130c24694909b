"""Single-crossing, signed-ratio monotonicity and mixture aggregation on a finite poset.

Sign conventions are fixed throughout: a value of exactly zero triggers the
weak implication (``phi(t) >= 0`` implies ``phi(t') >= 0``) but not the
strict one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Literal, Union

from .core import (
    FunctionFamily,
    Lottery,
    ParamFunction,
    Poset,
    as_rational,
    format_rational,
)
from .errors import EmptyFamily, NotSingleCrossing
from .simplex import grid_points, maximize_on_slice

Part = Literal["weak", "strict"]

_fmt = format_rational


def _at(name: str, theta: str) -> str:
    return f"{name}({theta})" if name.isidentifier() else f"[{name}]({theta})"


def _sc_part(a: Fraction, b: Fraction) -> Part | None:
    """Which single-crossing implication fails going from value ``a`` up to ``b``."""
    if a >= 0 and b < 0:
        return "weak"
    if a > 0 and b <= 0:
        return "strict"
    return None


@dataclass(frozen=True)
class ScViolation:
    member: str
    theta: str
    theta_prime: str
    part: Part

    def verify(self, family: FunctionFamily) -> bool:
        fn = family.member(self.member)
        return family.params.leq(self.theta, self.theta_prime) and _violates(
            fn[self.theta], fn[self.theta_prime], self.part
        )

    def explain(self, family: FunctionFamily) -> str:
        fn = family.member(self.member)
        a, b = fn[self.theta], fn[self.theta_prime]
        rel_a, rel_b = (">=", "<") if self.part == "weak" else (">", "<=")
        return (
            f"single-crossing violation ({self.part} part) for {self.member} at "
            f"{self.theta} <= {self.theta_prime}: {_at(self.member, self.theta)} = {_fmt(a)} {rel_a} 0 "
            f"but {_at(self.member, self.theta_prime)} = {_fmt(b)} {rel_b} 0"
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": "sc",
            "member": self.member,
            "theta": self.theta,
            "theta_prime": self.theta_prime,
            "part": self.part,
        }


def _violates(a: Fraction, b: Fraction, part: Part) -> bool:
    if part == "weak":
        return a >= 0 and b < 0
    return a > 0 and b <= 0


@dataclass(frozen=True)
class SrmViolation:
    """``phi(t) < 0 < psi(t)`` yet ``-phi(t) psi(t') < -phi(t') psi(t)``."""

    member_i: str
    member_j: str
    theta: str
    theta_prime: str

    def _values(self, family: FunctionFamily):
        phi, psi = family.member(self.member_i), family.member(self.member_j)
        return phi[self.theta], phi[self.theta_prime], psi[self.theta], psi[self.theta_prime]

    def verify(self, family: FunctionFamily) -> bool:
        if not family.params.leq(self.theta, self.theta_prime):
            return False
        f0, f1, g0, g1 = self._values(family)
        return f0 < 0 < g0 and -f0 * g1 < -f1 * g0

    def explain(self, family: FunctionFamily) -> str:
        f0, f1, g0, g1 = self._values(family)
        i, j, t, s = self.member_i, self.member_j, self.theta, self.theta_prime
        return (
            f"signed-ratio violation for ({i}, {j}) at {t} <= {s}: "
            f"{_at(i, t)} = {_fmt(f0)} < 0 < {_at(j, t)} = {_fmt(g0)} but "
            f"-{_at(i, t)}*{_at(j, s)} = {_fmt(-f0 * g1)} < -{_at(i, s)}*{_at(j, t)} = {_fmt(-f1 * g0)}"
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": "srm",
            "member_i": self.member_i,
            "member_j": self.member_j,
            "theta": self.theta,
            "theta_prime": self.theta_prime,
        }


@dataclass(frozen=True)
class MixtureViolation:
    """A mixture of members that fails single-crossing on ``theta <= theta_prime``."""

    p: Lottery
    theta: str
    theta_prime: str
    part: Part

    def mixed_values(self, family: FunctionFamily) -> tuple[Fraction, Fraction]:
        s0 = sum((self.p[n] * fn[self.theta] for n, fn in family.members), Fraction(0))
        s1 = sum((self.p[n] * fn[self.theta_prime] for n, fn in family.members), Fraction(0))
        return s0, s1

    def verify(self, family: FunctionFamily) -> bool:
        if tuple(self.p.domain.labels) != family.names:
            return False
        if not family.params.leq(self.theta, self.theta_prime):
            return False
        return _violates(*self.mixed_values(family), self.part)

    def explain(self, family: FunctionFamily) -> str:
        s0, s1 = self.mixed_values(family)
        rel_a, rel_b = (">=", "<") if self.part == "weak" else (">", "<=")
        mix = ", ".join(f"{n}: {_fmt(self.p[n])}" for n in self.p.support)
        return (
            f"mixture violation ({self.part} part) at {self.theta} <= {self.theta_prime}, "
            f"p = {{{mix}}}: mixture({self.theta}) = {_fmt(s0)} {rel_a} 0 "
            f"but mixture({self.theta_prime}) = {_fmt(s1)} {rel_b} 0"
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": "mixture",
            "p": self.p.to_json(),
            "theta": self.theta,
            "theta_prime": self.theta_prime,
            "part": self.part,
        }


CrossingWitness = Union[ScViolation, SrmViolation, MixtureViolation]


def crossing_witness_from_json(doc: dict[str, Any], family: FunctionFamily) -> CrossingWitness:
    kind = doc["kind"]
    if kind == "sc":
        return ScViolation(doc["member"], doc["theta"], doc["theta_prime"], doc["part"])
    if kind == "srm":
        return SrmViolation(doc["member_i"], doc["member_j"], doc["theta"], doc["theta_prime"])
    if kind == "mixture":
        p = Lottery(family.names, {n: as_rational(w) for n, w in doc["p"].items()})
        return MixtureViolation(p, doc["theta"], doc["theta_prime"], doc["part"])
    raise ValueError(f"unknown witness kind {kind!r}")


@dataclass(frozen=True)
class CrossingVerdict:
    holds: bool
    route: str
    witness: CrossingWitness | None = None

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
    def from_json(cls, doc: dict[str, Any], family: FunctionFamily) -> CrossingVerdict:
        w = doc.get("witness")
        return cls(doc["holds"], doc["route"], None if w is None else crossing_witness_from_json(w, family))


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def check_single_crossing(fn: ParamFunction, name: str = "phi") -> CrossingVerdict:
    for t, s in fn.params.strict_pairs():
        part = _sc_part(fn[t], fn[s])
        if part is not None:
            return CrossingVerdict(False, "sc", ScViolation(name, t, s, part))
    return CrossingVerdict(True, "sc")


def check_family_sc(family: FunctionFamily) -> CrossingVerdict:
    for name, fn in family.members:
        verdict = check_single_crossing(fn, name)
        if not verdict.holds:
            return verdict
    return CrossingVerdict(True, "sc")


def _distinct_members(family: FunctionFamily) -> list[tuple[str, ParamFunction]]:
    # repeated functions only lengthen the scan; the first copy is kept
    seen: list[ParamFunction] = []
    out = []
    for name, fn in family.members:
        if fn not in seen:
            seen.append(fn)
            out.append((name, fn))
    return out


def check_srm(family: FunctionFamily) -> CrossingVerdict:
    """Product form of signed-ratio monotonicity over ordered member pairs."""
    members = _distinct_members(family)
    pairs = family.params.strict_pairs()
    for name_i, phi in members:
        for name_j, psi in members:
            if name_i == name_j:
                continue
            for t, s in pairs:
                if phi[t] < 0 < psi[t] and -phi[t] * psi[s] < -phi[s] * psi[t]:
                    return CrossingVerdict(False, "srm", SrmViolation(name_i, name_j, t, s))
    return CrossingVerdict(True, "srm")


def srm_ratio_form(family: FunctionFamily) -> CrossingVerdict:
    """Signed-ratio monotonicity in ratio form; members must be single-crossing.

    With every member single-crossing, ``psi(t) > 0`` forces ``psi(t') > 0``
    so ``-phi(t)/psi(t) >= -phi(t')/psi(t')`` is well defined.
    """
    sc = check_family_sc(family)
    if not sc.holds:
        raise NotSingleCrossing(f"member {sc.witness.member!r} is not single-crossing")
    members = _distinct_members(family)
    pairs = family.params.strict_pairs()
    for name_i, phi in members:
        for name_j, psi in members:
            if name_i == name_j:
                continue
            for t, s in pairs:
                if phi[t] < 0 < psi[t] and -phi[t] / psi[t] < -phi[s] / psi[s]:
                    return CrossingVerdict(False, "srm_ratio", SrmViolation(name_i, name_j, t, s))
    return CrossingVerdict(True, "srm_ratio")


def _mixture_lottery(family: FunctionFamily, weights) -> Lottery:
    return Lottery(family.names, dict(zip(family.names, weights)))


def mixture_violation_on_pair(family: FunctionFamily, t: str, s: str) -> MixtureViolation | None:
    """Exact search for a single-crossing failure of some mixture on ``t <= s``.

    With ``a = member values at t`` and ``b = member values at s``:

    * weak part fails iff ``max{-b.p : -a.p <= 0} > 0``;
    * strict part fails iff ``max{a.p : b.p <= 0} > 0``.

    Either program may be infeasible, which means no violation of that part.
    """
    a = [fn[t] for _, fn in family.members]
    b = [fn[s] for _, fn in family.members]
    n = len(a)
    zero = Fraction(0)
    best = maximize_on_slice([-x for x in b], [-x for x in a], zero)
    if best is not None and best[0] > 0:
        return MixtureViolation(_mixture_lottery(family, best[1].dense(n)), t, s, "weak")
    best = maximize_on_slice(a, b, zero)
    if best is not None and best[0] > 0:
        return MixtureViolation(_mixture_lottery(family, best[1].dense(n)), t, s, "strict")
    return None


def check_mixture_sc(family: FunctionFamily) -> CrossingVerdict:
    """Is every convex combination of the members single-crossing?"""
    if not family.members:
        raise EmptyFamily("mixture check needs at least one member")
    for t, s in family.params.strict_pairs():
        w = mixture_violation_on_pair(family, t, s)
        if w is not None:
            return CrossingVerdict(False, "mixture", w)
    return CrossingVerdict(True, "mixture")


def check_mixture_sc_grid(family: FunctionFamily, denom_bound: int) -> CrossingVerdict:
    """Brute-force oracle over mixtures with weights in ``(1/denom_bound) Z``."""
    if not family.members:
        raise EmptyFamily("mixture check needs at least one member")
    if denom_bound < 1:
        raise ValueError("denom_bound must be a positive integer")
    pairs = family.params.strict_pairs()
    elements = family.params.elements
    for p in grid_points(len(family), denom_bound):
        mixed = {
            t: sum((w * fn[t] for w, (_, fn) in zip(p, family.members)), Fraction(0))
            for t in elements
        }
        for t, s in pairs:
            part = _sc_part(mixed[t], mixed[s])
            if part is not None:
                return CrossingVerdict(False, "mixture_grid", MixtureViolation(_mixture_lottery(family, p), t, s, part))
    return CrossingVerdict(True, "mixture_grid")


def restrict_to_pair(family: FunctionFamily, t: str, s: str) -> FunctionFamily:
    """The family viewed on the two-element chain ``t <= s``."""
    return family.on(Poset((t, s), frozenset({(t, s)})))
