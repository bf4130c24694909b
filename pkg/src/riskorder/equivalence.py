"""Parametrised utilities: comparing ``U(., t)`` across a poset two ways.

Side (a) asks that ``U(., t)`` be less risk-averse than ``U(., t')`` whenever
``t <= t'``.  Side (b) asks for single-crossing differences plus signed-ratio
monotonicity of every difference family ``{U(y, .) - U(x, .) : x}``.  The two
sides are equivalent for every input, so :func:`check_proposition` computes
both (plus a mixture-based route per comparable pair) and treats any
disagreement as a bug.

Also holds the seeded instance generators used by the self-test campaign.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .core import (
    Alternatives,
    FunctionFamily,
    ParamInstance,
    ParamUtilityTable,
    Poset,
    UtilityPair,
    UtilityTable,
    as_rational,
)
from .crossing import (
    CrossingVerdict,
    check_family_sc,
    check_mixture_sc,
    check_srm,
    restrict_to_pair,
)
from .errors import InvariantError, TheoremViolation, UnknownAlternative, UnsupportedPoset
from .risk_order import (
    PLTransform,
    RiskOrderVerdict,
    check_lra_definition,
    check_lra_pratt,
    compose_table,
)


def differences_family(U: ParamUtilityTable, y: str) -> FunctionFamily:
    """``{U(y, .) - U(x, .) : x in X}``, one member per ``x`` named ``x``."""
    if y not in U.alternatives:
        raise UnknownAlternative(y)
    top = U.row(y)
    return FunctionFamily(U.params, tuple((x, top - U.row(x)) for x in U.alternatives))


def _difference_name(y: str, x: str) -> str:
    return f"U({y})-U({x})"


# ---------------------------------------------------------------------------
# Side (a)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairReport:
    theta: str
    theta_prime: str
    verdict: RiskOrderVerdict

    def to_json(self) -> dict[str, Any]:
        return {"theta": self.theta, "theta_prime": self.theta_prime, "verdict": self.verdict.to_json()}


@dataclass(frozen=True)
class SideA:
    holds: bool
    pairs: tuple[PairReport, ...]

    @property
    def first_failure(self) -> PairReport | None:
        return next((p for p in self.pairs if not p.verdict.holds), None)

    def to_json(self) -> dict[str, Any]:
        return {"holds": self.holds, "pairs": [p.to_json() for p in self.pairs]}


_SIDE_A_ROUTES = {"definition": check_lra_definition, "pratt": check_lra_pratt}


def check_prop_a(U: ParamUtilityTable, route: str = "definition") -> SideA:
    """Risk-order comparison of every pair of comparable slices."""
    check = _SIDE_A_ROUTES[route]
    pairs = tuple(
        PairReport(t, s, check(U.slice(t), U.slice(s))) for t, s in U.params.strict_pairs()
    )
    return SideA(all(p.verdict.holds for p in pairs), pairs)


# ---------------------------------------------------------------------------
# Side (b)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SideB:
    sc: CrossingVerdict
    srm: dict[str, CrossingVerdict]

    @property
    def holds(self) -> bool:
        return self.sc.holds and all(v.holds for v in self.srm.values())

    def to_json(self) -> dict[str, Any]:
        return {
            "holds": self.holds,
            "sc": self.sc.to_json(),
            "srm": {y: v.to_json() for y, v in self.srm.items()},
        }


def single_crossing_differences(U: ParamUtilityTable) -> FunctionFamily:
    """All ``U(y, .) - U(x, .)`` for ``x != y`` (``y`` outer)."""
    members = tuple(
        (_difference_name(y, x), U.row(y) - U.row(x))
        for y in U.alternatives
        for x in U.alternatives
        if x != y
    )
    return FunctionFamily(U.params, members)


def check_prop_b(U: ParamUtilityTable) -> SideB:
    sc = check_family_sc(single_crossing_differences(U))
    srm = {y: check_srm(differences_family(U, y)) for y in U.alternatives}
    return SideB(sc, srm)


# ---------------------------------------------------------------------------
# Mixture route, per comparable pair
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MixturePairReport:
    theta: str
    theta_prime: str
    verdicts: dict[str, CrossingVerdict]

    @property
    def holds(self) -> bool:
        return all(v.holds for v in self.verdicts.values())

    def to_json(self) -> dict[str, Any]:
        return {
            "theta": self.theta,
            "theta_prime": self.theta_prime,
            "holds": self.holds,
            "by_y": {y: v.to_json() for y, v in self.verdicts.items()},
        }


def check_mixture_route(U: ParamUtilityTable) -> tuple[MixturePairReport, ...]:
    """Every mixture of ``U(y, .) - U(x, .)`` over ``x`` single-crossing on ``t <= t'``."""
    families = {y: differences_family(U, y) for y in U.alternatives}
    return tuple(
        MixturePairReport(t, s, {y: check_mixture_sc(restrict_to_pair(fam, t, s)) for y, fam in families.items()})
        for t, s in U.params.strict_pairs()
    )


# ---------------------------------------------------------------------------
# Both sides together
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PropositionReport:
    side_a: SideA
    side_a_pratt: SideA
    side_b: SideB
    mixture_route: tuple[MixturePairReport, ...]
    agree: bool

    @property
    def side_b_sc(self) -> CrossingVerdict:
        return self.side_b.sc

    @property
    def side_b_srm(self) -> dict[str, CrossingVerdict]:
        return self.side_b.srm

    @property
    def holds(self) -> bool:
        return self.side_a.holds

    @property
    def mixture_holds(self) -> bool:
        return all(r.holds for r in self.mixture_route)

    def to_json(self) -> dict[str, Any]:
        return {
            "holds": self.holds,
            "agree": self.agree,
            "side_a": self.side_a.to_json(),
            "side_a_pratt": self.side_a_pratt.to_json(),
            "side_b": self.side_b.to_json(),
            "mixture_route": [r.to_json() for r in self.mixture_route],
        }


def _disagreements(report: PropositionReport) -> list[str]:
    out = []
    totals = {
        "side (a), definition": report.side_a.holds,
        "side (a), pratt": report.side_a_pratt.holds,
        "side (b)": report.side_b.holds,
        "mixture route": report.mixture_holds,
    }
    if len(set(totals.values())) > 1:
        out.append("overall verdicts differ: " + ", ".join(f"{k}={v}" for k, v in totals.items()))
    for pa, pp, pm in zip(report.side_a.pairs, report.side_a_pratt.pairs, report.mixture_route):
        if not (pa.verdict.holds == pp.verdict.holds == pm.holds):
            out.append(
                f"pair ({pa.theta}, {pa.theta_prime}): definition={pa.verdict.holds}, "
                f"pratt={pp.verdict.holds}, mixture={pm.holds}"
            )
    return out


def check_proposition(U: ParamUtilityTable, raise_on_disagreement: bool = True) -> PropositionReport:
    """Compute both sides and the mixture route; they must agree pair by pair.

    Raises :class:`TheoremViolation` (carrying the instance) on disagreement
    unless ``raise_on_disagreement`` is false, in which case ``agree`` is
    reported as ``False``.
    """
    side_a = check_prop_a(U, "definition")
    side_a_pratt = check_prop_a(U, "pratt")
    side_b = check_prop_b(U)
    mixture = check_mixture_route(U)
    report = PropositionReport(side_a, side_a_pratt, side_b, mixture, True)
    problems = _disagreements(report)
    if problems:
        if raise_on_disagreement:
            raise TheoremViolation("; ".join(problems), ParamInstance(U))
        report = PropositionReport(side_a, side_a_pratt, side_b, mixture, False)
    return report


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

_SEED_MIN, _SEED_MAX = -(2**63), 2**64 - 1


@dataclass(frozen=True)
class InstanceGenParams:
    seed: int
    n_alternatives: int = 3
    n_params: int = 3
    relation_density: Fraction = Fraction(1, 2)
    max_abs_numerator: int = 20
    max_denominator: int = 6

    def __post_init__(self):
        object.__setattr__(self, "relation_density", as_rational(self.relation_density))
        if not _SEED_MIN <= self.seed <= _SEED_MAX:
            raise InvariantError("seed must fit in 64 bits")
        if not 2 <= self.n_alternatives <= 6:
            raise InvariantError("n_alternatives must lie in 2..6")
        # a single parameter is allowed so that the degenerate one-slice chain can be generated
        if not 1 <= self.n_params <= 5:
            raise InvariantError("n_params must lie in 1..5")
        if not 0 <= self.relation_density <= 1:
            raise InvariantError("relation_density must lie in [0, 1]")
        if self.max_abs_numerator < 1 or self.max_denominator < 1:
            raise InvariantError("max_abs_numerator and max_denominator must be positive")


def alternative_labels(n: int) -> tuple[str, ...]:
    return tuple("abcdefghijklmnopqrstuvwxyz"[i] if n <= 26 else f"x{i}" for i in range(n))


def param_labels(n: int) -> tuple[str, ...]:
    return tuple(f"t{i + 1}" for i in range(n))


def random_rational(rng: random.Random, max_abs_numerator: int, max_denominator: int) -> Fraction:
    return Fraction(rng.randint(-max_abs_numerator, max_abs_numerator), rng.randint(1, max_denominator))


def _bernoulli(rng: random.Random, prob: Fraction) -> bool:
    return rng.randrange(prob.denominator) < prob.numerator


def random_poset(rng: random.Random, elements: tuple[str, ...], density: Fraction) -> Poset:
    """Random DAG on a shuffled order: each forward edge kept with probability ``density``."""
    order = list(elements)
    rng.shuffle(order)
    rel = frozenset(
        (order[i], order[j])
        for i in range(len(order))
        for j in range(i + 1, len(order))
        if _bernoulli(rng, density)
    )
    return Poset(elements, rel)


def random_table(rng: random.Random, labels: tuple[str, ...], max_abs_numerator: int, max_denominator: int) -> UtilityTable:
    return UtilityTable(Alternatives(labels), {x: random_rational(rng, max_abs_numerator, max_denominator) for x in labels})


def gen_random_pair(
    rng: random.Random,
    n_alternatives: int,
    max_abs_numerator: int = 20,
    max_denominator: int = 6,
    comonotone: bool = False,
) -> UtilityPair:
    """Random pair of utility tables.

    With ``comonotone`` both tables are drawn independently and then each is
    sorted along one shared random ranking of the alternatives, so ordinal
    agreement is likely and the compression inequality decides the verdict.
    """
    labels = alternative_labels(n_alternatives)
    u = random_table(rng, labels, max_abs_numerator, max_denominator)
    v = random_table(rng, labels, max_abs_numerator, max_denominator)
    if comonotone:
        ranking = list(labels)
        rng.shuffle(ranking)
        u = UtilityTable(u.domain, dict(zip(ranking, sorted(u.as_tuple()))))
        v = UtilityTable(v.domain, dict(zip(ranking, sorted(v.as_tuple()))))
    return UtilityPair(u, v)


def random_transform(
    rng: random.Random,
    points,
    max_slope_numerator: int = 4,
    max_slope_denominator: int = 3,
    extra_knots: int = 1,
) -> PLTransform:
    """Random valid transform whose domain is the hull of ``points``.

    Knots sit at every distinct point plus up to ``extra_knots`` random interior
    abscissae; slopes are positive rationals sorted into nondecreasing order.
    """
    ts = sorted(set(as_rational(t) for t in points))
    if len(ts) > 1:
        for _ in range(rng.randint(0, extra_knots)):
            i = rng.randrange(len(ts) - 1)
            lam = Fraction(rng.randint(1, 5), 6)
            ts.append(ts[i] + lam * (ts[i + 1] - ts[i]))
        ts = sorted(set(ts))
    slopes = sorted(
        Fraction(rng.randint(1, max_slope_numerator), rng.randint(1, max_slope_denominator))
        for _ in range(len(ts) - 1)
    )
    value = random_rational(rng, 10, 3)
    knots = [(ts[0], value)]
    for (t0, t1), slope in zip(zip(ts, ts[1:]), slopes):
        value = value + slope * (t1 - t0)
        knots.append((t1, value))
    return PLTransform(tuple(knots))


def gen_random_family(
    rng: random.Random,
    n_members: int,
    n_params: int,
    density: Fraction = Fraction(1, 2),
    max_abs_numerator: int = 5,
    max_denominator: int = 3,
) -> FunctionFamily:
    params = random_poset(rng, param_labels(n_params), density)
    members = {
        f"f{i + 1}": {t: random_rational(rng, max_abs_numerator, max_denominator) for t in params.elements}
        for i in range(n_members)
    }
    return FunctionFamily.from_values(params, members)


def gen_random_instance(params: InstanceGenParams) -> ParamInstance:
    """Seeded random ``U`` on a random poset.  Same params, same instance."""
    rng = random.Random(params.seed)
    alts = alternative_labels(params.n_alternatives)
    poset = random_poset(rng, param_labels(params.n_params), params.relation_density)
    values = {
        (x, t): random_rational(rng, params.max_abs_numerator, params.max_denominator)
        for x in alts
        for t in poset.elements
    }
    return ParamInstance(ParamUtilityTable(Alternatives(alts), poset, values))


def gen_positive_instance(params: InstanceGenParams) -> ParamInstance:
    """Seeded ``U`` on the chain ``t1 <= ... <= tn`` for which side (a) holds.

    The top slice is random; each lower slice is a fresh random increasing
    convex transform of the slice above it.
    """
    if params.relation_density != 1:
        raise UnsupportedPoset("constructive instances are generated on chains only (relation_density = 1)")
    rng = random.Random(params.seed)
    alts = alternative_labels(params.n_alternatives)
    chain = Poset.chain(param_labels(params.n_params))
    slices = [random_table(rng, alts, params.max_abs_numerator, params.max_denominator)]
    for _ in range(params.n_params - 1):
        above = slices[-1]
        slices.append(compose_table(random_transform(rng, above.as_tuple()), above))
    slices.reverse()
    values = {(x, t): sl[x] for t, sl in zip(chain.elements, slices) for x in alts}
    return ParamInstance(ParamUtilityTable(Alternatives(alts), chain, values))


def campaign_params(master: random.Random, index: int) -> InstanceGenParams:
    """Per-instance generator parameters for the self-test campaign.

    Small numerator ranges are mixed in so that ties and the holds case are
    well represented.
    """
    return InstanceGenParams(
        seed=master.getrandbits(63),
        n_alternatives=master.randint(2, 6),
        n_params=master.randint(2, 5),
        relation_density=Fraction(master.randint(0, 4), 4),
        max_abs_numerator=master.choice((1, 2, 3, 5, 20)),
        max_denominator=master.choice((1, 2, 6)),
    )
