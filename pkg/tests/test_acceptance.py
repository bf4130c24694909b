"""Acceptance criteria, each run at its stated size and tolerance.

Every test prints one ``criterion N [PASS|FAIL]`` line; the lines are
collected into an "acceptance criteria" section of the pytest summary.
"""

from __future__ import annotations

import json
import random
import time
from fractions import Fraction
from math import lcm

import pytest

from riskorder.cli import run
from riskorder.core import FunctionFamily
from riskorder.crossing import (
    MixtureViolation,
    check_family_sc,
    check_mixture_sc,
    check_mixture_sc_grid,
    check_single_crossing,
    check_srm,
)
from riskorder.equivalence import gen_random_family, gen_random_pair, random_transform
from riskorder.errors import TransformError
from riskorder.risk_order import (
    CompressionViolation,
    LotteryViolation,
    OrdinalViolation,
    build_transform,
    check_lra_definition,
    check_lra_grid,
    check_lra_pratt,
    compose_table,
)

from conftest import chain_family, record_criterion, table

pytestmark = pytest.mark.acceptance


def _transform_succeeds(u, v) -> bool:
    try:
        build_transform(u, v)
    except TransformError:
        return False
    return True


def test_criterion_1_pratt_route_agreement():
    rng = random.Random(20240601)
    start = time.perf_counter()
    mismatches, holds = [], 0
    for i in range(1000):
        pair = gen_random_pair(rng, rng.randint(2, 6), 20, 6, comonotone=bool(i % 2))
        d = check_lra_definition(pair.u, pair.v).holds
        p = check_lra_pratt(pair.u, pair.v).holds
        t = _transform_succeeds(pair.u, pair.v)
        holds += d
        if not d == p == t:
            mismatches.append(i)
    elapsed = time.perf_counter() - start
    passed = not mismatches and elapsed < 5
    record_criterion(1, "definition = Pratt = transform on 1000 pairs", passed,
                     f"{len(mismatches)} mismatches, {holds} hold, {elapsed:.2f}s")
    assert not mismatches, mismatches[:10]
    assert elapsed < 5


def test_criterion_2_definition_matches_grid_oracle():
    rng = random.Random(20240602)
    start = time.perf_counter()
    mismatches = []
    for i in range(500):
        pair = gen_random_pair(rng, rng.randint(2, 4), 20, 4, comonotone=bool(i % 2))
        exact = check_lra_definition(pair.u, pair.v)
        grid = check_lra_grid(pair.u, pair.v, 6)
        if exact.holds != grid.holds:
            mismatches.append((i, pair.u.as_tuple(), pair.v.as_tuple(), exact.witness))
    elapsed = time.perf_counter() - start
    detail = f"{len(mismatches)} mismatches, {elapsed:.2f}s"
    if mismatches:
        i, u, v, w = mismatches[0]
        detail += f"; first #{i}: u={tuple(map(str, u))} v={tuple(map(str, v))} exact witness p={w.p.weights}"
    record_criterion(2, "definition = grid(6) on 500 pairs", not mismatches and elapsed < 30, detail)
    # Any mismatch must be a genuine violation the 1/6 grid cannot see, never the reverse.
    for _, u, v, w in mismatches:
        ut, vt = table(list(u)), table(list(v))
        assert w is not None and w.verify(ut, vt)
        assert not check_lra_grid(ut, vt, lcm(*(q.denominator for q in w.p.weights.values()))).holds
    n_mismatches = len(mismatches)
    assert n_mismatches == 0, detail
    assert elapsed < 30


def test_criterion_3_aggregation_theorem():
    rng = random.Random(20240603)
    start = time.perf_counter()
    families: list[FunctionFamily] = []
    for i in range(1000):
        families.append(gen_random_family(
            rng,
            n_members=rng.randint(1, 5),
            n_params=rng.randint(1, 4),
            density=Fraction(rng.randint(0, 4), 4),
            max_abs_numerator=rng.choice((1, 2, 5)),
            max_denominator=rng.choice((1, 3)),
        ))
    exact_bad = []
    for i, fam in enumerate(families):
        if check_mixture_sc(fam).holds != (check_family_sc(fam).holds and check_srm(fam).holds):
            exact_bad.append(i)
    order = sorted(range(len(families)), key=lambda i: (len(families[i]) * len(families[i].params.elements), i))
    grid_bad = [i for i in order[:300] if check_mixture_sc(families[i]).holds != check_mixture_sc_grid(families[i], 6).holds]
    elapsed = time.perf_counter() - start
    passed = not exact_bad and not grid_bad and elapsed < 30
    record_criterion(3, "mixture SC = SC and SRM on 1000 families; grid(6) on 300 smallest", passed,
                     f"{len(exact_bad)} exact and {len(grid_bad)} grid mismatches, {elapsed:.2f}s")
    assert not exact_bad and not grid_bad
    assert elapsed < 30


def test_criterion_4_selftest_campaign(monkeypatch, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("RISKORDER_THREADS", raising=False)
    start = time.perf_counter()
    result = run(["selftest", "--instances", "1000", "--seed", "42", "--json"])
    elapsed = time.perf_counter() - start
    doc = json.loads(result.stdout)
    counts = doc["instances"]
    passed = result.code == 0 and doc["ok"] and not doc["failures"] and elapsed < 60
    record_criterion(4, "selftest 1000 random + 500 constructive", passed,
                     f"exit {result.code}, {len(doc['failures'])} failures, "
                     f"random holds {counts['random']['holds']}/{counts['random']['total']}, "
                     f"constructive holds {counts['constructive']['holds']}/{counts['constructive']['total']}, "
                     f"{elapsed:.2f}s")
    assert result.code == 0 and not doc["failures"]
    assert counts == {"random": {"total": 1000, "holds": counts["random"]["holds"]},
                      "constructive": {"total": 500, "holds": 500}}
    assert elapsed < 60


def test_criterion_5_hand_worked_fixtures():
    checks = []
    u, v = table([0, 1, 4]), table([0, 1, 2])
    checks.append(check_lra_definition(u, v).holds and check_lra_pratt(u, v).holds)
    checks.append(build_transform(u, v).knots == ((0, 0), (1, 1), (2, 4)))

    u, v = table([0, 1]), table([1, 0])
    checks.append(isinstance(check_lra_pratt(u, v).witness, OrdinalViolation))
    checks.append(not check_lra_definition(u, v).holds)

    u, v = table([0, 1, 2]), table([0, 1, 4])
    checks.append(check_lra_pratt(u, v).witness == CompressionViolation("a", "b", "c"))
    w = check_lra_definition(u, v).witness
    checks.append(isinstance(w, LotteryViolation) and w.y == "b"
                  and w.p.weights == {"a": Fraction(1, 2), "b": 0, "c": Fraction(1, 2)})

    fam = chain_family({"phi": {"a": -1, "b": -3}, "psi": {"a": 1, "b": 1}})
    checks.append(not check_srm(fam).holds)
    m = check_mixture_sc(fam).witness
    checks.append(isinstance(m, MixtureViolation) and m.p.weights == {"phi": Fraction(1, 2), "psi": Fraction(1, 2)})

    record_criterion(5, "fixtures E1, E2, E3, SRM", all(checks), f"{sum(checks)}/{len(checks)} checks")
    assert all(checks), checks


def test_criterion_6_metamorphic_suite():
    rng = random.Random(20240606)
    failures: dict[str, int] = {"affine": 0, "scaling": 0, "constructive": 0, "transitivity": 0}

    for i in range(200):
        pair = gen_random_pair(rng, rng.randint(2, 6), 20, 6, comonotone=bool(i % 2))
        base = check_lra_definition(pair.u, pair.v).holds
        for _ in range(3):
            a = Fraction(rng.randint(1, 12), rng.randint(1, 6))
            b = Fraction(rng.randint(-20, 20), rng.randint(1, 6))
            c = Fraction(rng.randint(1, 12), rng.randint(1, 6))
            d = Fraction(rng.randint(-20, 20), rng.randint(1, 6))
            uu, vv = pair.u.affine(a, b), pair.v.affine(c, d)
            if (check_lra_definition(uu, vv).holds != base or check_lra_pratt(uu, vv).holds != base
                    or _transform_succeeds(uu, vv) != base):
                failures["affine"] += 1

    for _ in range(200):
        fam = gen_random_family(rng, rng.randint(1, 5), rng.randint(1, 4), Fraction(rng.randint(0, 4), 4))
        scaled = FunctionFamily(fam.params, tuple(
            (n, f.scaled(Fraction(rng.randint(1, 9), rng.randint(1, 4)))) for n, f in fam.members
        ))
        same = all(check_single_crossing(f).holds == check_single_crossing(g).holds
                   for (_, f), (_, g) in zip(fam.members, scaled.members))
        same = same and check_srm(fam).holds == check_srm(scaled).holds
        same = same and check_mixture_sc(fam).holds == check_mixture_sc(scaled).holds
        failures["scaling"] += not same

    for _ in range(200):
        v = gen_random_pair(rng, rng.randint(1, 6)).u
        u = compose_table(random_transform(rng, v.as_tuple(), extra_knots=2), v)
        failures["constructive"] += not check_lra_definition(u, v).holds

    for _ in range(200):
        w = gen_random_pair(rng, rng.randint(1, 6)).u
        v = compose_table(random_transform(rng, w.as_tuple(), extra_knots=2), w)
        u = compose_table(random_transform(rng, v.as_tuple(), extra_knots=2), v)
        ok = check_lra_definition(u, v).holds and check_lra_definition(v, w).holds
        failures["transitivity"] += not (ok and check_lra_definition(u, w).holds)

    passed = not any(failures.values())
    record_criterion(6, "metamorphic: affine, scaling, constructive, transitivity", passed,
                     ", ".join(f"{k} {n}" for k, n in failures.items()))
    assert passed, failures
