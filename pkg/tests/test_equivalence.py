from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from riskorder import equivalence as eq
from riskorder.core import FunctionFamily, ParamUtilityTable, Poset
from riskorder.crossing import CrossingVerdict, SrmViolation, check_mixture_sc, check_srm
from riskorder.equivalence import (
    InstanceGenParams,
    check_prop_a,
    check_prop_b,
    check_proposition,
    differences_family,
    gen_positive_instance,
    gen_random_instance,
)
from riskorder.errors import InvariantError, TheoremViolation, UnknownAlternative, UnsupportedPoset
from riskorder.risk_order import check_lra_definition


def make_U(rows, poset=None):
    """rows: {theta: [values for a, b, c, ...]} on a chain in insertion order unless ``poset`` given."""
    thetas = tuple(rows)
    poset = poset or Poset.chain(thetas)
    n = len(next(iter(rows.values())))
    alts = "abcdef"[:n]
    values = {(x, t): rows[t][i] for t in thetas for i, x in enumerate(alts)}
    return ParamUtilityTable(alts, poset, values)


E1_U = {"t1": [0, 1, 4], "t2": [0, 1, 2]}
REVERSAL_U = {"t1": [0, 1], "t2": [1, 0]}


def flipped_srm(family: FunctionFamily) -> CrossingVerdict:
    """check_srm with its final inequality reversed; a planted bug."""
    pairs = family.params.strict_pairs()
    for ni, phi in family.members:
        for nj, psi in family.members:
            for t, s in pairs:
                if ni != nj and phi[t] < 0 < psi[t] and -phi[t] * psi[s] > -phi[s] * psi[t]:
                    return CrossingVerdict(False, "srm", SrmViolation(ni, nj, t, s))
    return CrossingVerdict(True, "srm")


# -- differences ------------------------------------------------------------------


def test_differences_family_examples():
    U = make_U(E1_U)
    fam = differences_family(U, "c")
    assert fam.names == ("a", "b", "c")
    assert fam.member("c").values == {"t1": 0, "t2": 0}
    assert fam.member("a").values == {"t1": 4, "t2": 2}
    assert fam.member("b").values == {"t1": 3, "t2": 1}
    const = make_U({"t1": [0, 1], "t2": [0, 1]})
    assert differences_family(const, "b").member("a").values == {"t1": 1, "t2": 1}
    with pytest.raises(UnknownAlternative):
        differences_family(U, "z")


# -- sides (a) and (b) ------------------------------------------------------------


def test_prop_a_examples():
    assert check_prop_a(make_U({"t1": [0, 3, 1], "t2": [0, 3, 1]})).holds
    antichain = Poset(("t1", "t2"))
    assert check_prop_a(make_U(REVERSAL_U, antichain)).holds
    side = check_prop_a(make_U(E1_U))
    assert side.holds and len(side.pairs) == 1


def test_prop_b_examples():
    assert check_prop_b(make_U({"t1": [0, 3, 1], "t2": [0, 3, 1]})).holds
    side = check_prop_b(make_U(REVERSAL_U))
    assert not side.sc.holds
    assert check_prop_b(make_U(E1_U)).holds


def test_proposition_examples():
    report = check_proposition(make_U(E1_U))
    assert report.agree and report.holds and report.side_b.holds and report.mixture_holds
    report = check_proposition(make_U(REVERSAL_U))
    assert report.agree and not report.holds
    assert not report.side_b.holds and not report.mixture_holds and not report.side_a_pratt.holds


def test_slicing_consistency():
    rng = random.Random(5)
    for i in range(50):
        U = gen_random_instance(InstanceGenParams(seed=rng.getrandbits(32), n_params=4)).table
        side = check_prop_a(U)
        for pr in side.pairs:
            assert pr.verdict == check_lra_definition(U.slice(pr.theta), U.slice(pr.theta_prime))


@given(st.integers(0, 2**40), st.integers(2, 5), st.integers(2, 4), st.sampled_from([1, 2, 20]))
def test_proposition_and_zero_member(seed, n_alt, n_par, num):
    params = InstanceGenParams(seed, n_alt, n_par, Fraction(1, 2), num, 3)
    U = gen_random_instance(params).table
    report = check_proposition(U)
    assert report.agree
    for y in U.alternatives:
        fam = differences_family(U, y)
        without = FunctionFamily(fam.params, tuple(m for m in fam.members if m[0] != y))
        assert check_srm(fam).holds == check_srm(without).holds
        if without.members:
            assert check_mixture_sc(fam).holds == check_mixture_sc(without).holds


def test_proof_routes_agree_instance_by_instance():
    master = random.Random(11)
    for i in range(200):
        params = eq.campaign_params(master, i)
        report = check_proposition(gen_random_instance(params).table)
        for pa, pp, pm in zip(report.side_a.pairs, report.side_a_pratt.pairs, report.mixture_route):
            assert pa.verdict.holds == pp.verdict.holds == pm.holds


def test_planted_bug_is_a_theorem_violation(monkeypatch):
    monkeypatch.setattr(eq, "check_srm", flipped_srm)
    with pytest.raises(TheoremViolation) as info:
        check_proposition(make_U(E1_U))
    assert info.value.instance.table == make_U(E1_U)
    report = check_proposition(make_U(E1_U), raise_on_disagreement=False)
    assert not report.agree


# -- generators --------------------------------------------------------------------


def test_generator_determinism():
    p = InstanceGenParams(seed=123, n_alternatives=4, n_params=4)
    assert gen_random_instance(p) == gen_random_instance(p)
    assert gen_random_instance(p) != gen_random_instance(InstanceGenParams(seed=124, n_alternatives=4, n_params=4))


def test_density_extremes():
    p = InstanceGenParams(seed=7, n_params=5, relation_density=0)
    assert gen_random_instance(p).table.params.strict_pairs() == []
    for seed in range(20):
        poset = gen_random_instance(InstanceGenParams(seed=seed, n_params=3, relation_density=1)).table.params
        # a chain on 3 elements has exactly 3 strict comparable pairs, all orientable
        pairs = poset.strict_pairs()
        assert len(pairs) == 3
        assert all((a, b) in pairs or (b, a) in pairs for a in poset.elements for b in poset.elements if a != b)


@pytest.mark.parametrize("kwargs", [
    {"n_alternatives": 1}, {"n_alternatives": 7}, {"n_params": 6}, {"n_params": 0},
    {"relation_density": Fraction(3, 2)}, {"max_denominator": 0}, {"max_abs_numerator": 0},
])
def test_gen_params_validation(kwargs):
    with pytest.raises(InvariantError):
        InstanceGenParams(seed=1, **kwargs)
    with pytest.raises(InvariantError):
        InstanceGenParams(seed=2**64)


def test_positive_instances():
    for seed in range(100):
        p = InstanceGenParams(seed=seed, n_alternatives=2 + seed % 5, n_params=1 + seed % 5, relation_density=1)
        U = gen_positive_instance(p).table
        assert check_prop_a(U).holds
        assert check_prop_b(U).holds
    one = gen_positive_instance(InstanceGenParams(seed=3, n_params=1, relation_density=1)).table
    assert one.params.strict_pairs() == []
    with pytest.raises(UnsupportedPoset):
        gen_positive_instance(InstanceGenParams(seed=3, relation_density=Fraction(1, 2)))
