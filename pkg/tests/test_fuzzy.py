from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings

import published as pub
from oracles import all_compositions, brute_clique, morphologies
from morphsynth.errors import InfeasibleError, ValidationError
from morphsynth.fuzzy import (FuzzyCompatibility, FuzzyPriority, aggregate_compatibility,
                              aggregate_priority, pessimistic_corner, quality_support, solve_fuzzy)
from morphsynth.hmmd import QualityVector, census


def brute_support(m, c, fp=True, fc=True):
    """Enumerate every joint assignment of levels; min for memberships, max to merge."""
    prio = []
    for d in c.das:
        da = m.alternative(d)
        if fp and da.fuzzy_priority is not None:
            prio.append([(r, Fraction(mu)) for r, mu in enumerate(da.fuzzy_priority, 1) if mu > 0])
        else:
            prio.append([(da.priority, Fraction(1))])
    comp = []
    for i in range(len(c.das)):
        for j in range(i + 1, len(c.das)):
            if not m.compat.covers(c.parts[i], c.parts[j]):
                continue
            fz = m.compat.fuzzy(c.das[i], c.das[j]) if fc else None
            if fz is None:
                comp.append([(m.compat.level(c.das[i], c.das[j]), Fraction(1))])
            else:
                comp.append([(m.l - t, Fraction(mu)) for t, mu in enumerate(fz) if mu > 0])
    out = {}
    for ps in product(*prio):
        for ws in product(*comp):
            mu = min([x for _, x in ps] + [x for _, x in ws])
            q = QualityVector(min([w for w, _ in ws], default=m.l), census([r for r, _ in ps], m.k))
            out[q] = max(out.get(q, Fraction(0)), mu)
    return out


def test_aggregation_ties():
    assert aggregate_priority(["0.4", "0.4", "0.2"]) == 2
    assert aggregate_priority([0, 0, 1]) == 3
    assert aggregate_compatibility(["0.3", "0.3", "0.2", "0.2"]) == 2
    assert aggregate_compatibility([0, "0.5", 0, "0.5"]) == 0
    with pytest.raises(ValidationError):
        aggregate_priority([0, 0, 0])
    with pytest.raises(ValidationError):
        FuzzyPriority((Fraction(3, 2),))
    with pytest.raises(ValidationError):
        FuzzyCompatibility(())
    assert FuzzyPriority(("0.5", "0.5")).normalized
    assert not FuzzyPriority(("0.5", "0.6")).normalized


def test_fixture_aggregates(fuzzy_abc):
    for da, r in pub.FUZZY_PRIORITY.items():
        assert fuzzy_abc.alternative(da).priority == r
    for (a, b), level in pub.FUZZY_COMPAT.items():
        assert fuzzy_abc.compat.level(a, b) == level


@pytest.mark.parametrize("case", [1, 2, 3, 4])
def test_support_matches_enumeration(fuzzy_abc, case):
    fp, fc = case in (3, 4), case in (2, 4)
    for c in all_compositions(fuzzy_abc):
        got = quality_support(fuzzy_abc, c, 0, fp, fc)
        assert dict(got) == brute_support(fuzzy_abc, c, fp, fc)
        assert [mu for _, mu in got] == sorted((mu for _, mu in got), reverse=True)


def test_case_structure(fuzzy_abc):
    # case 2 varies only w, case 3 only the census
    for c in all_compositions(fuzzy_abc):
        crisp = quality_support(fuzzy_abc, c, 0, False, False)
        assert len(crisp) == 1
        q0 = crisp[0][0]
        assert {q.n for q, _ in quality_support(fuzzy_abc, c, 0, False, True)} == {q0.n}
        assert {q.w for q, _ in quality_support(fuzzy_abc, c, 0, True, False)} == {q0.w}


def test_alpha_cut(fuzzy_abc):
    c = next(iter(all_compositions(fuzzy_abc)))
    full = quality_support(fuzzy_abc, c, 0)
    cut = quality_support(fuzzy_abc, c, "0.2")
    assert cut == [p for p in full if p[1] >= Fraction(1, 5)]
    with pytest.raises(InfeasibleError):
        quality_support(fuzzy_abc, c, "0.99")
    with pytest.raises(ValidationError):
        quality_support(fuzzy_abc, c, 2)


def test_corner():
    support = [(QualityVector(2, (1, 1, 1)), Fraction(1)), (QualityVector(1, (0, 3, 0)), Fraction(1, 2))]
    assert pessimistic_corner(support) == (1, 0, 2, 3)


def test_case_one_is_crisp_front(fuzzy_abc):
    crisp = {c for c, _ in brute_clique(fuzzy_abc)}
    assert {d.composition for d in solve_fuzzy(fuzzy_abc, 1)} == crisp


def test_case_four_published_run(fuzzy_abc):
    decisions = solve_fuzzy(fuzzy_abc, 4)
    assert [str(d.composition) for d in decisions] == ["A1*B2*C1", "A2*B2*C2"]
    assert [str(d.representative) for d in decisions] == ["(1; 3,0,0)", "(2; 1,1,1)"]


def test_preference_modes(fuzzy_abc):
    for case in (1, 2, 3, 4):
        for pref in ("maxmem", "pessimistic"):
            out = solve_fuzzy(fuzzy_abc, case, pref=pref)
            assert out
            assert all(d.representative.w >= 1 for d in out)
    with pytest.raises(ValidationError):
        solve_fuzzy(fuzzy_abc, 5)
    with pytest.raises(ValidationError):
        solve_fuzzy(fuzzy_abc, 1, pref="optimistic")


@settings(max_examples=25, deadline=None)
@given(morphologies(max_parts=3, max_das=2, fuzzy=True))
def test_random_support_matches_enumeration(m):
    for c in all_compositions(m):
        assert dict(quality_support(m, c)) == brute_support(m, c)
