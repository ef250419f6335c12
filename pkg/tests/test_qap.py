from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_pareto, mcp_instances
from morphsynth.errors import CapExceededError, InfeasibleError, ValidationError
from morphsynth.mcp import derive_mcp_instance
from morphsynth.qap import (QapInstance, QapItem, derive_qap_instance, from_mcp, qap_objective,
                            solve_qap_exact, solve_qap_greedy, solve_qap_pareto)


def _brute(inst):
    """Best objective over all selections, computed without the module."""
    options = [list(g) + ([None] if inst.at_most_one else []) for g in inst.groups]
    best = None
    for combo in product(*options):
        picked = [it for it in combo if it is not None]
        if sum((it.weight for it in picked), Fraction(0)) > inst.budget:
            continue
        value = sum((Fraction(it.profit) for it in picked), Fraction(0))
        for i in range(len(picked)):
            for j in range(i + 1, len(picked)):
                value += inst.pair_profit.get(frozenset((picked[i].id, picked[j].id)), 0)
        if best is None or value > best:
            best = value
    return best


@st.composite
def qap_instances(draw, vector=False):
    base = draw(mcp_instances(max_groups=3, max_items=3, vector=vector))
    ids = [(gi, it.id) for gi, g in enumerate(base.groups) for it in g]
    d = {}
    for x in range(len(ids)):
        for y in range(x + 1, len(ids)):
            if ids[x][0] != ids[y][0] and draw(st.booleans()):
                d[frozenset((ids[x][1], ids[y][1]))] = Fraction(draw(st.integers(0, 3)))
    return from_mcp(base, d, draw(st.booleans()))


@settings(max_examples=60, deadline=None)
@given(qap_instances())
def test_exact_matches_brute_force(inst):
    best = _brute(inst)
    if best is None:
        with pytest.raises(InfeasibleError):
            solve_qap_exact(inst)
        return
    sol = solve_qap_exact(inst)
    assert sol.objective == best == qap_objective(inst, sol.selection)
    assert sol.weight <= inst.budget
    greedy = None
    try:
        greedy = solve_qap_greedy(inst)
    except InfeasibleError:
        pass
    if greedy is not None:
        assert greedy.weight <= inst.budget
        assert greedy.objective <= best


@settings(max_examples=30, deadline=None)
@given(qap_instances(vector=True))
def test_pareto_frontier_is_exact(inst):
    options = [list(g) + ([None] if inst.at_most_one else []) for g in inst.groups]
    vecs = []
    for combo in product(*options):
        picked = [it for it in combo if it is not None]
        if sum((it.weight for it in picked), Fraction(0)) > inst.budget:
            continue
        lin = [sum((it.profit[k] for it in picked), Fraction(0)) for k in range(2)]
        pairs = sum((inst.pair_profit.get(frozenset((a.id, b.id)), 0)
                     for i, a in enumerate(picked) for b in picked[i + 1:]), Fraction(0))
        vecs.append(tuple(lin) + (pairs,))
    if not vecs:
        with pytest.raises(InfeasibleError):
            solve_qap_pareto(inst)
        return
    front = solve_qap_pareto(inst)
    assert {v for _, v in front} == {vecs[i] for i in brute_pareto(vecs, max)}


def test_gsm(gsm):
    inst = derive_qap_instance(gsm, 15)
    assert inst.d("M4", "L2") == 3 and inst.d("M1", "L3") == 0
    assert inst.d("M4", "V1") == 0  # no table between the two subsystems
    sol = solve_qap_exact(inst)
    assert sol.objective == _brute(inst) == 22
    assert list(sol.selection) == ["M2", "L2", "V1", "U5", "T1"]
    assert solve_qap_exact(inst, threads=4) == sol
    # the knapsack greedy pick: c = 3+3+1+2+1, pairs M4-L1 0, V6-U3 2, V6-T1 3, U3-T1 2
    assert qap_objective(inst, ["M4", "L1", "V6", "U3", "T1"]) == 17
    greedy = solve_qap_greedy(inst)
    assert greedy.weight <= 15 and greedy.objective <= 22


def test_zero_pairs_is_knapsack(gsm):
    inst = from_mcp(derive_mcp_instance(gsm, 15))
    assert solve_qap_exact(inst).objective == 11


def test_gsm_pareto(gsm):
    inst = derive_qap_instance(gsm, 15, profit_vector=True)
    front = solve_qap_pareto(inst)
    vecs = [v for _, v in front]
    assert all(len(v) == 3 for v in vecs)
    assert max(v[0] + v[2] for v in vecs) == 22  # the scalar optimum lies on the frontier


def test_validation():
    a, b = QapItem("a", 1, Fraction(1)), QapItem("b", 1, Fraction(1))
    with pytest.raises(ValidationError):
        QapInstance(((a, b),), 2, {frozenset(("a", "b")): 1})
    with pytest.raises(ValidationError):
        QapInstance(((a,), (b,)), 2, {frozenset(("a", "b")): -1})
    with pytest.raises(ValidationError):
        QapInstance(((a,), (b,)), 2, {frozenset(("a", "z")): 1})
    inst = QapInstance(((a,), (b,)), 2)
    with pytest.raises(ValidationError):
        qap_objective(inst, ["a", "a"])


def test_cap(gsm):
    with pytest.raises(CapExceededError):
        solve_qap_exact(derive_qap_instance(gsm, 15), cap=100)
